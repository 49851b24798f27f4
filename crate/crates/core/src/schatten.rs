//! Schatten-p discrepancy and the matrix Khintchine upper bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::disc::{disc_bruteforce_capped, NormKind, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::linalg::{eigvals_hermitian, psd_sqrt, schatten_norm, HermitianMatrix, SchattenOrder};
use crate::model::{DiscreteRandomVariable, HermitianInstance, Instance};

pub const DEFAULT_MC_SAMPLES: usize = 10_000;
pub const DEFAULT_MC_SEED: u64 = 0xD15C;
pub const MIN_MC_SAMPLES: usize = 1000;

/// Exact `Disc_p` by enumeration.
pub fn disc_p(inst: &HermitianInstance, p: f64) -> Result<f64> {
    disc_p_capped(inst, p, DEFAULT_ENUMERATION_CAP)
}

pub fn disc_p_capped(inst: &HermitianInstance, p: f64, cap: u128) -> Result<f64> {
    let norm = if p.is_infinite() {
        NormKind::Spectral
    } else {
        NormKind::Schatten(p)
    };
    Ok(disc_bruteforce_capped(&Instance::Hermitian(inst.clone()), norm, cap)?.value)
}

#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloBound {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrobeniusBound {
    /// `‖(Σ (Var[ξ_i] A_i)²)^{1/2}‖_F`, the stated Frobenius bound.
    pub sigma_f: f64,
    /// `(Σ Var[ξ_i] ‖A_i‖_F²)^{1/2}`, the exact Frobenius second moment.
    pub second_moment: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SchattenReport {
    pub p: f64,
    pub disc_p: f64,
    /// `√(p−1) ‖(Σ A_i²)^{1/2}‖_p`, for Rademacher instances.
    pub rademacher_closed_form: Option<f64>,
    /// `√((p−1)/2) (E‖(Σ((ξ_i−E ξ_i)² A_i² + (Var[ξ_i] A_i)²))^{1/2}‖_p^p)^{1/p}`.
    pub general_khintchine: MonteCarloBound,
    /// The same estimate with `Var[ξ_i] A_i²` as the second term.
    pub general_second_moment: MonteCarloBound,
    pub frobenius_closed_form: Option<FrobeniusBound>,
}

/// Draws one outcome index from a finite distribution given a uniform `u ∈ [0, 1)`.
fn draw(rv: &DiscreteRandomVariable, u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in rv.probs().iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    rv.len() - 1
}

/// `‖S^{1/2}‖_p^p = Σ λ_i(S)^{p/2}` for PSD `S`.
fn root_schatten_pow(s: &HermitianMatrix, p: f64) -> Result<f64> {
    let eig = eigvals_hermitian(s);
    let scale = eig.iter().fold(1.0f64, |acc, l| acc.max(l.abs()));
    if let Some(&min) = eig.first() {
        if min < -1e-10 * scale {
            return Err(Error::NotPsd(min));
        }
    }
    Ok(eig.iter().map(|l| l.max(0.0).powf(p / 2.0)).sum())
}

#[derive(Clone, Copy)]
enum SecondTerm {
    /// `(Var[ξ] A)²`.
    VarianceSquared,
    /// `Var[ξ] A²`.
    Variance,
}

fn monte_carlo(
    inst: &HermitianInstance,
    p: f64,
    samples: usize,
    seed: u64,
    term: SecondTerm,
) -> Result<MonteCarloBound> {
    let squares: Vec<HermitianMatrix> = inst
        .matrices()
        .iter()
        .map(HermitianMatrix::square)
        .collect();
    let d = inst.dim();
    let mut fixed = HermitianMatrix::zeros(d);
    for (sq, rv) in squares.iter().zip(inst.rvs()) {
        let v = rv.variance();
        match term {
            SecondTerm::VarianceSquared => fixed.add_scaled(v * v, sq),
            SecondTerm::Variance => fixed.add_scaled(v, sq),
        }
    }
    let values = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let mut acc = fixed.clone();
            for (sq, rv) in squares.iter().zip(inst.rvs()) {
                let e = rv.support()[draw(rv, rng.random::<f64>())] - rv.mean();
                acc.add_scaled(e * e, sq);
            }
            root_schatten_pow(&acc, p)
        })
        .collect::<Result<Vec<f64>>>()?;
    // Welford, in draw order
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for (k, v) in values.iter().enumerate() {
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = if samples > 1 {
        m2 / (samples - 1) as f64
    } else {
        0.0
    };
    let stderr_mean = (var / samples as f64).sqrt();
    let c = ((p - 1.0) / 2.0).sqrt();
    let value = c * mean.powf(1.0 / p);
    let stderr = if mean > 0.0 {
        c * mean.powf(1.0 / p - 1.0) / p * stderr_mean
    } else {
        0.0
    };
    Ok(MonteCarloBound {
        value,
        stderr,
        samples,
        seed,
    })
}

/// Closed-form and sampled Khintchine bounds next to the exact `Disc_p`.
pub fn khintchine_bounds(
    inst: &HermitianInstance,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<SchattenReport> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::InvalidOrder(p));
    }
    SchattenOrder::new(p)?;
    if samples < MIN_MC_SAMPLES {
        return Err(Error::PreconditionViolated(format!(
            "need at least {MIN_MC_SAMPLES} Monte-Carlo samples, got {samples}"
        )));
    }
    let value = disc_p(inst, p)?;
    let d = inst.dim();
    let rademacher_closed_form = if inst.all_rademacher() {
        let mut s = HermitianMatrix::zeros(d);
        for a in inst.matrices() {
            s.add_scaled(1.0, &a.square());
        }
        Some((p - 1.0).sqrt() * schatten_norm(&psd_sqrt(&s)?, p)?)
    } else {
        None
    };
    let frobenius_closed_form = if p == 2.0 {
        let mut s = HermitianMatrix::zeros(d);
        let mut second = 0.0;
        for (a, rv) in inst.matrices().iter().zip(inst.rvs()) {
            let v = rv.variance();
            s.add_scaled(v * v, &a.square());
            second += v * a.frobenius_sqr();
        }
        Some(FrobeniusBound {
            sigma_f: s.trace().max(0.0).sqrt(),
            second_moment: second.sqrt(),
        })
    } else {
        None
    };
    Ok(SchattenReport {
        p,
        disc_p: value,
        rademacher_closed_form,
        general_khintchine: monte_carlo(inst, p, samples, seed, SecondTerm::VarianceSquared)?,
        general_second_moment: monte_carlo(inst, p, samples, seed, SecondTerm::Variance)?,
        frobenius_closed_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn disc_p_examples() {
        let a = HermitianMatrix::diag(&[1.0, -1.0]);
        let inst = HermitianInstance::new(
            2,
            vec![a.clone()],
            vec![DiscreteRandomVariable::rademacher()],
        )
        .unwrap();
        assert_abs_diff_eq!(disc_p(&inst, 2.0).unwrap(), 2f64.sqrt(), epsilon = 1e-14);
        let consts =
            HermitianInstance::new(2, vec![a], vec![DiscreteRandomVariable::constant(0.7)])
                .unwrap();
        assert_eq!(disc_p(&consts, 4.0).unwrap(), 0.0);
    }

    #[test]
    fn rademacher_integrand_is_deterministic() {
        let inst = HermitianInstance::new(
            2,
            vec![
                HermitianMatrix::diag(&[1.0, 2.0]),
                HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            ],
            vec![DiscreteRandomVariable::rademacher(); 2],
        )
        .unwrap();
        for p in [2.0, 4.0, 6.0] {
            let r = khintchine_bounds(&inst, p, 1000, DEFAULT_MC_SEED).unwrap();
            assert_eq!(r.general_khintchine.stderr, 0.0);
            let closed = r.rademacher_closed_form.unwrap();
            assert_abs_diff_eq!(r.general_khintchine.value, closed, epsilon = 1e-12 * closed);
            assert!(r.disc_p <= closed + 1e-9);
        }
        let r = khintchine_bounds(&inst, 2.0, 1000, DEFAULT_MC_SEED).unwrap();
        // Tr Σ A² = 1 + 4 + 2
        assert_abs_diff_eq!(
            r.rademacher_closed_form.unwrap(),
            7f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn rejects_bad_order() {
        let inst = HermitianInstance::new(
            1,
            vec![HermitianMatrix::diag(&[1.0])],
            vec![DiscreteRandomVariable::rademacher()],
        )
        .unwrap();
        assert!(matches!(
            khintchine_bounds(&inst, 1.5, 1000, 1),
            Err(Error::InvalidOrder(_))
        ));
        assert!(matches!(
            khintchine_bounds(&inst, f64::INFINITY, 1000, 1),
            Err(Error::InvalidOrder(_))
        ));
    }
}
