//! Tight frames and the two extremal families: harmonic unit-norm tight
//! frames, whose sign patterns all have the same norm, and the diagonal
//! `±1` family attaining the logarithmic lower bound.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, ComplexVector, HermitianMatrix, C64};
use crate::model::{DiscreteRandomVariable, HermitianInstance, RankOneInstance};

pub const TIGHT_TOL: f64 = 1e-9;
pub const UNIT_NORM_TOL: f64 = 1e-9;
pub const PATTERN_TOL: f64 = 1e-9;
pub const DEFAULT_PATTERN_CAP: u64 = 1 << 24;
pub const MAX_DIAGONAL_N: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    dim: usize,
    vectors: Vec<ComplexVector>,
}

impl Frame {
    pub fn new(dim: usize, vectors: Vec<ComplexVector>) -> Result<Self> {
        if dim == 0 || vectors.is_empty() {
            return Err(Error::InvalidShape("need d >= 1 and n >= 1".into()));
        }
        if let Some(i) = vectors.iter().position(|v| v.dim() != dim) {
            return Err(Error::InvalidShape(format!(
                "vector {i} has dimension {}",
                vectors[i].dim()
            )));
        }
        Ok(Self { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    pub fn frame_operator(&self) -> HermitianMatrix {
        let outers: Vec<HermitianMatrix> = self.vectors.iter().map(ComplexVector::outer).collect();
        HermitianMatrix::sum_scaled(self.dim, outers.iter().map(|m| (1.0, m)))
    }

    /// The frame with a Rademacher sign attached to every vector.
    pub fn to_instance(&self) -> RankOneInstance {
        RankOneInstance::rademacher(self.dim, self.vectors.clone())
            .expect("frame dimensions are consistent")
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            vectors: self.vectors.iter().map(|v| v.scaled(s)).collect(),
        }
    }
}

/// Rows `0..d` of the unitary `n×n` DFT, columns rescaled to unit norm.
pub fn harmonic_untf(n: usize, d: usize) -> Result<Frame> {
    if d == 0 || n < d {
        return Err(Error::InvalidShape(format!(
            "need n >= d >= 1, got n = {n}, d = {d}"
        )));
    }
    let scale = 1.0 / (d as f64).sqrt();
    let vectors = (0..n)
        .map(|i| {
            ComplexVector(
                (0..d)
                    .map(|k| {
                        let angle = 2.0 * PI * ((k * i) % n) as f64 / n as f64;
                        C64::from_polar(scale, angle)
                    })
                    .collect(),
            )
        })
        .collect();
    Frame::new(d, vectors)
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameAnalysis {
    pub is_tight: bool,
    pub frame_bound: f64,
    pub is_unit_norm: bool,
    /// `‖Σ (u_i u_i*)²‖`.
    pub sigma_sq: f64,
    /// `C² d / n`, reported for tight frames only.
    pub lower_bound: Option<f64>,
    pub lower_bound_holds: Option<bool>,
}

pub fn analyze_frame(f: &Frame) -> FrameAnalysis {
    let d = f.dim();
    let op = f.frame_operator();
    let c = op.trace() / d as f64;
    let dev = (op.as_matrix() - DMatrix::<C64>::identity(d, d) * C64::from(c)).norm();
    let is_tight = dev <= TIGHT_TOL * (1.0 + c.abs());
    let is_unit_norm = f
        .vectors()
        .iter()
        .all(|v| (v.norm() - 1.0).abs() <= UNIT_NORM_TOL);
    let sigma_sq = spectral_norm(&f.to_instance().variance_matrix());
    let lower_bound = is_tight.then(|| c * c * d as f64 / f.n() as f64);
    FrameAnalysis {
        is_tight,
        frame_bound: c,
        is_unit_norm,
        sigma_sq,
        lower_bound,
        lower_bound_holds: lower_bound.map(|b| sigma_sq >= b - 1e-9),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UntfDisc {
    pub n: usize,
    pub d: usize,
    pub patterns: u64,
    pub min_norm: f64,
    pub max_norm: f64,
    /// `n / d`.
    pub expected: f64,
    pub all_patterns_constant: bool,
    pub value: f64,
    pub sigma: f64,
    /// `√(n/d) · σ`.
    pub sigma_formula: f64,
    pub matches_sigma_formula: bool,
    pub ratio: f64,
}

/// Enumerates every Rademacher sign pattern of a unit-norm tight frame with `d ≤ n ≤ 2d − 1`.
pub fn verify_untf_disc(f: &Frame) -> Result<UntfDisc> {
    let (n, d) = (f.n(), f.dim());
    if n < d || n > 2 * d - 1 {
        return Err(Error::PreconditionViolated(format!(
            "need d <= n <= 2d - 1, got n = {n}, d = {d}"
        )));
    }
    let a = analyze_frame(f);
    if !(a.is_tight && a.is_unit_norm) {
        return Err(Error::PreconditionViolated(
            "frame is not a unit-norm tight frame".into(),
        ));
    }
    let patterns = 1u64 << n;
    if patterns > DEFAULT_PATTERN_CAP {
        return Err(Error::EnumerationTooLarge {
            required: patterns as u128,
            cap: DEFAULT_PATTERN_CAP as u128,
        });
    }
    let outers: Vec<DMatrix<C64>> = f
        .vectors()
        .iter()
        .map(|v| v.outer().into_matrix())
        .collect();
    let (min_norm, max_norm) = (0..patterns)
        .into_par_iter()
        .map(|mask| {
            let mut m = DMatrix::<C64>::zeros(d, d);
            for (i, o) in outers.iter().enumerate() {
                if mask & (1 << i) == 0 {
                    m += o;
                } else {
                    m -= o;
                }
            }
            let v = spectral_norm(
                &HermitianMatrix::new(m).expect("real combination of Hermitian matrices"),
            );
            (v, v)
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |x, y| (x.0.min(y.0), x.1.max(y.1)),
        );
    let expected = n as f64 / d as f64;
    let sigma = a.sigma_sq.sqrt();
    let sigma_formula = expected.sqrt() * sigma;
    Ok(UntfDisc {
        n,
        d,
        patterns,
        min_norm,
        max_norm,
        expected,
        all_patterns_constant: (max_norm - expected).abs() <= PATTERN_TOL
            && (min_norm - expected).abs() <= PATTERN_TOL,
        value: min_norm,
        sigma,
        sigma_formula,
        matches_sigma_formula: (min_norm - sigma_formula).abs() <= PATTERN_TOL,
        ratio: min_norm / sigma,
    })
}

/// Diagonals of `A_i = Diag(h_{1,i}, …, h_{d,i})` over all `h_k ∈ {±1}^n`, `d = 2^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalFamily {
    pub n: usize,
    pub diagonals: Vec<Vec<i64>>,
}

impl DiagonalFamily {
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn to_instance(&self) -> HermitianInstance {
        let mats = self
            .diagonals
            .iter()
            .map(|diag| HermitianMatrix::diag(&diag.iter().map(|&v| v as f64).collect::<Vec<_>>()))
            .collect();
        HermitianInstance::new(
            self.dim(),
            mats,
            vec![DiscreteRandomVariable::rademacher(); self.n],
        )
        .expect("family dimensions are consistent")
    }
}

/// Coordinate `i` of the `k`-th sign vector: the `i`-th binary digit of `k`
/// (most significant first), with digit `0 ↦ +1`.
fn sign_entry(k: usize, i: usize, n: usize) -> i64 {
    if (k >> (n - 1 - i)) & 1 == 0 {
        1
    } else {
        -1
    }
}

pub fn hadamard_diagonal_family(n: usize) -> Result<DiagonalFamily> {
    if n == 0 || n > MAX_DIAGONAL_N {
        return Err(Error::TooLarge(format!(
            "need 1 <= n <= {MAX_DIAGONAL_N}, got {n}"
        )));
    }
    let d = 1usize << n;
    Ok(DiagonalFamily {
        n,
        diagonals: (0..n)
            .map(|i| (0..d).map(|k| sign_entry(k, i, n)).collect())
            .collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBound {
    pub n: usize,
    pub d: usize,
    pub disc: i64,
    pub sigma_sq: i64,
    /// `Disc / (√(log₂ d) · σ)`.
    pub ratio: f64,
    pub pass: bool,
}

/// Exact integer enumeration of the diagonal family's discrepancy and `σ²`.
pub fn verify_lower_bound(n: usize) -> Result<LowerBound> {
    let fam = hadamard_diagonal_family(n)?;
    let d = fam.dim();
    let disc = (0..(1u64 << n))
        .map(|mask| {
            (0..d)
                .map(|k| {
                    fam.diagonals
                        .iter()
                        .enumerate()
                        .map(|(i, diag)| {
                            if mask & (1 << i) == 0 {
                                diag[k]
                            } else {
                                -diag[k]
                            }
                        })
                        .sum::<i64>()
                        .abs()
                })
                .max()
                .expect("d >= 2")
        })
        .min()
        .expect("at least one pattern");
    // A_i² = I entrywise, so ‖Σ A_i²‖ is the largest diagonal sum of squares
    let sigma_sq = (0..d)
        .map(|k| {
            fam.diagonals
                .iter()
                .map(|diag| diag[k] * diag[k])
                .sum::<i64>()
        })
        .max()
        .expect("d >= 2");
    let ratio = disc as f64 / ((n as f64).sqrt() * (sigma_sq as f64).sqrt());
    Ok(LowerBound {
        n,
        d,
        disc,
        sigma_sq,
        ratio,
        pass: disc == n as i64 && sigma_sq == n as i64,
    })
}
