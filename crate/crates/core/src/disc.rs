//! Discrepancy: exact enumeration, expected characteristic polynomials,
//! the interlacing-family greedy solver and bound comparisons.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    charpoly, det, eigvals_hermitian, schatten_from_eigs, spectral_norm, ComplexVector,
    HermitianMatrix, SchattenOrder, C64,
};
use crate::model::{sigma, DiscreteRandomVariable, Instance, RankOneInstance, SignAssignment};
use crate::rpoly::{
    has_common_interlacing, Interpolant, Poly, COMMON_INTERLACING_SAMPLES, DEFAULT_ROOT_TOL,
};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 24;

/// Largest `n` accepted by the operator route (`3^n` determinant evaluations per node).
pub const OPERATOR_MAX_N: usize = 14;

/// Slack allowed when a child's largest root exceeds its parent's.
pub const MONOTONE_TOL: f64 = 1e-9;

const CHUNK: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Spectral,
    Schatten(f64),
}

impl NormKind {
    pub fn order(self) -> Result<SchattenOrder> {
        match self {
            NormKind::Spectral => Ok(SchattenOrder::Infinity),
            NormKind::Schatten(p) => SchattenOrder::new(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub bound: f64,
    pub satisfied: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyReport {
    pub value: f64,
    pub argmin: SignAssignment,
    pub assignment: Vec<f64>,
    pub sigma: f64,
    pub norm_kind: NormKind,
    pub bound_checks: BTreeMap<String, BoundCheck>,
}

/// Mixed-radix enumeration over a product of supports, first coordinate most significant.
#[derive(Clone, Debug)]
pub(crate) struct Radix {
    sizes: Vec<usize>,
    total: u64,
}

impl Radix {
    pub(crate) fn new(rvs: &[DiscreteRandomVariable], cap: u128) -> Result<Self> {
        let sizes: Vec<usize> = rvs.iter().map(DiscreteRandomVariable::len).collect();
        let required = sizes
            .iter()
            .fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
        if required > cap {
            return Err(Error::EnumerationTooLarge { required, cap });
        }
        Ok(Self {
            sizes,
            total: required as u64,
        })
    }

    fn decode_into(&self, mut idx: u64, out: &mut [usize]) {
        for (slot, &s) in out.iter_mut().zip(&self.sizes).rev() {
            *slot = (idx % s as u64) as usize;
            idx /= s as u64;
        }
    }

    /// Index range of all completions of `prefix`.
    fn block(&self, prefix: &[usize]) -> (u64, u64) {
        let mut lo = 0u64;
        for (&i, &s) in prefix.iter().zip(&self.sizes) {
            lo = lo * s as u64 + i as u64;
        }
        let width: u64 = self.sizes[prefix.len()..]
            .iter()
            .map(|&s| s as u64)
            .product();
        (lo * width, (lo + 1) * width)
    }
}

/// Precomputed `M_j` and per-outcome deviations `E[ξ_j] − s` for each support point.
struct Deviation<'a> {
    rvs: &'a [DiscreteRandomVariable],
    mats: Vec<DMatrix<C64>>,
    offsets: Vec<Vec<f64>>,
    dim: usize,
}

impl<'a> Deviation<'a> {
    fn new(dim: usize, mats: &[HermitianMatrix], rvs: &'a [DiscreteRandomVariable]) -> Self {
        Self {
            rvs,
            mats: mats.iter().map(|m| m.as_matrix().clone()).collect(),
            offsets: rvs
                .iter()
                .map(|rv| {
                    let mean = rv.mean();
                    rv.support().iter().map(|s| mean - s).collect()
                })
                .collect(),
            dim,
        }
    }

    /// `Σ (E[ξ_j] − ε_j) M_j` for the assignment given by support indices.
    fn matrix(&self, idx: &[usize]) -> HermitianMatrix {
        let mut m = DMatrix::<C64>::zeros(self.dim, self.dim);
        for ((&i, off), mj) in idx.iter().zip(&self.offsets).zip(&self.mats) {
            let c = off[i];
            if c != 0.0 {
                m += mj * C64::from(c);
            }
        }
        HermitianMatrix::new(m).expect("real combination of Hermitian matrices")
    }
}

fn norm_of(m: &HermitianMatrix, order: SchattenOrder) -> f64 {
    match order {
        SchattenOrder::Infinity => spectral_norm(m),
        _ => schatten_from_eigs(&eigvals_hermitian(m), order),
    }
}

/// `‖Σ ε_j M_j − Σ E[ξ_j] M_j‖` for one assignment.
pub fn assignment_norm(
    inst: &Instance,
    assignment: &SignAssignment,
    norm: NormKind,
) -> Result<f64> {
    let mats = inst.matrices();
    let dev = Deviation::new(inst.dim(), &mats, inst.rvs());
    Ok(norm_of(&dev.matrix(assignment.indices()), norm.order()?))
}

fn better(a: (f64, u64), b: (f64, u64)) -> (f64, u64) {
    match a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) {
        Ordering::Greater => b,
        _ => a,
    }
}

pub fn disc_bruteforce(inst: &Instance, norm: NormKind) -> Result<DiscrepancyReport> {
    disc_bruteforce_capped(inst, norm, DEFAULT_ENUMERATION_CAP)
}

/// Exact minimum over every assignment; ties go to the smallest index vector.
pub fn disc_bruteforce_capped(
    inst: &Instance,
    norm: NormKind,
    cap: u128,
) -> Result<DiscrepancyReport> {
    let order = norm.order()?;
    let radix = Radix::new(inst.rvs(), cap)?;
    let mats = inst.matrices();
    let dev = Deviation::new(inst.dim(), &mats, inst.rvs());
    let n = inst.n();
    let chunks = radix.total.div_ceil(CHUNK);
    let (value, best) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut idx = vec![0usize; n];
            let mut best = (f64::INFINITY, u64::MAX);
            for g in (c * CHUNK)..((c + 1) * CHUNK).min(radix.total) {
                radix.decode_into(g, &mut idx);
                best = better(best, (norm_of(&dev.matrix(&idx), order), g));
            }
            best
        })
        .reduce(|| (f64::INFINITY, u64::MAX), better);
    let mut idx = vec![0usize; n];
    radix.decode_into(best, &mut idx);
    let argmin = SignAssignment::new(idx, inst.rvs())?;
    let bound_checks = match (inst, norm) {
        (Instance::RankOne(r), NormKind::Spectral) => bound_menu(r)
            .into_iter()
            .map(|(k, b)| {
                (
                    k,
                    BoundCheck {
                        bound: b,
                        satisfied: value <= b + MONOTONE_TOL * (1.0 + b),
                    },
                )
            })
            .collect(),
        _ => BTreeMap::new(),
    };
    Ok(DiscrepancyReport {
        value,
        assignment: argmin.values(inst.rvs()),
        argmin,
        sigma: inst.sigma(),
        norm_kind: norm,
        bound_checks,
    })
}

/// `det[x²I − M²]` via `det[xI − M]·det[xI + M]`, with odd coefficients zeroed.
pub fn leaf_poly(m: &HermitianMatrix) -> Poly {
    let c = charpoly(m);
    let mirrored = if m.dim().is_multiple_of(2) {
        c.reflect()
    } else {
        c.reflect().scale(-1.0)
    };
    (&c * &mirrored).even_part()
}

/// Sums weighted leaf polynomials over the completions of `prefix`.
struct LeafSum<'a> {
    radix: Radix,
    dev: Deviation<'a>,
    dim: usize,
}

impl<'a> LeafSum<'a> {
    fn new(inst: &'a RankOneInstance, cap: u128, mats: &[HermitianMatrix]) -> Result<Self> {
        Ok(Self {
            radix: Radix::new(inst.rvs(), cap)?,
            dev: Deviation::new(inst.dim(), mats, inst.rvs()),
            dim: inst.dim(),
        })
    }

    fn leaf(&self, idx: &[usize]) -> Poly {
        let w: f64 = idx
            .iter()
            .zip(self.dev.rvs)
            .map(|(&i, rv)| rv.probs()[i])
            .product();
        leaf_poly(&self.dev.matrix(idx)).scale(w)
    }

    fn prefix_sum(&self, prefix: &[usize]) -> Poly {
        let (lo, hi) = self.radix.block(prefix);
        let n = self.dev.rvs.len();
        let len = 2 * self.dim + 1;
        let chunks = (hi - lo).div_ceil(CHUNK);
        let partial: Vec<Poly> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut idx = vec![0usize; n];
                let mut acc = Poly::new(vec![0.0; len]);
                for g in (lo + c * CHUNK)..(lo + (c + 1) * CHUNK).min(hi) {
                    self.radix.decode_into(g, &mut idx);
                    acc.accumulate(&self.leaf(&idx));
                }
                acc
            })
            .collect();
        let mut total = Poly::new(vec![0.0; len]);
        for p in &partial {
            total.accumulate(p);
        }
        total.trimmed()
    }
}

fn check_prefix(inst: &RankOneInstance, prefix: &[usize]) -> Result<()> {
    if prefix.len() > inst.n() {
        return Err(Error::InvariantViolation(format!(
            "prefix of length {} exceeds n = {}",
            prefix.len(),
            inst.n()
        )));
    }
    if let Some(j) = prefix
        .iter()
        .zip(inst.rvs())
        .position(|(&i, rv)| i >= rv.len())
    {
        return Err(Error::InvariantViolation(format!(
            "prefix[{j}] is outside the support"
        )));
    }
    Ok(())
}

/// `p_{ε_1…ε_k}(x)` by enumeration over the remaining supports.
pub fn expected_charpoly(inst: &RankOneInstance, prefix: &[usize]) -> Result<Poly> {
    check_prefix(inst, prefix)?;
    let mats = inst.outers();
    LeafSum::new(inst, DEFAULT_ENUMERATION_CAP, &mats).map(|s| s.prefix_sum(prefix))
}

/// Weights of the exact three-point rule `2g(0) − (g(1) + g(−1))/2` at `z ∈ {−1, 0, 1}`.
pub(crate) const THREE_POINT: [(f64, f64); 3] = [(-1.0, -0.5), (0.0, 2.0), (1.0, -0.5)];

/// `p_∅` through `Π(1 − ½∂²_{z_i})|_{z=0} det[xI + Σ z_i τ_i u_i u_i*]²`.
pub fn expected_charpoly_operator(inst: &RankOneInstance) -> Result<Poly> {
    let n = inst.n();
    if n > OPERATOR_MAX_N {
        return Err(Error::EnumerationTooLarge {
            required: 3u128.pow(n as u32),
            cap: 3u128.pow(OPERATOR_MAX_N as u32),
        });
    }
    let d = inst.dim();
    let scaled: Vec<DMatrix<C64>> = inst
        .vectors()
        .iter()
        .zip(inst.rvs())
        .map(|(u, rv)| u.outer().as_matrix() * C64::from(rv.std_dev()))
        .collect();
    let radius = 1.0
        + inst
            .vectors()
            .iter()
            .zip(inst.rvs())
            .map(|(u, rv)| rv.std_dev() * u.norm_sqr())
            .sum::<f64>();
    let total = 3u64.pow(n as u32);
    let eval = |x: f64| -> f64 {
        let chunks = total.div_ceil(CHUNK);
        let partial: Vec<f64> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = 0.0;
                for g in (c * CHUNK)..((c + 1) * CHUNK).min(total) {
                    let mut m = DMatrix::<C64>::identity(d, d) * C64::from(x);
                    let mut w = 1.0;
                    let mut rest = g;
                    for s in scaled.iter().rev() {
                        let (z, wz) = THREE_POINT[(rest % 3) as usize];
                        rest /= 3;
                        w *= wz;
                        if z != 0.0 {
                            m += s * C64::from(z);
                        }
                    }
                    let f = det(&m).re;
                    acc += w * f * f;
                }
                acc
            })
            .collect();
        partial.iter().sum()
    };
    Ok(Interpolant::fit(2 * d, 0.0, radius, eval)
        .to_global()
        .even_part()
        .trimmed())
}

#[derive(Clone, Debug, Serialize)]
pub struct GreedyLevel {
    pub level: usize,
    pub parent_lambda: f64,
    pub branch_lambdas: Vec<f64>,
    pub chosen: usize,
    pub chosen_value: f64,
    pub chosen_lambda: f64,
    /// Set when the chosen child's largest root exceeds the parent's by more than `MONOTONE_TOL`.
    pub violation: bool,
    pub common_interlacing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GreedyTrace {
    pub root_lambda: f64,
    pub levels: Vec<GreedyLevel>,
    /// `λ_max` of the final leaf polynomial.
    pub leaf_lambda: f64,
    /// Spectral norm of the signed sum, recomputed directly.
    pub value: f64,
}

impl GreedyTrace {
    pub fn monotone(&self) -> bool {
        self.levels.iter().all(|l| !l.violation)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GreedyOptions {
    pub root_tol: f64,
    pub cap: u128,
    pub check_common_interlacing: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self {
            root_tol: DEFAULT_ROOT_TOL,
            cap: DEFAULT_ENUMERATION_CAP,
            check_common_interlacing: true,
        }
    }
}

pub fn greedy_interlacing_solve(inst: &RankOneInstance) -> Result<(SignAssignment, GreedyTrace)> {
    greedy_interlacing_solve_with(inst, GreedyOptions::default())
}

/// Walks the interlacing family, fixing each `ε_k` to the branch of smallest `λ_max`.
pub fn greedy_interlacing_solve_with(
    inst: &RankOneInstance,
    opts: GreedyOptions,
) -> Result<(SignAssignment, GreedyTrace)> {
    let mats = inst.outers();
    let sums = LeafSum::new(inst, opts.cap, &mats)?;
    let root_lambda = sums.prefix_sum(&[]).lambda_max(opts.root_tol)?;
    let mut prefix: Vec<usize> = Vec::with_capacity(inst.n());
    let mut parent = root_lambda;
    let mut levels = Vec::with_capacity(inst.n());
    for (k, rv) in inst.rvs().iter().enumerate() {
        let children: Vec<Poly> = (0..rv.len())
            .map(|t| {
                prefix.push(t);
                let p = sums.prefix_sum(&prefix);
                prefix.pop();
                p
            })
            .collect();
        let lambdas = children
            .iter()
            .map(|p| p.lambda_max(opts.root_tol))
            .collect::<Result<Vec<_>>>()?;
        let chosen = lambdas
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
            .expect("support is nonempty");
        let common = !opts.check_common_interlacing
            || children.len() < 2
            || has_common_interlacing(&children, COMMON_INTERLACING_SAMPLES, opts.root_tol);
        let chosen_lambda = lambdas[chosen];
        levels.push(GreedyLevel {
            level: k + 1,
            parent_lambda: parent,
            chosen,
            chosen_value: rv.support()[chosen],
            chosen_lambda,
            violation: chosen_lambda > parent + MONOTONE_TOL * (1.0 + parent.abs()),
            branch_lambdas: lambdas,
            common_interlacing: common,
        });
        parent = chosen_lambda;
        prefix.push(chosen);
    }
    let value = spectral_norm(&sums.dev.matrix(&prefix));
    let assignment = SignAssignment::new(prefix, inst.rvs())?;
    Ok((
        assignment,
        GreedyTrace {
            root_lambda,
            levels,
            leaf_lambda: parent,
            value,
        },
    ))
}

/// Named upper bounds on the spectral discrepancy of a rank-one instance.
///
/// `mss` appears only for Rademacher signs on an isotropic family (`Σ u u* = I`),
/// `tight_frame` only for Rademacher signs on a tight frame.
pub fn bound_menu(inst: &RankOneInstance) -> BTreeMap<String, f64> {
    let s = sigma(inst);
    let mut out = BTreeMap::new();
    out.insert("three_sigma".to_string(), 3.0 * s);
    out.insert("four_sigma".to_string(), 4.0 * s);
    if inst.all_rademacher() {
        let frame = inst.frame_operator();
        let d = inst.dim();
        let c = frame.trace() / d as f64;
        let tight_err = (frame.as_matrix() - DMatrix::<C64>::identity(d, d) * C64::from(c)).norm();
        if tight_err <= 1e-8 * (1.0 + c.abs()) {
            let ratio = inst.n() as f64 / d as f64;
            out.insert("tight_frame".to_string(), ratio.sqrt() * s);
        }
        let iso_err = (frame.as_matrix() - DMatrix::<C64>::identity(d, d)).norm();
        if iso_err <= 1e-8 {
            let delta = inst
                .vectors()
                .iter()
                .map(ComplexVector::norm_sqr)
                .fold(0.0, f64::max);
            out.insert("mss".to_string(), 2.0 * ((2.0 * delta).sqrt() + delta));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct LyapunovResult {
    pub subset: Vec<usize>,
    pub epsilon: f64,
    pub error: f64,
    pub bound: f64,
}

impl LyapunovResult {
    pub fn within_bound(&self) -> bool {
        self.error <= self.bound + 1e-9
    }
}

/// Rounds fractional weights `t` to a subset `S` with `‖Σ_S u u* − Σ t u u*‖ ≤ (3/2)√ε`.
pub fn lyapunov_round(vectors: &[ComplexVector], t: &[f64]) -> Result<LyapunovResult> {
    if vectors.is_empty() {
        return Err(Error::PreconditionViolated(
            "need at least one vector".into(),
        ));
    }
    if vectors.len() != t.len() {
        return Err(Error::PreconditionViolated(format!(
            "{} weights for {} vectors",
            t.len(),
            vectors.len()
        )));
    }
    if let Some(i) = t.iter().position(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::PreconditionViolated(format!(
            "t[{i}] = {} outside [0,1]",
            t[i]
        )));
    }
    let dim = vectors[0].dim();
    let rvs = t
        .iter()
        .map(|&x| DiscreteRandomVariable::bernoulli(x))
        .collect::<Result<Vec<_>>>()?;
    let inst = RankOneInstance::new(dim, vectors.to_vec(), rvs)?;
    let frame_norm = spectral_norm(&inst.frame_operator());
    if frame_norm > 1.0 + 1e-9 {
        return Err(Error::PreconditionViolated(format!(
            "‖Σ u u*‖ = {frame_norm} exceeds 1"
        )));
    }
    let epsilon = vectors
        .iter()
        .map(ComplexVector::norm_sqr)
        .fold(0.0, f64::max);
    let opts = GreedyOptions {
        check_common_interlacing: false,
        ..GreedyOptions::default()
    };
    let (assignment, trace) = greedy_interlacing_solve_with(&inst, opts)?;
    let subset = assignment
        .values(inst.rvs())
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == 1.0)
        .map(|(i, _)| i)
        .collect();
    Ok(LyapunovResult {
        subset,
        epsilon,
        error: trace.value,
        bound: 1.5 * epsilon.sqrt(),
    })
}

/// Result of any registered solver.
#[derive(Clone, Debug, Serialize)]
pub struct SolveOutcome {
    pub solver: String,
    pub value: f64,
    pub argmin: SignAssignment,
    pub assignment: Vec<f64>,
    pub sigma: f64,
    pub bound_checks: BTreeMap<String, BoundCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<GreedyTrace>,
}

pub trait DiscSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, inst: &Instance, norm: NormKind) -> Result<SolveOutcome>;
}

pub struct BruteForce {
    pub cap: u128,
}

impl DiscSolver for BruteForce {
    fn name(&self) -> &'static str {
        "bruteforce"
    }

    fn solve(&self, inst: &Instance, norm: NormKind) -> Result<SolveOutcome> {
        let r = disc_bruteforce_capped(inst, norm, self.cap)?;
        Ok(SolveOutcome {
            solver: self.name().into(),
            value: r.value,
            argmin: r.argmin,
            assignment: r.assignment,
            sigma: r.sigma,
            bound_checks: r.bound_checks,
            trace: None,
        })
    }
}

pub struct Greedy {
    pub opts: GreedyOptions,
}

impl DiscSolver for Greedy {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn solve(&self, inst: &Instance, norm: NormKind) -> Result<SolveOutcome> {
        let Instance::RankOne(r) = inst else {
            return Err(Error::Unsupported(
                "the greedy solver needs a rank-one instance".into(),
            ));
        };
        if norm != NormKind::Spectral {
            return Err(Error::Unsupported(
                "the greedy solver targets the spectral norm".into(),
            ));
        }
        let (argmin, trace) = greedy_interlacing_solve_with(r, self.opts)?;
        let bound_checks = bound_menu(r)
            .into_iter()
            .map(|(k, b)| {
                let satisfied = trace.value <= b + MONOTONE_TOL * (1.0 + b);
                (
                    k,
                    BoundCheck {
                        bound: b,
                        satisfied,
                    },
                )
            })
            .collect();
        Ok(SolveOutcome {
            solver: self.name().into(),
            value: trace.value,
            assignment: argmin.values(r.rvs()),
            argmin,
            sigma: sigma(r),
            bound_checks,
            trace: Some(trace),
        })
    }
}

/// Solvers selectable by name.
pub fn solvers(cap: u128, root_tol: f64) -> Vec<Arc<dyn DiscSolver>> {
    vec![
        Arc::new(BruteForce { cap }),
        Arc::new(Greedy {
            opts: GreedyOptions {
                root_tol,
                cap,
                check_common_interlacing: true,
            },
        }),
    ]
}

pub fn solver_by_name(name: &str, cap: u128, root_tol: f64) -> Result<Arc<dyn DiscSolver>> {
    let all = solvers(cap, root_tol);
    let available = all.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ");
    all.into_iter()
        .find(|s| s.name() == name)
        .ok_or(Error::UnknownName {
            kind: "solver",
            name: name.to_string(),
            available,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn r(v: &[f64]) -> ComplexVector {
        ComplexVector::from_real(v)
    }

    #[test]
    fn bruteforce_examples() {
        let one: Instance = RankOneInstance::rademacher(2, vec![r(&[1.0, 0.0])])
            .unwrap()
            .into();
        assert_eq!(
            disc_bruteforce(&one, NormKind::Spectral).unwrap().value,
            1.0
        );
        let diag: Instance = RankOneInstance::rademacher(2, vec![r(&[1.0, 0.0]), r(&[0.0, 1.0])])
            .unwrap()
            .into();
        let rep = disc_bruteforce(&diag, NormKind::Spectral).unwrap();
        assert_eq!(rep.value, 1.0);
        assert_eq!(rep.argmin.indices(), &[0, 0]);
    }

    #[test]
    fn enumeration_cap() {
        let inst: Instance = RankOneInstance::rademacher(1, vec![r(&[1.0]); 5])
            .unwrap()
            .into();
        let err = disc_bruteforce_capped(&inst, NormKind::Spectral, 16).unwrap_err();
        assert!(matches!(
            err,
            Error::EnumerationTooLarge {
                required: 32,
                cap: 16
            }
        ));
    }

    #[test]
    fn expected_charpoly_small() {
        let inst = RankOneInstance::rademacher(1, vec![r(&[1.0])]).unwrap();
        assert_eq!(
            expected_charpoly(&inst, &[]).unwrap().coeffs(),
            &[-1.0, 0.0, 1.0]
        );
        let op = expected_charpoly_operator(&inst).unwrap();
        for (a, b) in op.coeffs().iter().zip([-1.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let consts = RankOneInstance::new(
            2,
            vec![r(&[1.0, 2.0])],
            vec![DiscreteRandomVariable::constant(0.5)],
        )
        .unwrap();
        assert_eq!(
            expected_charpoly(&consts, &[]).unwrap().coeffs(),
            &[0.0, 0.0, 0.0, 0.0, 1.0]
        );
        let op = expected_charpoly_operator(&consts).unwrap();
        for (a, b) in op.coeffs().iter().zip([0.0, 0.0, 0.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn bound_menu_examples() {
        let inst = RankOneInstance::rademacher(2, vec![r(&[1.0, 0.0])]).unwrap();
        let m = bound_menu(&inst);
        assert_eq!(m["three_sigma"], 3.0);
        assert_eq!(m["four_sigma"], 4.0);
        let h = 0.5;
        let parseval = RankOneInstance::rademacher(
            2,
            vec![
                r(&[h, 0.0]),
                r(&[h, 0.0]),
                r(&[h, 0.0]),
                r(&[h, 0.0]),
                r(&[0.0, h]),
                r(&[0.0, h]),
                r(&[0.0, h]),
                r(&[0.0, h]),
            ],
        )
        .unwrap();
        assert_abs_diff_eq!(
            bound_menu(&parseval)["mss"],
            2.0 * (0.5f64.sqrt() + 0.25),
            epsilon = 1e-12
        );
    }

    #[test]
    fn greedy_trivial() {
        let inst = RankOneInstance::rademacher(1, vec![r(&[1.0])]).unwrap();
        let (_, trace) = greedy_interlacing_solve(&inst).unwrap();
        assert_abs_diff_eq!(trace.value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(trace.root_lambda, 1.0, epsilon = 1e-12);
        assert!(trace.monotone());
    }

    #[test]
    fn lyapunov_extremes() {
        let v = vec![r(&[0.5, 0.0]), r(&[0.0, 0.5]), r(&[0.5, 0.5])];
        let zero = lyapunov_round(&v, &[0.0; 3]).unwrap();
        assert!(zero.subset.is_empty());
        assert_eq!(zero.error, 0.0);
        let all = lyapunov_round(&v, &[1.0; 3]).unwrap();
        assert_eq!(all.subset, vec![0, 1, 2]);
        assert_eq!(all.error, 0.0);
        let big = vec![r(&[2.0, 0.0])];
        assert!(matches!(
            lyapunov_round(&big, &[0.5]),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(
            solver_by_name("greedy", DEFAULT_ENUMERATION_CAP, 1e-7)
                .unwrap()
                .name(),
            "greedy"
        );
        assert!(matches!(
            solver_by_name("annealing", DEFAULT_ENUMERATION_CAP, 1e-7),
            Err(Error::UnknownName { .. })
        ));
    }
}
