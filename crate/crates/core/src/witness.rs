//! Numerical replay of the barrier argument: the multivariate polynomials
//! `Q_k`, barrier functions, the barrier walk, mixed discriminants and the
//! quadratic-barrier checks.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::Serialize;

use crate::disc::{expected_charpoly, THREE_POINT};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_pd, det, det_real, spectral_norm, C64};
use crate::model::RankOneInstance;
use crate::rpoly::{Interpolant, Poly, DEFAULT_ROOT_TOL};

/// Ray parameters used to probe positivity: `0` and `2^-6 … 2^8`.
pub fn ray_grid() -> [f64; 16] {
    let mut t = [0.0; 16];
    for (i, slot) in t.iter_mut().enumerate().skip(1) {
        *slot = 2f64.powi(i as i32 - 7);
    }
    t
}

/// Half-width of the window used to interpolate a polynomial restricted to a ray.
const RAY_FIT_RADIUS: f64 = 8.0;
const RAY_TRIM_RTOL: f64 = 1e-10;

/// `Q(x, z) = det[xI + Σ z_i τ_i v_i v_i*]²` and its images `Q_k` under
/// `Π_{i≤k}(1 − ½∂²_{z_i})`.
#[derive(Clone, Debug)]
pub struct QEvaluator {
    dim: usize,
    taus: Vec<f64>,
    /// Columns `v_i`.
    vs: DMatrix<C64>,
    /// `τ_i v_i v_i*`.
    scaled: Vec<DMatrix<C64>>,
}

impl QEvaluator {
    /// Builds the evaluator, requiring `Σ τ_i² (v_i v_i*)² ⪯ I` within `1e-9`.
    pub fn new(inst: &RankOneInstance) -> Result<Self> {
        let qe = Self::unchecked(inst);
        let norm = spectral_norm(&inst.variance_matrix());
        if norm > 1.0 + 1e-9 {
            return Err(Error::PreconditionViolated(format!(
                "‖Σ τ² (v v*)²‖ = {norm} exceeds 1"
            )));
        }
        Ok(qe)
    }

    /// Builds the evaluator without checking the normalization.
    pub fn unchecked(inst: &RankOneInstance) -> Self {
        let d = inst.dim();
        let n = inst.n();
        let taus: Vec<f64> = inst.rvs().iter().map(|rv| rv.std_dev()).collect();
        let vs = DMatrix::from_fn(d, n, |r, c| inst.vectors()[c].0[r]);
        let scaled = inst
            .vectors()
            .iter()
            .zip(&taus)
            .map(|(v, t)| v.outer().as_matrix() * C64::from(*t))
            .collect();
        Self {
            dim: d,
            taus,
            vs,
            scaled,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.taus.len()
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    /// `δ_i = τ_i ‖v_i‖²`.
    pub fn deltas(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| self.taus[i] * self.vs.column(i).norm_squared())
            .collect()
    }

    fn pencil(&self, x: f64, z: &[f64]) -> DMatrix<C64> {
        let mut m = DMatrix::<C64>::identity(self.dim, self.dim) * C64::from(x);
        for (s, &zi) in self.scaled.iter().zip(z) {
            if zi != 0.0 {
                m += s * C64::from(zi);
            }
        }
        m
    }

    /// `det[xI + Σ z_i τ_i v_i v_i*]`.
    pub fn f(&self, x: f64, z: &[f64]) -> f64 {
        det(&self.pencil(x, z)).re
    }

    /// `Q_k(x, z)` by nested three-point extraction over `z_1 … z_k`.
    pub fn q_eval(&self, k: usize, x: f64, z: &[f64]) -> f64 {
        assert!(k <= self.n(), "k = {k} exceeds n = {}", self.n());
        assert_eq!(z.len(), self.n());
        let active: Vec<usize> = (0..k).filter(|&i| self.taus[i] != 0.0).collect();
        let mut point = z.to_vec();
        let total = 3usize.pow(active.len() as u32);
        let mut acc = 0.0;
        for g in 0..total {
            let mut rest = g;
            let mut w = 1.0;
            for &i in &active {
                let (dz, wz) = THREE_POINT[rest % 3];
                rest /= 3;
                w *= wz;
                point[i] = z[i] + dz;
            }
            let f = self.f(x, &point);
            acc += w * f * f;
        }
        acc
    }

    /// `Q_k` through the principal-minor expansion
    /// `det(N)² Σ_{S ⊆ [k], |S| ≤ d} (−1)^{|S|} τ_S² det(G_SS)²` with `G = V* N⁻¹ V`,
    /// valid where `N = xI + Σ z_i τ_i v_i v_i*` is positive definite.
    fn q_minor(&self, k: usize, chol: &Cholesky<C64, nalgebra::Dyn>, det_n: f64) -> f64 {
        let active: Vec<usize> = (0..k).filter(|&i| self.taus[i] != 0.0).collect();
        if active.is_empty() {
            return det_n * det_n;
        }
        let cols = DMatrix::from_fn(self.dim, active.len(), |r, c| self.vs[(r, active[c])]);
        let g = cols.adjoint() * chol.solve(&cols);
        let m = active.len();
        let mut acc = 1.0;
        let mut subset = Vec::with_capacity(self.dim);
        // depth-first enumeration of subsets of size 1..=d
        fn walk(
            start: usize,
            m: usize,
            d: usize,
            subset: &mut Vec<usize>,
            g: &DMatrix<C64>,
            w: &[f64],
            acc: &mut f64,
        ) {
            for i in start..m {
                subset.push(i);
                let s = subset.len();
                let minor = DMatrix::from_fn(s, s, |r, c| g[(subset[r], subset[c])]);
                let dm = det(&minor).re;
                let weight: f64 = subset.iter().map(|&j| w[j]).product();
                let sign = if s % 2 == 1 { -1.0 } else { 1.0 };
                *acc += sign * weight * dm * dm;
                if s < d {
                    walk(i + 1, m, d, subset, g, w, acc);
                }
                subset.pop();
            }
        }
        let w: Vec<f64> = active
            .iter()
            .map(|&i| self.taus[i] * self.taus[i])
            .collect();
        walk(0, m, self.dim, &mut subset, &g, &w, &mut acc);
        det_n * det_n * acc
    }

    /// `Q_k(x, z)`, using the minor expansion when the pencil is positive definite.
    pub fn q_value(&self, k: usize, x: f64, z: &[f64]) -> f64 {
        let n = self.pencil(x, z);
        match cholesky_pd(n) {
            Some(chol) => {
                let dn: f64 = chol.l_dirty().diagonal().iter().map(|c| c.re).product();
                self.q_minor(k, &chol, dn * dn)
            }
            None => self.q_eval(k, x, z),
        }
    }

    /// Whether the pencil at `(x, z)` is positive definite, i.e. the point lies
    /// above the roots of `Q = Q_0`.
    pub fn pencil_is_pd(&self, x: f64, z: &[f64]) -> bool {
        cholesky_pd(self.pencil(x, z)).is_some()
    }

    /// `Φ^i_Q(x, z) = 2 Tr[N⁻¹ τ_i v_i v_i*]`.
    pub fn jacobi_barrier(&self, i: usize, x: f64, z: &[f64]) -> Option<f64> {
        let chol = cholesky_pd(self.pencil(x, z))?;
        let v: DVector<C64> = self.vs.column(i).into_owned();
        let y = chol.solve(&v);
        Some(2.0 * self.taus[i] * v.dotc(&y).re)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierMode {
    Analytic,
    FiniteDifference,
}

/// Step used by the analytic mode; any step is exact for a quadratic.
const QUADRATIC_STEP: f64 = 0.125;

/// `∂_{z_i} Q_k / Q_k` at a point assumed above the roots.
pub fn barrier_unchecked(
    qe: &QEvaluator,
    k: usize,
    x: f64,
    z: &[f64],
    i: usize,
    mode: BarrierMode,
) -> f64 {
    let at = |zi: f64| {
        let mut p = z.to_vec();
        p[i] = zi;
        qe.q_value(k, x, &p)
    };
    let q0 = qe.q_value(k, x, z);
    match mode {
        BarrierMode::Analytic => {
            if k == 0 {
                if let Some(v) = qe.jacobi_barrier(i, x, z) {
                    return v;
                }
            }
            let h = QUADRATIC_STEP;
            (at(z[i] + h) - at(z[i] - h)) / (2.0 * h) / q0
        }
        BarrierMode::FiniteDifference => {
            let h = 1e-5 * (1.0 + z[i].abs());
            let central = |h: f64| (at(z[i] + h) - at(z[i] - h)) / (2.0 * h);
            let d1 = central(h);
            let d2 = central(h / 2.0);
            (4.0 * d2 - d1) / 3.0 / q0
        }
    }
}

/// Barrier function in direction `z_i` after certifying the point is above the roots.
pub fn barrier(
    qe: &QEvaluator,
    k: usize,
    x: f64,
    z: &[f64],
    i: usize,
    mode: BarrierMode,
) -> Result<f64> {
    certify_above_roots(qe, k, x, z)?;
    Ok(barrier_unchecked(qe, k, x, z, i, mode))
}

/// `∂²_{z_i} Q_k / Q_k`, exact by the three-point rule.
pub fn second_barrier(qe: &QEvaluator, k: usize, x: f64, z: &[f64], i: usize) -> f64 {
    let h = QUADRATIC_STEP;
    let at = |zi: f64| {
        let mut p = z.to_vec();
        p[i] = zi;
        qe.q_value(k, x, &p)
    };
    let q0 = at(z[i]);
    (at(z[i] + h) - 2.0 * q0 + at(z[i] - h)) / (h * h) / q0
}

/// Certifies `(x, z)` lies above the roots of `Q_k`.
///
/// For `k = 0` the pencil must be positive definite. Otherwise `Q_k` must be
/// positive along the 16-point ray grid in every coordinate direction and the
/// all-ones direction, and the polynomial restricted to each ray must have no
/// real root at a nonnegative parameter.
pub fn certify_above_roots(qe: &QEvaluator, k: usize, x: f64, z: &[f64]) -> Result<()> {
    if k == 0 || qe.taus[..k].iter().all(|&t| t == 0.0) {
        return if qe.pencil_is_pd(x, z) {
            Ok(())
        } else {
            Err(Error::NotAboveRoots(format!(
                "pencil at x = {x} is not positive definite"
            )))
        };
    }
    let n = qe.n();
    let mut dirs: Vec<(String, Vec<f64>)> = Vec::with_capacity(n + 2);
    let mut ex = vec![0.0; n + 1];
    ex[0] = 1.0;
    dirs.push(("x".into(), ex));
    for i in 0..n {
        if qe.taus[i] == 0.0 {
            continue;
        }
        let mut e = vec![0.0; n + 1];
        e[i + 1] = 1.0;
        dirs.push((format!("z{}", i + 1), e));
    }
    dirs.push(("all-ones".into(), vec![1.0; n + 1]));
    let degree = 2 * qe.dim();
    let mut point = z.to_vec();
    for (name, dir) in &dirs {
        let mut eval = |t: f64| {
            for (j, p) in point.iter_mut().enumerate() {
                *p = z[j] + t * dir[j + 1];
            }
            qe.q_value(k, x + t * dir[0], &point)
        };
        for t in ray_grid() {
            let v = eval(t);
            if v.is_nan() || v <= 0.0 {
                return Err(Error::NotAboveRoots(format!(
                    "Q_{k} = {v:e} at parameter {t} along direction {name}"
                )));
            }
        }
        // nodes on [0, 2r] stay in the positive-definite region, where Q_k is cheap
        let fit = Interpolant::fit(degree, RAY_FIT_RADIUS, RAY_FIT_RADIUS, eval);
        // the true degree along a ray is often below 2d; drop interpolation noise
        // in the top coefficients so it does not turn into spurious far roots
        let scale = fit.local.max_abs_coeff();
        let mut c = fit.local.coeffs().to_vec();
        while c.len() > 1 && c.last().is_some_and(|v| v.abs() <= RAY_TRIM_RTOL * scale) {
            c.pop();
        }
        let local = Poly::new(c);
        if local.degree() == 0 {
            continue;
        }
        let roots = local.roots()?;
        let scale = 1.0 + roots.iter().fold(0.0f64, |acc, r| acc.max(r.norm()));
        if let Some(r) = roots.iter().find(|r| {
            r.im.abs() <= DEFAULT_ROOT_TOL * scale && fit.center + fit.radius * r.re >= 0.0
        }) {
            return Err(Error::NotAboveRoots(format!(
                "restriction along direction {name} has a root at parameter {:e}",
                fit.center + fit.radius * r.re
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct BarrierValue {
    pub coordinate: usize,
    pub value: f64,
    /// Value at the previous step (or `δ_i` for the initial check).
    pub limit: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WalkStep {
    /// Number of operators applied, so the step certifies `Q_k` at `(3, w_k)`.
    pub k: usize,
    pub shift: Vec<f64>,
    pub above_roots: bool,
    pub barriers: Vec<BarrierValue>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BarrierWalkTrace {
    pub deltas: Vec<f64>,
    /// `‖Σ τ_i² (v_i v_i*)²‖`; the walk is guaranteed only when this is at most 1.
    pub normalization: f64,
    pub steps: Vec<WalkStep>,
    pub lambda_max: Option<f64>,
    pub passed: bool,
    pub failure: Option<String>,
    pub failed_step: Option<usize>,
}

/// Slack for the initial barrier bound and the final root bound.
pub const WALK_INITIAL_TOL: f64 = 1e-9;
/// Slack for barrier monotonicity between consecutive steps.
pub const WALK_STEP_TOL: f64 = 1e-8;
/// The root bound the walk certifies.
pub const WALK_TARGET: f64 = 3.0;

/// Replays the walk and returns the first failure as an error.
pub fn replay_barrier_walk(inst: &RankOneInstance) -> Result<BarrierWalkTrace> {
    let trace = replay_barrier_walk_traced(inst)?;
    match (&trace.failed_step, &trace.failure) {
        (Some(step), Some(reason)) => Err(Error::WalkStepFailed {
            step: *step,
            reason: reason.clone(),
        }),
        _ => Ok(trace),
    }
}

/// Replays the walk from `(3, w_0)` to `(3, 0)`, recording every check.
///
/// Coordinates with `δ_i = 0` carry no variable and are skipped.
pub fn replay_barrier_walk_traced(inst: &RankOneInstance) -> Result<BarrierWalkTrace> {
    let qe = QEvaluator::unchecked(inst);
    let n = qe.n();
    let deltas = qe.deltas();
    let normalization = spectral_norm(&inst.variance_matrix());
    let x = WALK_TARGET;
    let shift = |k: usize| -> Vec<f64> {
        (0..n)
            .map(|i| if i < k { 0.0 } else { -deltas[i] })
            .collect()
    };
    let mut trace = BarrierWalkTrace {
        deltas: deltas.clone(),
        normalization,
        steps: Vec::with_capacity(n + 1),
        lambda_max: None,
        passed: false,
        failure: None,
        failed_step: None,
    };
    let fail = |trace: &mut BarrierWalkTrace, step: usize, reason: String| {
        trace.failed_step = Some(step);
        trace.failure = Some(reason);
    };

    let w0 = shift(0);
    let above = certify_above_roots(&qe, 0, x, &w0).is_ok();
    let mut prev: Vec<f64> = vec![f64::NAN; n];
    let mut step0 = WalkStep {
        k: 0,
        shift: w0.clone(),
        above_roots: above,
        barriers: Vec::new(),
    };
    if !above {
        trace.steps.push(step0);
        fail(
            &mut trace,
            0,
            "initial point (3, w_0) is not above the roots of Q".into(),
        );
        return Ok(trace);
    }
    for i in (0..n).filter(|&i| deltas[i] > 0.0) {
        let v = barrier_unchecked(&qe, 0, x, &w0, i, BarrierMode::Analytic);
        let ok = v <= deltas[i] + WALK_INITIAL_TOL;
        step0.barriers.push(BarrierValue {
            coordinate: i + 1,
            value: v,
            limit: deltas[i],
            ok,
        });
        prev[i] = v;
    }
    let bad = step0.barriers.iter().find(|b| !b.ok).cloned();
    trace.steps.push(step0);
    if let Some(b) = bad {
        fail(
            &mut trace,
            0,
            format!(
                "initial barrier Φ^{} = {} exceeds δ = {}",
                b.coordinate, b.value, b.limit
            ),
        );
        return Ok(trace);
    }

    for k in 0..n {
        let kk = k + 1;
        let w = shift(kk);
        if deltas[k] == 0.0 {
            // nothing moves: Q_{k+1} = Q_k and w_{k+1} = w_k
            trace.steps.push(WalkStep {
                k: kk,
                shift: w,
                above_roots: true,
                barriers: Vec::new(),
            });
            continue;
        }
        let above = match certify_above_roots(&qe, kk, x, &w) {
            Ok(()) => true,
            Err(Error::NotAboveRoots(reason)) => {
                trace.steps.push(WalkStep {
                    k: kk,
                    shift: w,
                    above_roots: false,
                    barriers: Vec::new(),
                });
                fail(
                    &mut trace,
                    kk,
                    format!("(3, w_{kk}) is not above the roots of Q_{kk}: {reason}"),
                );
                return Ok(trace);
            }
            Err(e) => return Err(e),
        };
        let mut step = WalkStep {
            k: kk,
            shift: w.clone(),
            above_roots: above,
            barriers: Vec::new(),
        };
        for j in (kk..n).filter(|&j| deltas[j] > 0.0) {
            let v = barrier_unchecked(&qe, kk, x, &w, j, BarrierMode::Analytic);
            let ok = v <= prev[j] + WALK_STEP_TOL;
            step.barriers.push(BarrierValue {
                coordinate: j + 1,
                value: v,
                limit: prev[j],
                ok,
            });
            prev[j] = v;
        }
        let bad = step.barriers.iter().find(|b| !b.ok).cloned();
        trace.steps.push(step);
        if let Some(b) = bad {
            fail(
                &mut trace,
                kk,
                format!(
                    "barrier Φ^{} grew from {} to {}",
                    b.coordinate, b.limit, b.value
                ),
            );
            return Ok(trace);
        }
    }

    let p = expected_charpoly(inst, &[])?;
    let lm = p.lambda_max(DEFAULT_ROOT_TOL)?;
    trace.lambda_max = Some(lm);
    if lm > WALK_TARGET + WALK_INITIAL_TOL {
        fail(&mut trace, n, format!("λ_max(p_∅) = {lm} exceeds 3"));
        return Ok(trace);
    }
    trace.passed = true;
    Ok(trace)
}

/// `Q_n(x, 0)` interpolated in `x`, which equals `p_∅`.
pub fn q_restricted_to_x(qe: &QEvaluator, k: usize, radius: f64) -> Poly {
    let zero = vec![0.0; qe.n()];
    Interpolant::fit(2 * qe.dim(), 0.0, radius, |x| qe.q_eval(k, x, &zero))
        .to_global()
        .trimmed()
}

// --- mixed discriminants ---------------------------------------------------

fn check_square(xs: &[DMatrix<f64>], d: usize) -> Result<()> {
    if let Some(i) = xs.iter().position(|x| x.nrows() != d || x.ncols() != d) {
        return Err(Error::DimensionMismatch(format!(
            "matrix {i} is {}x{}, expected {d}x{d}",
            xs[i].nrows(),
            xs[i].ncols()
        )));
    }
    Ok(())
}

/// `D(X_1, …, X_d) = Σ_{S ⊆ [d]} (−1)^{d−|S|} det(Σ_{i∈S} X_i)`.
pub fn mixed_discriminant(xs: &[DMatrix<f64>]) -> Result<f64> {
    let d = xs.len();
    if d == 0 {
        return Err(Error::DimensionMismatch("need at least one matrix".into()));
    }
    check_square(xs, d)?;
    let mut acc = 0.0;
    for mask in 0u32..(1 << d) {
        let mut s = DMatrix::<f64>::zeros(d, d);
        for (i, x) in xs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s += x;
            }
        }
        let sign = if (d - mask.count_ones() as usize).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        acc += sign * det_real(&s);
    }
    Ok(acc)
}

/// `D` by the column-substitution expansion over all permutations.
pub fn mixed_discriminant_permutation(xs: &[DMatrix<f64>]) -> Result<f64> {
    let d = xs.len();
    if d == 0 {
        return Err(Error::DimensionMismatch("need at least one matrix".into()));
    }
    check_square(xs, d)?;
    let mut perm: Vec<usize> = (0..d).collect();
    let mut acc = 0.0;
    loop {
        let m = DMatrix::from_fn(d, d, |r, c| xs[perm[c]][(r, c)]);
        acc += det_real(&m);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(acc)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `D̃(X_1, …, X_k) = D(X_1, …, X_k, I, …, I) / (d − k)!`.
pub fn d_tilde(xs: &[DMatrix<f64>], d: usize) -> Result<f64> {
    if xs.len() > d {
        return Err(Error::DimensionMismatch(format!(
            "{} matrices exceed d = {d}",
            xs.len()
        )));
    }
    check_square(xs, d)?;
    let mut all = xs.to_vec();
    all.resize(d, DMatrix::identity(d, d));
    Ok(mixed_discriminant(&all)? / factorial(d - xs.len()))
}

fn ensure_psd(x: &DMatrix<f64>) -> Result<()> {
    let sym = (x + x.transpose()) * 0.5;
    let min = sym
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min < -1e-10 * (1.0 + x.amax()) {
        return Err(Error::NotPsd(min));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `D̃(X_1) D̃(X_2) ≥ D̃(X_1, X_2)` for PSD `X_1, X_2`.
pub fn check_alexandrov(x1: &DMatrix<f64>, x2: &DMatrix<f64>, d: usize) -> Result<InequalityCheck> {
    if d < 2 {
        return Err(Error::DimensionMismatch("need d >= 2".into()));
    }
    check_square(&[x1.clone(), x2.clone()], d)?;
    ensure_psd(x1)?;
    ensure_psd(x2)?;
    let lhs = d_tilde(std::slice::from_ref(x1), d)? * d_tilde(std::slice::from_ref(x2), d)?;
    let rhs = d_tilde(&[x1.clone(), x2.clone()], d)?;
    let scale = 1.0 + lhs.abs() + rhs.abs();
    Ok(InequalityCheck {
        lhs,
        rhs,
        pass: lhs >= rhs - 1e-9 * scale,
    })
}

/// `f(x) = x − 2/Φ_s(x)` is nonincreasing across the probes, for a real-rooted quadratic `s`.
pub fn check_quadratic_barrier(s: &Poly, probes: &[f64]) -> Result<bool> {
    if s.degree() != 2 || s.leading() <= 0.0 {
        return Err(Error::PreconditionViolated(
            "need a quadratic with positive leading coefficient".into(),
        ));
    }
    let top = s.lambda_max(DEFAULT_ROOT_TOL)?;
    let mut xs = probes.to_vec();
    xs.sort_by(f64::total_cmp);
    if let Some(&x) = xs.iter().find(|&&x| x <= top) {
        return Err(Error::NotAboveRoots(format!(
            "probe {x} is not above λ_max = {top}"
        )));
    }
    let ds = s.derivative();
    let f: Vec<f64> = xs
        .iter()
        .map(|&x| x - 2.0 * s.eval(x) / ds.eval(x))
        .collect();
    Ok(f.windows(2).all(|w| w[1] <= w[0] + 1e-9))
}

/// `p(x, y) = det[xA + yB + C]`, optionally squared, quadratic in `x`.
#[derive(Clone, Debug)]
pub struct DeterminantalBivariate {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub squared: bool,
}

impl DeterminantalBivariate {
    /// Requires `A, B` PSD, `C` symmetric, and `rank A ≤ 1` (squared) or `≤ 2` (plain).
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, squared: bool) -> Result<Self> {
        let d = a.nrows();
        check_square(&[a.clone(), b.clone(), c.clone()], d)?;
        ensure_psd(&a)?;
        ensure_psd(&b)?;
        if (&c - c.transpose()).amax() > 1e-12 * (1.0 + c.amax()) {
            return Err(Error::PreconditionViolated("C must be symmetric".into()));
        }
        let rank = a
            .symmetric_eigenvalues()
            .iter()
            .filter(|&&e| e > 1e-10 * (1.0 + a.amax()))
            .count();
        let max_rank = if squared { 1 } else { 2 };
        if rank > max_rank {
            return Err(Error::PreconditionViolated(format!(
                "rank A = {rank}; need at most {max_rank} for a quadratic in x"
            )));
        }
        Ok(Self { a, b, c, squared })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let v = det_real(&(&self.a * x + &self.b * y + &self.c));
        if self.squared {
            v * v
        } else {
            v
        }
    }

    /// `(1 − ½∂²_x) p`, exact since `p` is quadratic in `x`.
    pub fn transformed(&self, x: f64, y: f64) -> f64 {
        let p0 = self.eval(x, y);
        let a2 = (self.eval(x + 1.0, y) + self.eval(x - 1.0, y) - 2.0 * p0) / 2.0;
        p0 - a2
    }

    fn pencil(&self, x: f64, y: f64) -> DMatrix<f64> {
        &self.a * x + &self.b * y + &self.c
    }

    /// Barrier `∂_x p / p` via `Tr[M⁻¹ A]` (doubled for the squared form).
    pub fn barrier_x(&self, x: f64, y: f64) -> Option<f64> {
        let chol = Cholesky::new(self.pencil(x, y))?;
        let t = (chol.solve(&self.a)).trace();
        Some(if self.squared { 2.0 * t } else { t })
    }

    pub fn barrier_y(&self, x: f64, y: f64) -> Option<f64> {
        let chol = Cholesky::new(self.pencil(x, y))?;
        let t = (chol.solve(&self.b)).trace();
        Some(if self.squared { 2.0 * t } else { t })
    }

    /// `Φ^y` of `(1 − ½∂²_x) p`, exact as `p` is quadratic in `x` and degree ≤ 2d in `y`.
    pub fn transformed_barrier_y(&self, x: f64, y: f64) -> f64 {
        let h = 1.0 + y.abs();
        let deg = if self.squared {
            2 * self.a.nrows()
        } else {
            self.a.nrows()
        };
        let fit = Interpolant::fit(deg, y, h, |t| self.transformed(x, t));
        fit.derivative_at_center(1) / fit.value_at_center()
    }

    /// `D̃(Â)` with `Â = M^{-1/2} A M^{-1/2}`, `M` the pencil at the point.
    pub fn d_tilde_a_hat(&self, x: f64, y: f64) -> Result<f64> {
        let m = self.pencil(x, y);
        let eig = m.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&e| e <= 0.0) {
            return Err(Error::NotAboveRoots(
                "pencil is not positive definite".into(),
            ));
        }
        let inv_sqrt = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|e| 1.0 / e.sqrt()))
            * eig.eigenvectors.transpose();
        let a_hat = &inv_sqrt * &self.a * &inv_sqrt;
        d_tilde(&[a_hat], m.nrows())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BivariateCheck {
    pub delta: f64,
    pub barrier_x: f64,
    pub before: f64,
    pub after: f64,
    pub pass: bool,
}

/// Checks `Φ^y_{(1−½∂²_x)p}(x_0+δ, y_0) ≤ Φ^y_p(x_0, y_0)` when `δ = 1` or `Φ^x_p(x_0, y_0) ≤ δ/(1 − δ²)`.
///
/// Returns `HypothesisNotMet` when `δ ∈ (0, 1)` and `Φ^x_p(x_0, y_0) > δ/(1 − δ²)`.
pub fn check_bivariate_quadratic_lemma(
    p: &DeterminantalBivariate,
    x0: f64,
    y0: f64,
    delta: f64,
) -> Result<BivariateCheck> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::HypothesisNotMet(format!(
            "δ = {delta} outside (0, 1]"
        )));
    }
    let bx = p
        .barrier_x(x0, y0)
        .ok_or_else(|| Error::NotAboveRoots(format!("({x0}, {y0}) is not above the roots of p")))?;
    if delta < 1.0 && bx > delta / (1.0 - delta * delta) {
        return Err(Error::HypothesisNotMet(format!(
            "Φ^x = {bx} exceeds δ/(1 − δ²) = {}",
            delta / (1.0 - delta * delta)
        )));
    }
    let before = p.barrier_y(x0, y0).expect("pencil checked above");
    let xs = x0 + delta;
    for t in ray_grid() {
        for (dx, dy) in [(t, 0.0), (0.0, t), (t, t)] {
            let v = p.transformed(xs + dx, y0 + dy);
            if v.is_nan() || v <= 0.0 {
                return Err(Error::NotAboveRoots(format!(
                    "(x_0+δ, y_0) is not above the roots of the transformed polynomial (value {v:e})"
                )));
            }
        }
    }
    let after = p.transformed_barrier_y(xs, y0);
    Ok(BivariateCheck {
        delta,
        barrier_x: bx,
        before,
        after,
        pass: after <= before + 1e-8,
    })
}
