//! Seeded verification suites. Every suite emits inequality rows
//! `(name, lhs, rhs, slack, pass)`; a row passes when `slack ≥ −tol`.
//!
//! Instances are drawn from per-index ChaCha streams and rows are collected in
//! index order, so reports are identical for any thread count.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::disc::{
    bound_menu, disc_bruteforce, expected_charpoly, expected_charpoly_operator,
    greedy_interlacing_solve_with, lyapunov_round, GreedyOptions, NormKind,
    DEFAULT_ENUMERATION_CAP, MONOTONE_TOL,
};
use crate::error::{Error, Result};
use crate::frames::{harmonic_untf, verify_lower_bound, verify_untf_disc, Frame};
use crate::gen::{
    random_hermitian_instance, random_psd, random_rank_one, random_symmetric, random_tight_frame,
    random_weights, stream_rng, GenSpec, RvFamily, Span,
};
use crate::linalg::SchattenOrder;
use crate::model::{normalize, sigma, HermitianInstance, RankOneInstance};
use crate::rpoly::{Poly, DEFAULT_ROOT_TOL};
use crate::schatten::{khintchine_bounds, DEFAULT_MC_SAMPLES};
use crate::witness::{
    barrier, barrier_unchecked, certify_above_roots, check_alexandrov,
    check_bivariate_quadratic_lemma, check_quadratic_barrier, d_tilde, mixed_discriminant,
    mixed_discriminant_permutation, replay_barrier_walk_traced, second_barrier, BarrierMode,
    DeterminantalBivariate, QEvaluator, WALK_INITIAL_TOL, WALK_STEP_TOL, WALK_TARGET,
};

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_NORM_TOL: f64 = 1e-9;
/// Real-rootedness tolerance for partial polynomials along the greedy path.
pub const PARTIAL_ROOT_TOL: f64 = 1e-6;

/// One checked inequality `lhs ≤ rhs` (or equality `lhs = rhs`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs` for inequalities, `−|lhs − rhs|` for equalities.
    pub slack: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRow {
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack,
            tol,
            pass: slack >= -tol,
            note: None,
        }
    }

    pub fn eq(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = -(lhs - rhs).abs();
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack,
            tol,
            pass: slack >= -tol,
            note: None,
        }
    }

    /// A boolean check, recorded as `0 ≤ 0` or `1 ≤ 0`.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::le(name, if ok { 0.0 } else { 1.0 }, 0.0, 0.0)
    }

    pub fn failed(name: impl Into<String>, note: impl Into<String>) -> Self {
        Self {
            note: Some(note.into()),
            ..Self::flag(name, false)
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    /// Cases excluded by a hypothesis filter.
    pub skipped: usize,
    pub pass: bool,
    pub rows: Vec<CheckRow>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl SuiteReport {
    fn new(
        suite: &str,
        seed: u64,
        rows: Vec<CheckRow>,
        skipped: usize,
        details: serde_json::Value,
    ) -> Self {
        let passed = rows.iter().filter(|r| r.pass).count();
        Self {
            suite: suite.to_string(),
            seed,
            total: rows.len(),
            passed,
            failed: rows.len() - passed,
            skipped,
            pass: passed == rows.len(),
            rows,
            details,
        }
    }

    /// Rows whose name contains `pattern`.
    pub fn rows_matching<'a>(
        &'a self,
        pattern: &'a str,
    ) -> impl Iterator<Item = &'a CheckRow> + 'a {
        self.rows.iter().filter(move |r| r.name.contains(pattern))
    }
}

/// Knobs shared by all suites. `None` selects the suite's own default.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub count: Option<usize>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub p: Option<f64>,
    pub gen: Option<GenSpec>,
    pub root_tol: f64,
    pub norm_tol: f64,
    pub mc_samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            count: None,
            n: None,
            d: None,
            p: None,
            gen: None,
            root_tol: DEFAULT_ROOT_TOL,
            norm_tol: DEFAULT_NORM_TOL,
            mc_samples: DEFAULT_MC_SAMPLES,
        }
    }
}

impl SuiteConfig {
    /// Sweep parameters: explicit spec, then `count`/`n`/`d` overrides.
    fn sweep(&self, default: &str) -> GenSpec {
        let mut spec = self
            .gen
            .clone()
            .unwrap_or_else(|| default.parse().expect("built-in generator specs are valid"));
        if let Some(c) = self.count {
            spec.count = c;
        }
        if let Some(n) = self.n {
            spec.n = Span::single(n);
        }
        if let Some(d) = self.d {
            spec.d = Span::single(d);
        }
        spec
    }
}

pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport>;
}

/// Stream index for item `i` of sub-sweep `part`, keeping parts independent.
fn stream(part: u64, i: usize) -> u64 {
    (part << 32) | i as u64
}

/// Runs `f` on every index in parallel and concatenates the rows in index order.
/// Errors become failing rows; `HypothesisNotMet` is counted as skipped.
fn sweep_rows<F>(count: usize, f: F) -> (Vec<CheckRow>, usize)
where
    F: Fn(usize) -> Result<Vec<CheckRow>> + Sync,
{
    let per: Vec<(Vec<CheckRow>, usize)> = (0..count)
        .into_par_iter()
        .map(|i| match f(i) {
            Ok(rows) => (rows, 0),
            Err(Error::HypothesisNotMet(_)) => (Vec::new(), 1),
            Err(e) => (vec![CheckRow::failed(format!("#{i}"), e.to_string())], 0),
        })
        .collect();
    let skipped = per.iter().map(|p| p.1).sum();
    (per.into_iter().flat_map(|p| p.0).collect(), skipped)
}

fn rank_one_at(spec: &GenSpec, seed: u64, part: u64, i: usize) -> RankOneInstance {
    let mut rng = stream_rng(seed, stream(part, i));
    let d = spec.d.sample(&mut rng);
    let n = spec.n.sample(&mut rng);
    random_rank_one(&mut rng, d, n, spec.rv)
}

fn greedy_opts(cfg: &SuiteConfig) -> GreedyOptions {
    GreedyOptions {
        root_tol: cfg.root_tol,
        cap: DEFAULT_ENUMERATION_CAP,
        check_common_interlacing: true,
    }
}

const RANK_ONE_SWEEP: &str = "d=2..5;n=2..8;rv=mixed;count=300";
const ORACLE_SWEEP: &str = "d=1..4;n=1..6;rv=mixed;count=100";

/// Exact discrepancy ≤ greedy value ≤ 3σ on a seeded rank-one sweep.
pub struct ThreeSigma;

impl Suite for ThreeSigma {
    fn name(&self) -> &'static str {
        "thm13"
    }
    fn description(&self) -> &'static str {
        "brute force <= greedy <= 3 sigma on seeded rank-one instances"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport> {
        let spec = cfg.sweep(RANK_ONE_SWEEP);
        let (rows, skipped) = sweep_rows(spec.count, |i| {
            let inst = rank_one_at(&spec, cfg.seed, 0, i);
            let exact = disc_bruteforce(&inst.clone().into(), NormKind::Spectral)?;
            let (_, trace) = greedy_interlacing_solve_with(&inst, greedy_opts(cfg))?;
            let s = sigma(&inst);
            Ok(vec![
                CheckRow::le(
                    format!("#{i} disc <= greedy"),
                    exact.value,
                    trace.value,
                    cfg.norm_tol,
                ),
                CheckRow::le(
                    format!("#{i} greedy <= 3 sigma"),
                    trace.value,
                    3.0 * s,
                    cfg.norm_tol,
                ),
                CheckRow::eq(
                    format!("#{i} greedy value = leaf lambda_max"),
                    trace.value,
                    trace.leaf_lambda,
                    cfg.norm_tol,
                ),
            ])
        });
        Ok(SuiteReport::new(
            self.name(),
            cfg.seed,
            rows,
            skipped,
            serde_json::Value::Null,
        ))
    }
}

/// Enumeration and operator routes to the expected characteristic polynomial agree.
pub struct OracleEquivalence;

impl Suite for OracleEquivalence {
    fn name(&self) -> &'static str {
        "oracle"
    }
    fn description(&self) -> &'static str {
        "expected characteristic polynomial: enumeration vs three-point operator route"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport> {
        let spec = cfg.sweep(ORACLE_SWEEP);
        let (rows, skipped) = sweep_rows(spec.count, |i| {
            let inst = rank_one_at(&spec, cfg.seed, 1, i);
            let a = expected_charpoly(&inst, &[])?;
            let b = expected_charpoly_operator(&inst)?;
            Ok(vec![CheckRow::le(
                format!("#{i} operator route = enumeration (relative coefficient gap)"),
                relative_gap(&a, &b),
                0.0,
                1e-8,
            )])
        });
        Ok(SuiteReport::new(
            self.name(),
            cfg.seed,
            rows,
            skipped,
            serde_json::Value::Null,
        ))
    }
}

/// Largest coefficient difference relative to the largest coefficient.
pub fn relative_gap(a: &Poly, b: &Poly) -> f64 {
    let (ca, cb) = (a.coeffs(), b.coeffs());
    let len = ca.len().max(cb.len());
    let get = |c: &[f64], k: usize| c.get(k).copied().unwrap_or(0.0);
    let scale = a
        .max_abs_coeff()
        .max(b.max_abs_coeff())
        .max(f64::MIN_POSITIVE);
    (0..len)
        .map(|k| (get(ca, k) - get(cb, k)).abs())
        .fold(0.0, f64::max)
        / scale
}

/// Per-level monotonicity, real-rootedness and common interlacing along the greedy path.
pub struct Interlacing;

impl Suite for Interlacing {
    fn name(&self) -> &'static str {
        "interlacing"
    }
    fn description(&self) -> &'static str {
        "greedy path: min branch lambda_max <= parent, real-rooted partials, common interlacing"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport> {
        let spec = cfg.sweep(RANK_ONE_SWEEP);
        let (rows, skipped) = sweep_rows(spec.count, |i| {
            let inst = rank_one_at(&spec, cfg.seed, 0, i);
            let (assignment, trace) = greedy_interlacing_solve_with(&inst, greedy_opts(cfg))?;
            let mut rows = Vec::new();
            for level in &trace.levels {
                let k = level.level;
                let best = level
                    .branch_lambdas
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min);
                let tol = MONOTONE_TOL * (1.0 + level.parent_lambda.abs());
                rows.push(CheckRow::le(
                    format!("#{i} level {k} min branch <= parent"),
                    best,
                    level.parent_lambda,
                    tol,
                ));
                rows.push(CheckRow::flag(
                    format!("#{i} level {k} common interlacing"),
                    level.common_interlacing,
                ));
                let prefix = &assignment.indices()[..k - 1];
                let rv = &inst.rvs()[k - 1];
                let all_real = (0..rv.len()).all(|t| {
                    let mut p = prefix.to_vec();
                    p.push(t);
                    expected_charpoly(&inst, &p).is_ok_and(|q| q.is_real_rooted(PARTIAL_ROOT_TOL))
                });
                rows.push(CheckRow::flag(
                    format!("#{i} level {k} partials real-rooted"),
                    all_real,
                ));
            }
            Ok(rows)
        });
        Ok(SuiteReport::new(
            self.name(),
            cfg.seed,
            rows,
            skipped,
            serde_json::Value::Null,
        ))
    }
}

/// Barrier walk replay and `λ_max(p_∅) ≤ 3` on normalized instances.
pub struct BarrierWalk;

impl Suite for BarrierWalk {
    fn name(&self) -> &'static str {
        "thm41"
    }
    fn description(&self) -> &'static str {
        "normalized instances: lambda_max(p_0) <= 3 and the barrier walk passes every step"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport> {
        let spec = cfg.sweep(RANK_ONE_SWEEP);
        let (rows, skipped) = sweep_rows(spec.count, |i| {
            let inst = normalize(&rank_one_at(&spec, cfg.seed, 0, i))?;
            let lm = expected_charpoly(&inst, &[])?.lambda_max(cfg.root_tol)?;
            let trace = replay_barrier_walk_traced(&inst)?;
            let excess = |from: usize, to: usize| {
                trace
                    .steps
                    .iter()
                    .filter(|s| (from..=to).contains(&s.k))
                    .flat_map(|s| s.barriers.iter().map(|b| b.value - b.limit))
                    .fold(f64::NEG_INFINITY, f64::max)
                    .max(0.0)
            };
            let mut walk = CheckRow::flag(format!("#{i} barrier walk"), trace.passed);
            if let Some(reason) = &trace.failure {
                walk = walk.with_note(reason.clone());
            }
            Ok(vec![
                CheckRow::le(
                    format!("#{i} lambda_max(p_0) <= 3"),
                    lm,
                    WALK_TARGET,
                    WALK_INITIAL_TOL,
                ),
                CheckRow::le(
                    format!("#{i} initial barriers - delta"),
                    excess(0, 0),
                    0.0,
                    WALK_INITIAL_TOL,
                ),
                CheckRow::le(
                    format!("#{i} barrier growth across steps"),
                    excess(1, usize::MAX),
                    0.0,
                    WALK_STEP_TOL,
                ),
                walk,
            ])
        });
        Ok(SuiteReport::new(
            self.name(),
            cfg.seed,
            rows,
            skipped,
            serde_json::Value::Null,
        ))
    }
}

const UNTF_PAIRS: [(usize, usize); 5] = [(2, 3), (3, 4), (3, 5), (4, 7), (5, 9)];

/// Exact discrepancy of harmonic unit-norm tight frames, plus the tight-frame
/// bound on generated non-unit-norm tight frames.
pub struct TightFrames;

impl Suite for TightFrames {
    fn name(&self) -> &'static str {
        "thm15"
    }
    fn description(&self) -> &'static str {
        "harmonic unit-norm tight frames: every sign pattern has norm n/d; tight frames: Disc <= sqrt(n/d) sigma"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport> {
        let pairs: Vec<(usize, usize)> = match (cfg.d, cfg.n) {
            (Some(d), Some(n)) => vec![(d, n)],
            _ => UNTF_PAIRS.to_vec(),
        };
        let mut rows = Vec::new();
        let mut details = Vec::new();
        for (d, n) in pairs {
            let tag = format!("(d={d}, n={n})");
            let res = harmonic_untf(n, d).and_then(|f| verify_untf_disc(&f));
            let u = match res {
                Ok(u) => u,
                Err(e) => {
                    rows.push(CheckRow::failed(tag, e.to_string()));
                    continue;
                }
            };
            rows.push(CheckRow::eq(
                format!("{tag} min pattern norm = n/d"),
                u.min_norm,
                u.expected,
                1e-9,
            ));
            rows.push(CheckRow::eq(
                format!("{tag} max pattern norm = n/d"),
                u.max_norm,
                u.expected,
                1e-9,
            ));
            rows.push(CheckRow::eq(
                format!("{tag} Disc = sqrt(n/d) sigma"),
                u.value,
                u.sigma_formula,
                1e-9,
            ));
            if n == 2 * d - 1 {
                let target = (2.0 - 1.0 / d as f64).sqrt();
                rows.push(CheckRow::eq(
                    format!("{tag} Disc/sigma = sqrt(2 - 1/d)"),
                    u.ratio,
                    target,
                    1e-9,
                ));
            }
            details.push(u);
        }
        let count = cfg.count.unwrap_or(20);
        let (tight, skipped) = sweep_rows(count, |i| {
            let mut rng = stream_rng(cfg.seed, stream(2, i));
            let d = rng.random_range(2..=3);
            let frame = Frame::new(d, random_tight_frame(&mut rng, d, 2))?;
            let inst = frame.to_instance();
            let menu = bound_menu(&inst);
            let bound = *menu.get("tight_frame").ok_or_else(|| {
                Error::InvariantViolation("generated frame not recognized as tight".into())
            })?;
            let disc = disc_bruteforce(&inst.into(), NormKind::Spectral)?.value;
            Ok(vec![CheckRow::le(
                format!("tight #{i} Disc <= sqrt(n/d) sigma"),
                disc,
                bound,
                cfg.norm_tol,
            )])
        });
        rows.extend(tight);
        Ok(SuiteReport::new(
            self.name(),
            cfg.seed,
            rows,
            skipped,
            serde_json::to_value(details)?,
        ))
    }
}

/// Diagonal sign family attaining `Disc = n = σ²`.
pub struct DiagonalLowerBound;

impl Suite for DiagonalLowerBound {
    fn name(&self) -> &'static str {
        "prop16"
    }
    fn description(&self) -> &'static str {
        "diagonal sign family with d = 2^n: Disc = n and sigma^2 = n exactly"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport> {
        let ns: Vec<usize> = match cfg.n {
            Some(n) => vec![n],
            None => (1..=4).collect(),
        };
        let mut rows = Vec::new();
        let mut details = Vec::new();
        for n in ns {
            let lb = verify_lower_bound(n)?;
            rows.push(CheckRow::eq(
                format!("n={n} Disc = n"),
                lb.disc as f64,
                n as f64,
                0.0,
            ));
            rows.push(CheckRow::eq(
                format!("n={n} sigma^2 = n"),
                lb.sigma_sq as f64,
                n as f64,
                0.0,
            ));
            details.push(lb);
        }
        let details = if details.len() == 1 {
            serde_json::to_value(&details[0])?
        } else {
            serde_json::to_value(&details)?
        };
        Ok(SuiteReport::new(self.name(), cfg.seed, rows, 0, details))
    }
}

/// Mixed discriminant identities and the Alexandrov-type inequality.
pub struct MixedDiscriminants;

impl Suite for MixedDiscriminants {
    fn name(&self) -> &'static str {
        "alexandrov"
    }
    fn description(&self) -> &'static str {
        "mixed discriminants: polarization = permutation expansion, D~(X) = Tr X, D~(X1) D~(X2) >= D~(X1, X2)"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport> {
        let (mut rows, _) = sweep_rows(100, |i| {
            let mut rng = stream_rng(cfg.seed, stream(3, i));
            let d = rng.random_range(1..=5);
            let xs: Vec<DMatrix<f64>> = (0..d)
                .map(|_| {
                    let r = rng.random_range(1..=d);
                    random_psd(&mut rng, d, r)
                })
                .collect();
            let a = mixed_discriminant(&xs)?;
            let b = mixed_discriminant_permutation(&xs)?;
            let trace_scale: f64 = xs.iter().map(|x| x.trace()).product();
            let tol = 1e-9 * a.abs().max(b.abs()) + 1e-12 * trace_scale;
            Ok(vec![CheckRow::eq(
                format!("tuple #{i} (d={d}) polarization = permutation"),
                a,
                b,
                tol,
            )])
        });
        let (dt, _) = sweep_rows(100, |i| {
            let mut rng = stream_rng(cfg.seed, stream(4, i));
            let d = rng.random_range(2..=6);
            let x = random_psd(&mut rng, d, d);
            let v = d_tilde(std::slice::from_ref(&x), d)?;
            Ok(vec![CheckRow::eq(
                format!("single #{i} (d={d}) D~(X) = Tr X"),
                v,
                x.trace(),
                1e-10,
            )])
        });
        rows.extend(dt);
        let (pairs, _) = sweep_rows(cfg.count.unwrap_or(500), |i| {
            let mut rng = stream_rng(cfg.seed, stream(5, i));
            let d = rng.random_range(2..=6);
            let r1 = rng.random_range(1..=d);
            let r2 = rng.random_range(1..=d);
            let x1 = random_psd(&mut rng, d, r1);
            let x2 = random_psd(&mut rng, d, r2);
            let c = check_alexandrov(&x1, &x2, d)?;
            let tol = 1e-9 * (1.0 + c.lhs.abs() + c.rhs.abs());
            Ok(vec![CheckRow::le(
                format!("pair #{i} (d={d}) D~(X1,X2) <= D~(X1) D~(X2)"),
                c.rhs,
                c.lhs,
                tol,
            )])
        });
        rows.extend(pairs);
        Ok(SuiteReport::new(
            self.name(),
            cfg.seed,
            rows,
            0,
            serde_json::Value::Null,
        ))
    }
}

/// Barrier function inequalities: univariate quadratics, monotonicity and second-order
/// bounds on determinantal polynomials, and the bivariate quadratic step.
pub struct BarrierInequalities;

const BARRIER_SWEEP: &str = "d=2..4;n=2..5;rv=mixed;count=200";

impl Suite for BarrierInequalities {
    fn name(&self) -> &'static str {
        "barrier"
    }
    fn description(&self) -> &'static str {
        "barrier inequalities: quadratic monotonicity, barrier monotonicity, second-order bound, bivariate quadratic step"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport> {
        let count = cfg.count.unwrap_or(200);
        let (mut rows, _) = sweep_rows(count, |i| {
            let mut rng = stream_rng(cfg.seed, stream(6, i));
            let a = rng.random_range(-3.0..3.0);
            // every eighth quadratic has a double root
            let b = if i % 8 == 0 {
                a
            } else {
                rng.random_range(-3.0..3.0)
            };
            let lead = rng.random_range(0.5..2.0);
            let s = Poly::from_roots(&[a, b]).scale(lead);
            let top = a.max(b);
            let probes: Vec<f64> = (0..8)
                .map(|_| top + rng.random_range(1e-3f64..10.0))
                .collect();
            let ok = check_quadratic_barrier(&s, &probes)?;
            Ok(vec![CheckRow::flag(
                format!("quadratic #{i} x - 2/Phi nonincreasing"),
                ok,
            )])
        });

        let spec = cfg.sweep(BARRIER_SWEEP);
        let (det_rows, _) = sweep_rows(spec.count, |i| {
            let inst = normalize(&rank_one_at(&spec, cfg.seed, 7, i))?;
            let qe = QEvaluator::new(&inst)?;
            let n = qe.n();
            let deltas = qe.deltas();
            let w0: Vec<f64> = deltas.iter().map(|d| -d).collect();
            let x = WALK_TARGET;
            let mut rows = Vec::new();
            for k in [0, n] {
                certify_above_roots(&qe, k, x, &w0)?;
                for j in (0..n).filter(|&j| deltas[j] > 0.0) {
                    let phi = barrier(&qe, k, x, &w0, j, BarrierMode::Analytic)?;
                    let fd = barrier_unchecked(&qe, k, x, &w0, j, BarrierMode::FiniteDifference);
                    rows.push(CheckRow::eq(
                        format!("det #{i} Q_{k} analytic = finite-difference Phi^{}", j + 1),
                        phi,
                        fd,
                        1e-6 * (1.0 + phi.abs()),
                    ));
                    let second = second_barrier(&qe, k, x, &w0, j);
                    rows.push(CheckRow::le(
                        format!("det #{i} Q_{k} d2/Q <= Phi^2 at coordinate {}", j + 1),
                        second,
                        phi * phi,
                        1e-8,
                    ));
                    for t in [0.1, 1.0, 10.0] {
                        let z: Vec<f64> = w0.iter().map(|w| w + t).collect();
                        let moved = barrier(&qe, k, x + t, &z, j, BarrierMode::Analytic)?;
                        rows.push(CheckRow::le(
                            format!("det #{i} Q_{k} Phi^{} nonincreasing at t={t}", j + 1),
                            moved,
                            phi,
                            1e-9 * (1.0 + phi.abs()),
                        ));
                    }
                }
            }
            Ok(rows)
        });
        rows.extend(det_rows);

        let (bi_rows, skipped) = sweep_rows(count, |i| {
            let mut rng = stream_rng(cfg.seed, stream(8, i));
            let d = rng.random_range(2..=4);
            let squared = i % 2 == 0;
            let rank_a = if squared { 1 } else { rng.random_range(1..=2) };
            let a = random_psd(&mut rng, d, rank_a);
            let b = random_psd(&mut rng, d, d) + DMatrix::identity(d, d) * 0.1;
            let c = random_symmetric(&mut rng, d);
            let c_min = c.symmetric_eigenvalues().min();
            let b_min = b.symmetric_eigenvalues().min();
            // y_0 B + C positive definite, so every point with x ≥ 0 is above the roots
            let y0 = (1.0 - c_min).max(0.0) / b_min + rng.random_range(0.0..2.0);
            let x0 = rng.random_range(0.0..4.0);
            let delta = if i % 4 < 2 { 1.0 } else { 0.5 };
            let p = DeterminantalBivariate::new(a, b, c, squared)?;
            let res = check_bivariate_quadratic_lemma(&p, x0, y0, delta)?;
            let case = if delta == 1.0 { "i" } else { "ii" };
            Ok(vec![CheckRow::le(
                format!("bivariate #{i} case ({case}) Phi^y after <= before"),
                res.after,
                res.before,
                1e-8,
            )])
        });
        rows.extend(bi_rows);
        Ok(SuiteReport::new(
            self.name(),
            cfg.seed,
            rows,
            skipped,
            serde_json::Value::Null,
        ))
    }
}

const SCHATTEN_SWEEP: &str = "d=1..4;n=1..6;rv=mixed;count=200";

/// Schatten-p discrepancy against the matrix Khintchine bounds.
pub struct SchattenBounds;

impl Suite for SchattenBounds {
    fn name(&self) -> &'static str {
        "schatten"
    }
    fn description(&self) -> &'static str {
        "Schatten-p discrepancy vs Rademacher closed form, Frobenius bound and Monte-Carlo Khintchine bound"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport> {
        let orders: Vec<f64> = match cfg.p {
            Some(p) => {
                SchattenOrder::new(p)?;
                vec![p]
            }
            None => vec![2.0, 4.0, 6.0],
        };
        let spec = cfg.sweep(SCHATTEN_SWEEP);
        let hermitian_at = |part: u64, i: usize, rv: RvFamily| -> HermitianInstance {
            let mut rng = stream_rng(cfg.seed, stream(part, i));
            let d = spec.d.sample(&mut rng);
            let n = spec.n.sample(&mut rng);
            random_hermitian_instance(&mut rng, d, n, rv)
        };
        let (mut rows, _) = sweep_rows(spec.count, |i| {
            let inst = hermitian_at(9, i, RvFamily::Rademacher);
            let mut rows = Vec::new();
            for &p in &orders {
                let r = khintchine_bounds(&inst, p, cfg.mc_samples, cfg.seed)?;
                let closed = r.rademacher_closed_form.expect("Rademacher instance");
                rows.push(CheckRow::le(
                    format!("rademacher #{i} p={p} disc_p <= sqrt(p-1) sigma_p"),
                    r.disc_p,
                    closed,
                    cfg.norm_tol,
                ));
            }
            Ok(rows)
        });
        let (general, _) = sweep_rows(spec.count, |i| {
            let inst = hermitian_at(10, i, spec.rv);
            let mut rows = Vec::new();
            for &p in &orders {
                let r = khintchine_bounds(&inst, p, cfg.mc_samples, cfg.seed)?;
                if let Some(fb) = &r.frobenius_closed_form {
                    rows.push(CheckRow::le(
                        format!("general #{i} disc_2 <= sigma_F"),
                        r.disc_p,
                        fb.sigma_f,
                        cfg.norm_tol,
                    ));
                    rows.push(CheckRow::le(
                        format!("general #{i} disc_2 <= Frobenius second moment"),
                        r.disc_p,
                        fb.second_moment,
                        cfg.norm_tol,
                    ));
                }
                let mc = &r.general_khintchine;
                rows.push(CheckRow::le(
                    format!("general #{i} p={p} disc_p <= Khintchine MC bound + 3 stderr"),
                    r.disc_p,
                    mc.value + 3.0 * mc.stderr,
                    0.0,
                ));
                let mc2 = &r.general_second_moment;
                rows.push(CheckRow::le(
                    format!("general #{i} p={p} disc_p <= second-moment MC bound + 3 stderr"),
                    r.disc_p,
                    mc2.value + 3.0 * mc2.stderr,
                    0.0,
                ));
            }
            Ok(rows)
        });
        rows.extend(general);
        Ok(SuiteReport::new(
            self.name(),
            cfg.seed,
            rows,
            0,
            serde_json::Value::Null,
        ))
    }
}

/// Rounding fractional combinations of a scaled unit-norm tight frame to subsets.
pub struct LyapunovRounding;

impl Suite for LyapunovRounding {
    fn name(&self) -> &'static str {
        "lyapunov"
    }
    fn description(&self) -> &'static str {
        "scaled unit-norm tight frames with random weights: subset error <= 1.5 sqrt(eps)"
    }
    fn run(&self, cfg: &SuiteConfig) -> Result<SuiteReport> {
        let (rows, skipped) = sweep_rows(cfg.count.unwrap_or(100), |i| {
            let mut rng = stream_rng(cfg.seed, stream(11, i));
            let d = cfg.d.unwrap_or_else(|| rng.random_range(2..=4));
            let n = cfg
                .n
                .unwrap_or_else(|| rng.random_range(d..=(2 * d + 2).min(10)));
            let shrink = rng.random_range(0.7..=1.0);
            let frame = harmonic_untf(n, d)?;
            // Σ u u* = (n/d) I, so this scaling makes ‖Σ u u*‖ = shrink² ≤ 1
            let frame = frame.scaled((d as f64 / n as f64).sqrt() * shrink);
            let t = random_weights(&mut rng, n);
            let res = lyapunov_round(frame.vectors(), &t)?;
            Ok(vec![CheckRow::le(
                format!("#{i} (d={d}, n={n}) rounding error <= 1.5 sqrt(eps)"),
                res.error,
                res.bound,
                cfg.norm_tol,
            )])
        });
        Ok(SuiteReport::new(
            self.name(),
            cfg.seed,
            rows,
            skipped,
            serde_json::Value::Null,
        ))
    }
}

pub fn suites() -> Vec<Arc<dyn Suite>> {
    vec![
        Arc::new(ThreeSigma),
        Arc::new(OracleEquivalence),
        Arc::new(Interlacing),
        Arc::new(BarrierWalk),
        Arc::new(TightFrames),
        Arc::new(DiagonalLowerBound),
        Arc::new(MixedDiscriminants),
        Arc::new(BarrierInequalities),
        Arc::new(SchattenBounds),
        Arc::new(LyapunovRounding),
    ]
}

pub fn suite_by_name(name: &str) -> Result<Arc<dyn Suite>> {
    let all = suites();
    all.iter()
        .find(|s| s.name() == name)
        .cloned()
        .ok_or_else(|| Error::UnknownName {
            kind: "suite",
            name: name.into(),
            available: all.iter().map(|s| s.name()).collect::<Vec<_>>().join(", "),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(count: usize) -> SuiteConfig {
        SuiteConfig {
            count: Some(count),
            mc_samples: 1000,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn registry_names() {
        let names: Vec<&str> = suites().iter().map(|s| s.name()).collect();
        for n in [
            "thm13",
            "thm15",
            "prop16",
            "thm41",
            "alexandrov",
            "schatten",
            "lyapunov",
        ] {
            assert!(names.contains(&n));
        }
        assert!(matches!(
            suite_by_name("nope"),
            Err(Error::UnknownName { .. })
        ));
    }

    #[test]
    fn prop16_single() {
        let r = suite_by_name("prop16")
            .unwrap()
            .run(&SuiteConfig {
                n: Some(3),
                ..SuiteConfig::default()
            })
            .unwrap();
        assert!(r.pass);
        assert_eq!(r.details["disc"], 3);
        assert_eq!(r.details["sigma_sq"], 3);
    }

    #[test]
    fn small_sweeps_pass() {
        for name in ["thm13", "oracle", "interlacing", "thm41", "lyapunov"] {
            let r = suite_by_name(name).unwrap().run(&small(6)).unwrap();
            assert!(r.pass, "{name}: {:?}", r.rows.iter().find(|x| !x.pass));
        }
    }

    #[test]
    fn row_semantics() {
        assert!(CheckRow::le("a", 1.0, 1.0 - 1e-12, 1e-9).pass);
        assert!(!CheckRow::le("a", 1.0, 0.5, 1e-9).pass);
        assert!(CheckRow::eq("b", 2.0, 2.0, 0.0).pass);
        assert!(!CheckRow::flag("c", false).pass);
    }
}
