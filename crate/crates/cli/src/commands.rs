use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use specdisc::disc::{bound_menu, solvers, NormKind, SolveOutcome, DEFAULT_ENUMERATION_CAP};
use specdisc::frames::harmonic_untf;
use specdisc::gen::{random_rank_one, stream_rng, GenSpec};
use specdisc::model::{load_instance, normalize, Instance};
use specdisc::suite::{suite_by_name, suites, CheckRow};
use specdisc::witness::{
    replay_barrier_walk_traced, BarrierWalkTrace, WALK_INITIAL_TOL, WALK_TARGET,
};
use specdisc::{Error, Result};

use crate::config::{Format, RunConfig};

const BENCH_SWEEP: &str = "d=2..4;n=4..10;rv=rademacher;count=20";

fn rows_csv(rows: &[CheckRow]) -> String {
    let mut out = String::from("name,lhs,rhs,slack,tol,pass\n");
    for r in rows {
        let name = r.name.replace('"', "\"\"");
        let _ = writeln!(
            out,
            "\"{name}\",{},{},{},{},{}",
            r.lhs, r.rhs, r.slack, r.tol, r.pass
        );
    }
    out
}

fn write_out(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit<T: Serialize>(cfg: &RunConfig, report: &T, rows: &[CheckRow]) -> Result<()> {
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Csv => rows_csv(rows),
    };
    write_out(cfg, &text)
}

fn norm_kind(cfg: &RunConfig) -> Result<NormKind> {
    match cfg.suite.p {
        None => Ok(NormKind::Spectral),
        Some(p) if p.is_infinite() => Ok(NormKind::Spectral),
        Some(p) => {
            NormKind::Schatten(p).order()?;
            Ok(NormKind::Schatten(p))
        }
    }
}

#[derive(Serialize)]
struct SolveReport {
    dim: usize,
    n: usize,
    kind: &'static str,
    norm: NormKind,
    sigma: f64,
    bounds: std::collections::BTreeMap<String, f64>,
    outcomes: Vec<SolveOutcome>,
    skipped: Vec<String>,
    rows: Vec<CheckRow>,
    pass: bool,
}

pub fn solve(cfg: &RunConfig, path: &Path, names: &[String]) -> Result<bool> {
    let inst = load_instance(path)?;
    let norm = norm_kind(cfg)?;
    let registry: Vec<_> = solvers(DEFAULT_ENUMERATION_CAP, cfg.suite.root_tol);
    let chosen: Vec<_> = if names.is_empty() {
        registry
    } else {
        names
            .iter()
            .map(|n| {
                registry
                    .iter()
                    .find(|s| s.name() == n)
                    .cloned()
                    .ok_or_else(|| Error::UnknownName {
                        kind: "solver",
                        name: n.clone(),
                        available: registry
                            .iter()
                            .map(|s| s.name())
                            .collect::<Vec<_>>()
                            .join(", "),
                    })
            })
            .collect::<Result<_>>()?
    };
    let mut outcomes = Vec::new();
    let mut skipped = Vec::new();
    for s in &chosen {
        match s.solve(&inst, norm) {
            Ok(o) => outcomes.push(o),
            Err(Error::Unsupported(why)) => skipped.push(format!("{}: {why}", s.name())),
            Err(e) => return Err(e),
        }
    }
    let tol = cfg.suite.norm_tol;
    let mut rows = Vec::new();
    let exact = outcomes
        .iter()
        .find(|o| o.solver == "bruteforce")
        .map(|o| o.value);
    for o in &outcomes {
        if let Some(v) = exact.filter(|_| o.solver != "bruteforce") {
            rows.push(CheckRow::le(
                format!("bruteforce <= {}", o.solver),
                v,
                o.value,
                tol,
            ));
        }
        for (name, b) in &o.bound_checks {
            rows.push(CheckRow::le(
                format!("{} <= {name}", o.solver),
                o.value,
                b.bound,
                tol,
            ));
        }
    }
    let (kind, bounds) = match &inst {
        Instance::RankOne(r) => ("rank_one", bound_menu(r)),
        Instance::Hermitian(_) => ("hermitian", Default::default()),
    };
    let pass = rows.iter().all(|r| r.pass);
    let report = SolveReport {
        dim: inst.dim(),
        n: inst.n(),
        kind,
        norm,
        sigma: inst.sigma(),
        bounds,
        outcomes,
        skipped,
        rows,
        pass,
    };
    emit(cfg, &report, &report.rows)?;
    Ok(pass)
}

pub fn verify(cfg: &RunConfig, name: &str) -> Result<bool> {
    if name == "list" {
        let mut text = String::new();
        for s in suites() {
            let _ = writeln!(text, "{:<12} {}", s.name(), s.description());
        }
        write_out(cfg, &text)?;
        return Ok(true);
    }
    let suite = suite_by_name(name)?;
    let report = suite.run(&cfg.suite)?;
    eprintln!(
        "{}: {}/{} checks passed, {} skipped",
        report.suite, report.passed, report.total, report.skipped
    );
    emit(cfg, &report, &report.rows)?;
    Ok(report.pass)
}

#[derive(Serialize)]
struct ReplayReport {
    sigma_before: f64,
    trace: BarrierWalkTrace,
    rows: Vec<CheckRow>,
    pass: bool,
}

pub fn replay(cfg: &RunConfig, path: &Path) -> Result<bool> {
    let inst = match load_instance(path)? {
        Instance::RankOne(r) => r,
        Instance::Hermitian(_) => {
            return Err(Error::Unsupported(
                "the barrier walk needs a rank-one instance".into(),
            ))
        }
    };
    let sigma_before = specdisc::model::sigma(&inst);
    let trace = replay_barrier_walk_traced(&normalize(&inst)?)?;
    let mut rows = Vec::new();
    for step in &trace.steps {
        rows.push(CheckRow::flag(
            format!("step {} above roots", step.k),
            step.above_roots,
        ));
        for b in &step.barriers {
            let tol = if step.k == 0 {
                WALK_INITIAL_TOL
            } else {
                specdisc::witness::WALK_STEP_TOL
            };
            rows.push(CheckRow::le(
                format!("step {} barrier {}", step.k, b.coordinate),
                b.value,
                b.limit,
                tol,
            ));
        }
    }
    if let Some(lm) = trace.lambda_max {
        rows.push(CheckRow::le(
            "lambda_max(p_0) <= 3",
            lm,
            WALK_TARGET,
            WALK_INITIAL_TOL,
        ));
    }
    if let Some(reason) = &trace.failure {
        rows.push(CheckRow::failed("walk", reason.clone()));
    }
    let pass = trace.passed && rows.iter().all(|r| r.pass);
    let report = ReplayReport {
        sigma_before,
        trace,
        rows,
        pass,
    };
    emit(cfg, &report, &report.rows)?;
    Ok(pass)
}

pub fn frames_gen(cfg: &RunConfig) -> Result<bool> {
    let (Some(n), Some(d)) = (cfg.suite.n, cfg.suite.d) else {
        return Err(Error::PreconditionViolated(
            "frames gen needs --n and --d".into(),
        ));
    };
    if cfg.format == Some(Format::Csv) {
        return Err(Error::Unsupported(
            "frames are written as instance JSON".into(),
        ));
    }
    let inst = Instance::from(harmonic_untf(n, d)?.to_instance());
    write_out(cfg, &(inst.to_json() + "\n"))?;
    Ok(true)
}

#[derive(Serialize)]
struct BenchRow {
    index: usize,
    d: usize,
    n: usize,
    solver: &'static str,
    value: f64,
    sigma: f64,
    millis: f64,
}

/// Timings differ between runs; everything else in the table is seeded.
pub fn bench(cfg: &RunConfig) -> Result<bool> {
    let mut spec: GenSpec = match &cfg.suite.gen {
        Some(g) => g.clone(),
        None => BENCH_SWEEP.parse()?,
    };
    if let Some(c) = cfg.suite.count {
        spec.count = c;
    }
    let registry = solvers(DEFAULT_ENUMERATION_CAP, cfg.suite.root_tol);
    let mut rows = Vec::new();
    for i in 0..spec.count {
        let mut rng = stream_rng(cfg.suite.seed, i as u64);
        let d = cfg.suite.d.unwrap_or_else(|| spec.d.sample(&mut rng));
        let n = cfg.suite.n.unwrap_or_else(|| spec.n.sample(&mut rng));
        let inst = Instance::from(random_rank_one(&mut rng, d, n, spec.rv));
        let sigma = inst.sigma();
        for s in &registry {
            let start = Instant::now();
            let out = s.solve(&inst, NormKind::Spectral)?;
            rows.push(BenchRow {
                index: i,
                d,
                n,
                solver: s.name(),
                value: out.value,
                sigma,
                millis: start.elapsed().as_secs_f64() * 1e3,
            });
        }
    }
    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        Format::Csv => {
            let mut out = String::from("index,d,n,solver,value,sigma,millis\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{:.3}",
                    r.index, r.d, r.n, r.solver, r.value, r.sigma, r.millis
                );
            }
            out
        }
    };
    write_out(cfg, &text)?;
    Ok(true)
}
