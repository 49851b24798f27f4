use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use specdisc::gen::GenSpec;
use specdisc::suite::{SuiteConfig, DEFAULT_NORM_TOL, DEFAULT_SEED};
use specdisc::{rpoly::DEFAULT_ROOT_TOL, schatten::DEFAULT_MC_SAMPLES, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand. Each one can also come from `--config`.
#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// TOML file with defaults for any of the flags below
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report path; stdout when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub root_tol: Option<f64>,
    #[arg(long, global = true)]
    pub norm_tol: Option<f64>,
    /// Worker threads (default: SPECDISC_THREADS, else all cores)
    #[arg(long, global = true, env = "SPECDISC_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub count: Option<usize>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Schatten order; spectral norm when absent
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Generator sweep such as `d=2..5;n=2..8;rv=mixed;count=300`
    #[arg(long, global = true)]
    pub gen: Option<String>,
    #[arg(long, global = true)]
    pub mc_samples: Option<usize>,
}

/// The TOML form of [`CommonArgs`].
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    out: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
    root_tol: Option<f64>,
    norm_tol: Option<f64>,
    threads: Option<usize>,
    count: Option<usize>,
    n: Option<usize>,
    d: Option<usize>,
    p: Option<f64>,
    gen: Option<String>,
    mc_samples: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub suite: SuiteConfig,
}

fn parse_toml(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|s| {
                let before = &text[..s.start];
                let line = before.matches('\n').count() + 1;
                let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                (line, column)
            })
            .unwrap_or((0, 0));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })
}

impl RunConfig {
    /// Flags override the config file, which overrides built-in defaults.
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => parse_toml(path)?,
            None => FileConfig::default(),
        };
        let root_tol = args.root_tol.or(file.root_tol).unwrap_or(DEFAULT_ROOT_TOL);
        let norm_tol = args.norm_tol.or(file.norm_tol).unwrap_or(DEFAULT_NORM_TOL);
        for (name, v) in [("root_tol", root_tol), ("norm_tol", norm_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::PreconditionViolated(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        let threads = args.threads.or(file.threads);
        if threads == Some(0) {
            return Err(Error::PreconditionViolated(
                "threads must be at least 1".into(),
            ));
        }
        let gen = args
            .gen
            .clone()
            .or(file.gen)
            .map(|g| g.parse::<GenSpec>())
            .transpose()?;
        Ok(Self {
            out: args.out.clone().or(file.out),
            format: args.format.or(file.format),
            threads,
            suite: SuiteConfig {
                seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
                count: args.count.or(file.count),
                n: args.n.or(file.n),
                d: args.d.or(file.d),
                p: args.p.or(file.p),
                gen,
                root_tol,
                norm_tol,
                mc_samples: args
                    .mc_samples
                    .or(file.mc_samples)
                    .unwrap_or(DEFAULT_MC_SAMPLES),
            },
        })
    }
}
