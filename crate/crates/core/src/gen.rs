//! Seeded instance generators and the generator mini-language
//! `d=2..5;n=2..8;rv=mixed;count=300`.
//!
//! Instance `i` of a sweep draws from its own ChaCha stream, so instances do
//! not depend on how many came before or on thread scheduling.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexVector, HermitianMatrix, C64};
use crate::model::{DiscreteRandomVariable, HermitianInstance, RankOneInstance};

/// Deterministic RNG for item `index` of a sweep seeded with `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RvFamily {
    Rademacher,
    /// `{0,1}`-valued with a uniform mean in `(0.05, 0.95)`.
    Bernoulli,
    /// Supports of size 2 or 3 inside `[−2, 2]`.
    Mixed,
}

impl FromStr for RvFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rademacher" => Ok(Self::Rademacher),
            "bernoulli" => Ok(Self::Bernoulli),
            "mixed" => Ok(Self::Mixed),
            other => Err(Error::UnknownName {
                kind: "rv family",
                name: other.into(),
                available: "rademacher, bernoulli, mixed".into(),
            }),
        }
    }
}

impl fmt::Display for RvFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rademacher => "rademacher",
            Self::Bernoulli => "bernoulli",
            Self::Mixed => "mixed",
        })
    }
}

/// Inclusive integer range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl Span {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Err(Error::PreconditionViolated(format!(
                "empty range {lo}..{hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn single(v: usize) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        rng.random_range(self.lo..=self.hi)
    }
}

impl FromStr for Span {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::PreconditionViolated(format!("bad range `{s}` (expected N or N..M)"));
        match s.split_once("..") {
            Some((a, b)) => Span::new(
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ),
            None => Ok(Span::single(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

/// A sweep: dimension and size ranges, random-variable family and count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub d: Span,
    pub n: Span,
    pub rv: RvFamily,
    pub count: usize,
}

impl FromStr for GenSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut spec = GenSpec {
            d: Span::new(2, 4)?,
            n: Span::new(2, 6)?,
            rv: RvFamily::Mixed,
            count: 100,
        };
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| {
                Error::PreconditionViolated(format!("expected key=value, got `{part}`"))
            })?;
            match key.trim() {
                "d" => spec.d = value.parse()?,
                "n" => spec.n = value.parse()?,
                "rv" => spec.rv = value.trim().parse()?,
                "count" => {
                    spec.count = value
                        .trim()
                        .parse()
                        .map_err(|_| Error::PreconditionViolated(format!("bad count `{value}`")))?
                }
                other => {
                    return Err(Error::UnknownName {
                        kind: "generator key",
                        name: other.into(),
                        available: "d, n, rv, count".into(),
                    })
                }
            }
        }
        if spec.d.lo == 0 || spec.n.lo == 0 {
            return Err(Error::PreconditionViolated(
                "d and n must be at least 1".into(),
            ));
        }
        Ok(spec)
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d={};n={};rv={};count={}",
            self.d, self.n, self.rv, self.count
        )
    }
}

pub fn random_rv(rng: &mut impl Rng, family: RvFamily) -> DiscreteRandomVariable {
    match family {
        RvFamily::Rademacher => DiscreteRandomVariable::rademacher(),
        RvFamily::Bernoulli => DiscreteRandomVariable::bernoulli(rng.random_range(0.05..0.95))
            .expect("mean inside (0,1)"),
        RvFamily::Mixed => loop {
            let size = rng.random_range(2..=3);
            let mut support: Vec<f64> = (0..size).map(|_| rng.random_range(-2.0..=2.0)).collect();
            support.sort_by(f64::total_cmp);
            if support.windows(2).any(|w| w[1] - w[0] < 1e-3) {
                continue;
            }
            let weights: Vec<f64> = (0..size).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = weights.iter().sum();
            let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
            // absorb rounding into the last weight so the sum is 1 to the last bit
            let head: f64 = probs[..size - 1].iter().sum();
            probs[size - 1] = 1.0 - head;
            break DiscreteRandomVariable::new(support, probs).expect("valid by construction");
        },
    }
}

/// Complex Gaussian vector with `E‖u‖² = 1`.
pub fn random_vector(rng: &mut impl Rng, d: usize) -> ComplexVector {
    let s = (0.5 / d as f64).sqrt();
    ComplexVector(
        (0..d)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(s * re, s * im)
            })
            .collect(),
    )
}

pub fn random_rank_one(
    rng: &mut impl Rng,
    d: usize,
    n: usize,
    family: RvFamily,
) -> RankOneInstance {
    let vectors = (0..n).map(|_| random_vector(rng, d)).collect();
    let rvs = (0..n).map(|_| random_rv(rng, family)).collect();
    RankOneInstance::new(d, vectors, rvs).expect("valid by construction")
}

/// Random Hermitian matrix `(G + G*)/(2√d)` with complex Gaussian `G`.
pub fn random_hermitian(rng: &mut impl Rng, d: usize) -> HermitianMatrix {
    let g = DMatrix::<C64>::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let s = 0.5 / (d as f64).sqrt();
    HermitianMatrix::new((&g + g.adjoint()) * C64::from(s)).expect("symmetrized")
}

pub fn random_hermitian_instance(
    rng: &mut impl Rng,
    d: usize,
    n: usize,
    family: RvFamily,
) -> HermitianInstance {
    let mats = (0..n).map(|_| random_hermitian(rng, d)).collect();
    let rvs = (0..n).map(|_| random_rv(rng, family)).collect();
    HermitianInstance::new(d, mats, rvs).expect("valid by construction")
}

/// Real PSD matrix `G Gᵀ / d` of the given rank.
pub fn random_psd(rng: &mut impl Rng, d: usize, rank: usize) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(d, rank, |_, _| rng.sample(StandardNormal));
    &g * g.transpose() / d as f64
}

/// Real symmetric matrix with Gaussian entries.
pub fn random_symmetric(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    (&g + g.transpose()) * 0.5
}

/// Random real orthogonal matrix (QR of a Gaussian matrix).
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> DMatrix<C64> {
    let g = DMatrix::<C64>::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    g.qr().q()
}

/// Union of `copies` randomly rotated orthonormal bases, each scaled by a random
/// factor; tight only when all factors agree, so factors are shared here.
pub fn random_tight_frame(rng: &mut impl Rng, d: usize, copies: usize) -> Vec<ComplexVector> {
    let scale = rng.random_range(0.5..2.0);
    let mut out = Vec::with_capacity(d * copies);
    for _ in 0..copies {
        let u = random_unitary(rng, d);
        for c in 0..d {
            out.push(ComplexVector(
                u.column(c).iter().map(|z| z * scale).collect(),
            ));
        }
    }
    out
}

/// Random `t ∈ [0,1]^n`, a quarter of them pinned to 0 or 1.
pub fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut t: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    for &i in idx.iter().take(n / 4) {
        t[i] = if rng.random_bool(0.5) { 0.0 } else { 1.0 };
    }
    t
}
