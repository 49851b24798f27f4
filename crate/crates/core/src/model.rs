//! Instances: finite-support random variables attached to rank-one or general
//! Hermitian matrix families, plus the canonical JSON format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, ComplexVector, HermitianMatrix, C64};

const PROB_SUM_TOL: f64 = 1e-12;

/// A finite-support scalar random variable.
///
/// Every support point carries strictly positive mass; a zero-probability
/// point is not part of the support.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteRandomVariable {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteRandomVariable {
    pub fn new(support: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvariantViolation(
                "support: must be nonempty".into(),
            ));
        }
        if support.len() != probs.len() {
            return Err(Error::InvariantViolation(format!(
                "probs: {} probabilities for {} support points",
                probs.len(),
                support.len()
            )));
        }
        if support.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvariantViolation(
                "support: values must be finite".into(),
            ));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvariantViolation(
                "support: must be strictly increasing".into(),
            ));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvariantViolation(
                "probs: each probability must be positive".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvariantViolation(format!(
                "probs: sum to {total}, not 1"
            )));
        }
        Ok(Self { support, probs })
    }

    /// Uniform on `{-1, +1}`.
    pub fn rademacher() -> Self {
        Self {
            support: vec![-1.0, 1.0],
            probs: vec![0.5, 0.5],
        }
    }

    /// `{0,1}`-valued with mean `t`; degenerate to a constant at `t ∈ {0, 1}`.
    pub fn bernoulli(t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvariantViolation(format!(
                "bernoulli mean {t} outside [0,1]"
            )));
        }
        if t == 0.0 {
            Ok(Self::constant(0.0))
        } else if t == 1.0 {
            Ok(Self::constant(1.0))
        } else {
            Ok(Self {
                support: vec![0.0, 1.0],
                probs: vec![1.0 - t, t],
            })
        }
    }

    pub fn constant(v: f64) -> Self {
        Self {
            support: vec![v],
            probs: vec![1.0],
        }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(s, p)| s * p)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(s, p)| p * (s - m) * (s - m))
            .sum()
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn is_rademacher(&self) -> bool {
        self.support == [-1.0, 1.0] && self.probs == [0.5, 0.5]
    }
}

/// Weighted rank-one family `{u_i u_i*}` with one random variable per vector.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneInstance {
    dim: usize,
    vectors: Vec<ComplexVector>,
    rvs: Vec<DiscreteRandomVariable>,
}

impl RankOneInstance {
    pub fn new(
        dim: usize,
        vectors: Vec<ComplexVector>,
        rvs: Vec<DiscreteRandomVariable>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvariantViolation("dim: must be >= 1".into()));
        }
        if vectors.is_empty() {
            return Err(Error::InvariantViolation("vectors: need n >= 1".into()));
        }
        if vectors.len() != rvs.len() {
            return Err(Error::InvariantViolation(format!(
                "rvs: {} random variables for {} vectors",
                rvs.len(),
                vectors.len()
            )));
        }
        if let Some(i) = vectors.iter().position(|v| v.dim() != dim) {
            return Err(Error::InvariantViolation(format!(
                "vectors[{i}]: dimension differs from dim = {dim}"
            )));
        }
        if vectors
            .iter()
            .flat_map(|v| &v.0)
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::InvariantViolation(
                "vectors: entries must be finite".into(),
            ));
        }
        Ok(Self { dim, vectors, rvs })
    }

    /// Same vectors, all Rademacher.
    pub fn rademacher(dim: usize, vectors: Vec<ComplexVector>) -> Result<Self> {
        let n = vectors.len();
        Self::new(dim, vectors, vec![DiscreteRandomVariable::rademacher(); n])
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

    pub fn rvs(&self) -> &[DiscreteRandomVariable] {
        &self.rvs
    }

    pub fn outers(&self) -> Vec<HermitianMatrix> {
        self.vectors.iter().map(ComplexVector::outer).collect()
    }

    /// `Σ Var[ξ_i] (u_i u_i*)² = Σ Var[ξ_i] ‖u_i‖² u_i u_i*`.
    pub fn variance_matrix(&self) -> HermitianMatrix {
        let mut acc = HermitianMatrix::zeros(self.dim);
        for (u, rv) in self.vectors.iter().zip(&self.rvs) {
            acc.add_scaled(rv.variance() * u.norm_sqr(), &u.outer());
        }
        acc
    }

    /// `Σ u_i u_i*`.
    pub fn frame_operator(&self) -> HermitianMatrix {
        HermitianMatrix::sum_scaled(
            self.dim,
            self.outers().iter().map(|m| (1.0, m)).collect::<Vec<_>>(),
        )
    }

    pub fn all_rademacher(&self) -> bool {
        self.rvs.iter().all(DiscreteRandomVariable::is_rademacher)
    }

    pub fn to_hermitian(&self) -> HermitianInstance {
        HermitianInstance {
            dim: self.dim,
            matrices: self.outers(),
            rvs: self.rvs.clone(),
        }
    }
}

/// General Hermitian family `{A_i}` with one random variable per matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianInstance {
    dim: usize,
    matrices: Vec<HermitianMatrix>,
    rvs: Vec<DiscreteRandomVariable>,
}

impl HermitianInstance {
    pub fn new(
        dim: usize,
        matrices: Vec<HermitianMatrix>,
        rvs: Vec<DiscreteRandomVariable>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvariantViolation("dim: must be >= 1".into()));
        }
        if matrices.is_empty() {
            return Err(Error::InvariantViolation("matrices: need n >= 1".into()));
        }
        if matrices.len() != rvs.len() {
            return Err(Error::InvariantViolation(format!(
                "rvs: {} random variables for {} matrices",
                rvs.len(),
                matrices.len()
            )));
        }
        if let Some(i) = matrices.iter().position(|m| m.dim() != dim) {
            return Err(Error::InvariantViolation(format!(
                "matrices[{i}]: not {dim}x{dim}"
            )));
        }
        Ok(Self { dim, matrices, rvs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[HermitianMatrix] {
        &self.matrices
    }

    pub fn rvs(&self) -> &[DiscreteRandomVariable] {
        &self.rvs
    }

    pub fn all_rademacher(&self) -> bool {
        self.rvs.iter().all(DiscreteRandomVariable::is_rademacher)
    }

    /// `‖Σ Var[ξ_i] A_i²‖^{1/2}`.
    pub fn sigma(&self) -> f64 {
        let mut acc = HermitianMatrix::zeros(self.dim);
        for (a, rv) in self.matrices.iter().zip(&self.rvs) {
            acc.add_scaled(rv.variance(), &a.square());
        }
        spectral_norm(&acc).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    RankOne(RankOneInstance),
    Hermitian(HermitianInstance),
}

impl Instance {
    pub fn dim(&self) -> usize {
        match self {
            Instance::RankOne(r) => r.dim(),
            Instance::Hermitian(h) => h.dim(),
        }
    }

    pub fn n(&self) -> usize {
        self.rvs().len()
    }

    pub fn rvs(&self) -> &[DiscreteRandomVariable] {
        match self {
            Instance::RankOne(r) => r.rvs(),
            Instance::Hermitian(h) => h.rvs(),
        }
    }

    /// The matrices `M_j` (`u_j u_j*` for rank-one families).
    pub fn matrices(&self) -> Vec<HermitianMatrix> {
        match self {
            Instance::RankOne(r) => r.outers(),
            Instance::Hermitian(h) => h.matrices().to_vec(),
        }
    }

    pub fn sigma(&self) -> f64 {
        match self {
            Instance::RankOne(r) => sigma(r),
            Instance::Hermitian(h) => h.sigma(),
        }
    }

    pub fn as_rank_one(&self) -> Option<&RankOneInstance> {
        match self {
            Instance::RankOne(r) => Some(r),
            Instance::Hermitian(_) => None,
        }
    }
}

impl From<RankOneInstance> for Instance {
    fn from(r: RankOneInstance) -> Self {
        Instance::RankOne(r)
    }
}

impl From<HermitianInstance> for Instance {
    fn from(h: HermitianInstance) -> Self {
        Instance::Hermitian(h)
    }
}

/// One outcome per random variable, stored by index into each support.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignAssignment {
    indices: Vec<usize>,
}

impl SignAssignment {
    pub fn new(indices: Vec<usize>, rvs: &[DiscreteRandomVariable]) -> Result<Self> {
        if indices.len() != rvs.len() {
            return Err(Error::InvariantViolation(format!(
                "assignment has {} entries for {} variables",
                indices.len(),
                rvs.len()
            )));
        }
        if let Some(j) = indices.iter().zip(rvs).position(|(&i, rv)| i >= rv.len()) {
            return Err(Error::InvariantViolation(format!(
                "assignment[{j}] is outside the support"
            )));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self, rvs: &[DiscreteRandomVariable]) -> Vec<f64> {
        self.indices
            .iter()
            .zip(rvs)
            .map(|(&i, rv)| rv.support()[i])
            .collect()
    }

    /// Probability of this outcome (prefix outcomes use only the leading variables).
    pub fn probability(&self, rvs: &[DiscreteRandomVariable]) -> f64 {
        self.indices
            .iter()
            .zip(rvs)
            .map(|(&i, rv)| rv.probs()[i])
            .product()
    }
}

/// `σ = ‖Σ Var[ξ_i] (u_i u_i*)²‖^{1/2}`.
pub fn sigma(inst: &RankOneInstance) -> f64 {
    spectral_norm(&inst.variance_matrix()).sqrt()
}

/// Scales every vector by `1/√σ` so the result has `σ = 1`.
pub fn normalize(inst: &RankOneInstance) -> Result<RankOneInstance> {
    let s = sigma(inst);
    let scale = inst
        .vectors
        .iter()
        .fold(0.0f64, |acc, u| acc.max(u.norm_sqr()));
    if s <= 1e-14 * scale.max(f64::MIN_POSITIVE) || s == 0.0 {
        return Err(Error::DegenerateSigma(s));
    }
    let f = 1.0 / s.sqrt();
    RankOneInstance::new(
        inst.dim,
        inst.vectors.iter().map(|u| u.scaled(f)).collect(),
        inst.rvs.clone(),
    )
}

// --- JSON -----------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RvFile {
    support: Vec<f64>,
    probs: Vec<f64>,
}

type Entry = [f64; 2];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    dim: usize,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vectors: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrices: Option<Vec<Vec<Vec<Entry>>>>,
    rvs: Vec<RvFile>,
}

fn entry(z: &C64) -> Entry {
    [z.re, z.im]
}

fn complex(e: &Entry) -> C64 {
    C64::new(e[0], e[1])
}

impl Instance {
    /// Canonical serialization: keys in schema order, shortest round-trip numbers.
    pub fn to_json(&self) -> String {
        let rv_file = |rv: &DiscreteRandomVariable| RvFile {
            support: rv.support.clone(),
            probs: rv.probs.clone(),
        };
        let file = match self {
            Instance::RankOne(r) => InstanceFile {
                dim: r.dim,
                kind: "rank_one".into(),
                vectors: Some(
                    r.vectors
                        .iter()
                        .map(|v| v.0.iter().map(entry).collect())
                        .collect(),
                ),
                matrices: None,
                rvs: r.rvs.iter().map(rv_file).collect(),
            },
            Instance::Hermitian(h) => InstanceFile {
                dim: h.dim,
                kind: "hermitian".into(),
                vectors: None,
                matrices: Some(
                    h.matrices
                        .iter()
                        .map(|m| {
                            let a = m.as_matrix();
                            (0..h.dim)
                                .map(|i| (0..h.dim).map(|j| entry(&a[(i, j)])).collect())
                                .collect()
                        })
                        .collect(),
                ),
                rvs: h.rvs.iter().map(rv_file).collect(),
            },
        };
        serde_json::to_string(&file).expect("instance serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        let rvs = file
            .rvs
            .into_iter()
            .enumerate()
            .map(|(i, rv)| {
                DiscreteRandomVariable::new(rv.support, rv.probs).map_err(|e| match e {
                    Error::InvariantViolation(m) => {
                        Error::InvariantViolation(format!("rvs[{i}].{m}"))
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        match file.kind.as_str() {
            "rank_one" => {
                if file.matrices.is_some() {
                    return Err(Error::InvariantViolation(
                        "matrices: not allowed for kind rank_one".into(),
                    ));
                }
                let vectors = file
                    .vectors
                    .ok_or_else(|| {
                        Error::InvariantViolation("vectors: missing for kind rank_one".into())
                    })?
                    .into_iter()
                    .map(|v| ComplexVector::new(v.iter().map(complex).collect()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(RankOneInstance::new(file.dim, vectors, rvs)?.into())
            }
            "hermitian" => {
                if file.vectors.is_some() {
                    return Err(Error::InvariantViolation(
                        "vectors: not allowed for kind hermitian".into(),
                    ));
                }
                let matrices = file
                    .matrices
                    .ok_or_else(|| {
                        Error::InvariantViolation("matrices: missing for kind hermitian".into())
                    })?
                    .into_iter()
                    .enumerate()
                    .map(|(i, rows)| {
                        let rows: Vec<Vec<C64>> = rows
                            .iter()
                            .map(|r| r.iter().map(complex).collect())
                            .collect();
                        HermitianMatrix::from_rows(&rows)
                            .map_err(|e| Error::InvariantViolation(format!("matrices[{i}]: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(HermitianInstance::new(file.dim, matrices, rvs)?.into())
            }
            other => Err(Error::InvariantViolation(format!(
                "kind: expected \"rank_one\" or \"hermitian\", got {other:?}"
            ))),
        }
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    Instance::from_json(&std::fs::read_to_string(path)?)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, inst.to_json())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    pub(crate) fn mercedes_benz() -> RankOneInstance {
        let s3 = 3f64.sqrt() / 2.0;
        RankOneInstance::rademacher(
            2,
            vec![
                ComplexVector::from_real(&[0.0, 1.0]),
                ComplexVector::from_real(&[-s3, -0.5]),
                ComplexVector::from_real(&[s3, -0.5]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rv_moments() {
        let r = DiscreteRandomVariable::rademacher();
        assert_eq!(r.mean(), 0.0);
        assert_eq!(r.variance(), 1.0);
        let b = DiscreteRandomVariable::bernoulli(0.25).unwrap();
        assert_abs_diff_eq!(b.mean(), 0.25);
        assert_abs_diff_eq!(b.variance(), 0.1875, epsilon = 1e-15);
        assert_eq!(
            DiscreteRandomVariable::bernoulli(0.0).unwrap().support(),
            &[0.0]
        );
        assert_eq!(
            DiscreteRandomVariable::bernoulli(1.0).unwrap().support(),
            &[1.0]
        );
    }

    #[test]
    fn rv_invariants() {
        let err = DiscreteRandomVariable::new(vec![0.0, 1.0], vec![0.5, 0.4]).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation(m) if m.starts_with("probs")));
        assert!(DiscreteRandomVariable::new(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(DiscreteRandomVariable::new(vec![], vec![]).is_err());
        assert!(DiscreteRandomVariable::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn sigma_examples() {
        let one =
            RankOneInstance::rademacher(2, vec![ComplexVector::from_real(&[1.0, 0.0])]).unwrap();
        assert_eq!(sigma(&one), 1.0);
        let consts = RankOneInstance::new(
            2,
            vec![
                ComplexVector::from_real(&[1.0, 2.0]),
                ComplexVector::from_real(&[0.5, -1.0]),
            ],
            vec![
                DiscreteRandomVariable::constant(0.3),
                DiscreteRandomVariable::constant(-2.0),
            ],
        )
        .unwrap();
        assert_eq!(sigma(&consts), 0.0);
        assert!(matches!(normalize(&consts), Err(Error::DegenerateSigma(_))));
        assert_abs_diff_eq!(sigma(&mercedes_benz()).powi(2), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn normalize_scaling_law() {
        // σ(c u) = c² σ(u): σ = 4 for u = 2 e1 under Rademacher
        let inst =
            RankOneInstance::rademacher(2, vec![ComplexVector::from_real(&[2.0, 0.0])]).unwrap();
        assert_abs_diff_eq!(sigma(&inst), 4.0, epsilon = 1e-14);
        let n = normalize(&inst).unwrap();
        assert_abs_diff_eq!(n.vectors()[0].0[0].re, 1.0, epsilon = 1e-14);
        let again = normalize(&n).unwrap();
        for (a, b) in again.vectors().iter().zip(n.vectors()) {
            for (x, y) in a.0.iter().zip(&b.0) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn json_round_trip_and_errors() {
        let inst: Instance = mercedes_benz().into();
        let text = inst.to_json();
        assert!(text.starts_with("{\"dim\":2,\"kind\":\"rank_one\",\"vectors\":"));
        let back = Instance::from_json(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_json(), text);

        let bad = r#"{"dim":1,"kind":"rank_one","vectors":[[[1,0]]],"rvs":[{"support":[0,1],"probs":[0.5,0.4]}]}"#;
        let err = Instance::from_json(bad).unwrap_err();
        assert!(
            matches!(err, Error::InvariantViolation(ref m) if m.contains("probs")),
            "{err}"
        );

        let unknown = r#"{"dim":1,"kind":"rank_one","vectors":[[[1,0]]],"rvs":[],"extra":1}"#;
        assert!(matches!(
            Instance::from_json(unknown),
            Err(Error::Parse { .. })
        ));

        let herm = HermitianInstance::new(
            2,
            vec![HermitianMatrix::diag(&[1.0, -1.0])],
            vec![DiscreteRandomVariable::rademacher()],
        )
        .unwrap();
        let inst: Instance = herm.into();
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }
}
