//! Real-coefficient univariate polynomials: arithmetic, companion-matrix roots,
//! real-rootedness and interlacing tests, and Chebyshev interpolation.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use nalgebra::{DMatrix, DVector, Schur};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;

/// Default real-rootedness tolerance.
pub const DEFAULT_ROOT_TOL: f64 = 1e-7;

/// Number of simplex samples used by [`has_common_interlacing`].
/// Roots closer than this (relative to the root scale) form one cluster.
const CLUSTER_RTOL: f64 = 1e-2;

/// Coefficient noise level assumed when judging the spread of a root cluster.
const CLUSTER_COEFF_RTOL: f64 = 1e-10;

pub const COMMON_INTERLACING_SAMPLES: usize = 64;

const TRIM_RTOL: f64 = 1e-14;

/// Dense polynomial with coefficients in ascending degree order.
///
/// The leading coefficient is trimmed at `1e-14 * max|coeff|`; the zero
/// polynomial is stored as `[0.0]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        let scale = coeffs.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= TRIM_RTOL * scale) {
            coeffs.pop();
        }
        if coeffs.is_empty() || scale == 0.0 {
            coeffs = vec![0.0];
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        Self { coeffs: c }
    }

    /// Monic polynomial `Π (x - r)`.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (k, &a) in c.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= r * a;
            }
            c = next;
        }
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    /// Coefficient of `x^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |acc, c| acc.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
                .collect(),
        )
    }

    /// Zeroes odd-degree coefficients.
    pub fn even_part(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 1 { 0.0 } else { c })
                .collect(),
        )
    }

    /// In-place `self += other` without re-trimming (for exact accumulation).
    pub fn accumulate(&mut self, other: &Poly) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0.0);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn trimmed(self) -> Self {
        Self::new(self.coeffs)
    }

    /// Substitute `x -> (x - center) / radius`.
    pub fn compose_affine(&self, center: f64, radius: f64) -> Self {
        let lin = Poly {
            coeffs: vec![-center / radius, 1.0 / radius],
        };
        let mut acc = Poly::zero();
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Poly::constant(c);
        }
        acc
    }

    /// Number of exact zero low-order coefficients (roots at the origin).
    fn zero_root_multiplicity(&self) -> usize {
        self.coeffs.iter().take_while(|&&c| c == 0.0).count()
    }

    /// All complex roots, via eigenvalues of the balanced companion matrix.
    ///
    /// Exact zero low-order coefficients are deflated first and reported as
    /// exact zero roots. Isolated roots are polished with guarded Newton
    /// steps; members of a numerical cluster are left as computed.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let mut out = Vec::with_capacity(self.degree());
        for c in self.root_clusters()? {
            if c.multiplicity == 1 || c.coincident {
                out.extend(std::iter::repeat_n(c.center, c.multiplicity));
            } else {
                out.extend_from_slice(&c.members);
            }
        }
        Ok(out)
    }

    fn raw_roots(&self) -> Result<(Vec<C64>, Vec<C64>)> {
        let deg = self.degree();
        if deg == 0 {
            return Err(Error::DegreeZero);
        }
        let zeros = self.zero_root_multiplicity();
        let reduced = &self.coeffs[zeros..];
        let m = reduced.len() - 1;
        if m == 0 {
            return Ok((vec![C64::new(0.0, 0.0); zeros], Vec::new()));
        }
        let lead = reduced[m];
        let mut comp = DMatrix::<f64>::zeros(m, m);
        for i in 1..m {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..m {
            comp[(i, m - 1)] = -reduced[i] / lead;
        }
        balance(&mut comp);
        let eig: Vec<C64> = match Schur::try_new(comp, f64::EPSILON, 100 * m.max(10)) {
            Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
            None => aberth(reduced),
        };
        Ok((vec![C64::new(0.0, 0.0); zeros], eig))
    }

    /// Roots grouped into numerical clusters.
    ///
    /// A root of multiplicity `m` is computed only to about `eps^(1/m)`, but
    /// the centroid of its cluster is accurate to about `eps`. Roots closer
    /// than `CLUSTER_RTOL * scale` are linked.
    pub fn root_clusters(&self) -> Result<Vec<RootCluster>> {
        let (zeros, raw) = self.raw_roots()?;
        let mut clusters = Vec::new();
        if !zeros.is_empty() {
            clusters.push(RootCluster {
                center: C64::new(0.0, 0.0),
                multiplicity: zeros.len(),
                members: zeros,
                coincident: true,
            });
        }
        if raw.is_empty() {
            return Ok(clusters);
        }
        let scale = 1.0 + raw.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        let link = CLUSTER_RTOL * scale;
        let mut label: Vec<usize> = (0..raw.len()).collect();
        fn find(label: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while label[r] != r {
                r = label[r];
            }
            label[i] = r;
            r
        }
        for i in 0..raw.len() {
            for j in (i + 1)..raw.len() {
                if (raw[i] - raw[j]).norm() <= link {
                    let (a, b) = (find(&mut label, i), find(&mut label, j));
                    label[a.max(b)] = a.min(b);
                }
            }
        }
        let reduced = Poly {
            coeffs: self.coeffs[self.zero_root_multiplicity()..].to_vec(),
        };
        let dp = reduced.derivative();
        let mut groups: Vec<Vec<C64>> = Vec::new();
        let mut slot = vec![usize::MAX; raw.len()];
        for (i, &z) in raw.iter().enumerate() {
            let r = find(&mut label, i);
            if slot[r] == usize::MAX {
                slot[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[r]].push(z);
        }
        for members in groups {
            let m = members.len();
            let (center, coincident) = if m == 1 {
                (polish(&reduced, &dp, members[0]), false)
            } else {
                let c = members.iter().sum::<C64>() / m as f64;
                let allowed = CLUSTER_COEFF_RTOL.powf(1.0 / m as f64) * scale;
                let coincident = members.iter().all(|z| (z - c).norm() <= allowed);
                if coincident && c.im.abs() <= allowed {
                    // a self-conjugate cluster: one real root of multiplicity m,
                    // a simple root of the (m-1)-th derivative
                    let mut g = reduced.clone();
                    for _ in 0..(m - 1) {
                        g = g.derivative();
                    }
                    (C64::new(refine_real_root(&g, c.re), 0.0), true)
                } else {
                    (c, coincident)
                }
            };
            clusters.push(RootCluster {
                center,
                multiplicity: m,
                members,
                coincident,
            });
        }
        Ok(clusters)
    }

    /// Clusters, or the offending imaginary part if some cluster is not real.
    fn real_clusters(&self, tol: f64) -> Result<Vec<RootCluster>> {
        let clusters = self.root_clusters()?;
        let scale = 1.0
            + clusters
                .iter()
                .fold(0.0f64, |acc, c| acc.max(c.center.re.abs()));
        let bound = tol * scale;
        for c in &clusters {
            let worst = if c.coincident {
                c.center.im.abs()
            } else {
                c.members
                    .iter()
                    .fold(c.center.im.abs(), |acc, z| acc.max(z.im.abs()))
            };
            if worst > bound {
                return Err(Error::NotRealRooted { imag: worst, bound });
            }
        }
        Ok(clusters)
    }

    /// Largest root of a real-rooted polynomial.
    pub fn lambda_max(&self, tol: f64) -> Result<f64> {
        let clusters = self.real_clusters(tol)?;
        let top = clusters
            .iter()
            .flat_map(RootCluster::real_parts)
            .fold(f64::NEG_INFINITY, f64::max);
        let from_coincident = clusters.iter().any(|c| c.coincident && c.center.re == top);
        if from_coincident {
            Ok(top)
        } else {
            Ok(refine_real_root(self, top))
        }
    }

    pub fn is_real_rooted(&self, tol: f64) -> bool {
        if self.is_zero() {
            return false;
        }
        if self.degree() == 0 {
            return true;
        }
        self.real_clusters(tol).is_ok()
    }

    /// Sorted real roots with multiplicity, or `None` if some root is not real within `tol`.
    pub fn real_roots(&self, tol: f64) -> Option<Vec<f64>> {
        if self.degree() == 0 {
            return Some(Vec::new());
        }
        let clusters = self.real_clusters(tol).ok()?;
        let mut re: Vec<f64> = clusters.iter().flat_map(RootCluster::real_parts).collect();
        re.sort_by(f64::total_cmp);
        Some(re)
    }
}

/// A group of numerically coincident roots.
#[derive(Clone, Debug)]
pub struct RootCluster {
    pub center: C64,
    pub multiplicity: usize,
    pub members: Vec<C64>,
    /// Whether the spread is consistent with one multiple root.
    pub coincident: bool,
}

impl RootCluster {
    /// Real parts with multiplicity: the centroid for a multiple root, else each member.
    pub fn real_parts(&self) -> Vec<f64> {
        if self.coincident {
            vec![self.center.re; self.multiplicity]
        } else if self.multiplicity == 1 {
            vec![self.center.re]
        } else {
            self.members.iter().map(|z| z.re).collect()
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// Parlett–Reinsch diagonal balancing (radix 2, so it is exact).
fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            let mut cc = c;
            while cc < g {
                f *= radix;
                cc *= radix * radix;
            }
            g = r * radix;
            while cc > g {
                f /= radix;
                cc /= radix * radix;
            }
            if c * f + r / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Aberth–Ehrlich simultaneous iteration, used when the QR iteration stalls.
fn aberth(coeffs: &[f64]) -> Vec<C64> {
    let m = coeffs.len() - 1;
    let p = Poly {
        coeffs: coeffs.to_vec(),
    };
    let dp = p.derivative();
    let lead = coeffs[m].abs();
    let radius = 1.0 + coeffs[..m].iter().fold(0.0f64, |acc, c| acc.max(c.abs())) / lead;
    let mut z: Vec<C64> = (0..m)
        .map(|k| C64::from_polar(0.5 * radius, 2.0 * PI * k as f64 / m as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..m {
            let v = p.eval_complex(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dp.eval_complex(z[i]);
            let repulsion: C64 = (0..m)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn polish(p: &Poly, dp: &Poly, mut z: C64) -> C64 {
    let mut val = p.eval_complex(z).norm();
    for _ in 0..8 {
        let d = dp.eval_complex(z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - p.eval_complex(z) / d;
        let next_val = p.eval_complex(next).norm();
        if next_val < val {
            z = next;
            val = next_val;
        } else {
            break;
        }
    }
    z
}

/// Newton refinement of a real root estimate, accepting only improving steps.
fn refine_real_root(p: &Poly, mut x: f64) -> f64 {
    let dp = p.derivative();
    let mut val = p.eval(x).abs();
    for _ in 0..30 {
        let d = dp.eval(x);
        if d == 0.0 || val == 0.0 {
            break;
        }
        let next = x - p.eval(x) / d;
        let next_val = p.eval(next).abs();
        if next_val < val {
            x = next;
            val = next_val;
        } else {
            break;
        }
    }
    x
}

pub fn roots(p: &Poly) -> Result<Vec<C64>> {
    p.roots()
}

pub fn lambda_max(p: &Poly, tol: f64) -> Result<f64> {
    p.lambda_max(tol)
}

pub fn is_real_rooted(p: &Poly, tol: f64) -> bool {
    p.is_real_rooted(tol)
}

/// Whether `g` interlaces `p`: `β1 ≤ α1 ≤ β2 ≤ … ≤ α(n-1) ≤ βn` within `tol` slack.
pub fn interlaces(g: &Poly, p: &Poly, tol: f64) -> Result<bool> {
    if g.degree() + 1 != p.degree() {
        return Err(Error::DegreeMismatch(format!(
            "interlacer degree {} must be one less than {}",
            g.degree(),
            p.degree()
        )));
    }
    let (Some(alpha), Some(beta)) = (g.real_roots(tol), p.real_roots(tol)) else {
        return Ok(false);
    };
    let scale = 1.0
        + alpha
            .iter()
            .chain(&beta)
            .fold(0.0f64, |acc, r| acc.max(r.abs()));
    let slack = tol * scale;
    Ok(alpha
        .iter()
        .enumerate()
        .all(|(i, a)| beta[i] <= a + slack && *a <= beta[i + 1] + slack))
}

/// Sampled common-interlacing test: every polynomial, and every convex
/// combination at `samples` deterministic simplex points, must be real-rooted.
pub fn has_common_interlacing(ps: &[Poly], samples: usize, tol: f64) -> bool {
    if ps.iter().any(|p| !p.is_real_rooted(tol)) {
        return false;
    }
    if ps.len() < 2 {
        return true;
    }
    simplex_points(ps.len(), samples).iter().all(|mu| {
        let mut combo = Poly::zero();
        for (w, p) in mu.iter().zip(ps) {
            combo.accumulate(&p.scale(*w));
        }
        combo.trimmed().is_real_rooted(tol)
    })
}

/// Deterministic points on the `(m-1)`-simplex from a Halton sequence
/// pushed through normalized exponential spacings.
pub fn simplex_points(m: usize, count: usize) -> Vec<Vec<f64>> {
    const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    (1..=count as u64)
        .map(|idx| {
            let w: Vec<f64> = (0..m)
                .map(|j| -radical_inverse(idx, PRIMES[j % PRIMES.len()]).ln())
                .collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        })
        .collect()
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Chebyshev interpolant of a degree-`degree` polynomial function, expressed in the
/// local variable `s = (x - center) / radius`.
#[derive(Clone, Debug)]
pub struct Interpolant {
    pub center: f64,
    pub radius: f64,
    pub local: Poly,
}

impl Interpolant {
    pub fn fit(degree: usize, center: f64, radius: f64, mut f: impl FnMut(f64) -> f64) -> Self {
        let m = degree + 1;
        let nodes: Vec<f64> = (0..m)
            .map(|j| (PI * (2 * j + 1) as f64 / (2 * m) as f64).cos())
            .collect();
        let values = DVector::from_iterator(m, nodes.iter().map(|&s| f(center + radius * s)));
        let vander = DMatrix::from_fn(m, m, |i, k| nodes[i].powi(k as i32));
        let coeffs = vander
            .lu()
            .solve(&values)
            .expect("Chebyshev Vandermonde is nonsingular");
        Self {
            center,
            radius,
            local: Poly {
                coeffs: coeffs.iter().copied().collect(),
            },
        }
    }

    /// `k`-th derivative at the center.
    pub fn derivative_at_center(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.local.coeff(k) * fact / self.radius.powi(k as i32)
    }

    pub fn value_at_center(&self) -> f64 {
        self.local.coeff(0)
    }

    /// The interpolant in the original variable `x`.
    pub fn to_global(&self) -> Poly {
        self.local.compose_affine(self.center, self.radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sorted_re(p: &Poly) -> Vec<f64> {
        let mut r: Vec<f64> = p.roots().unwrap().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        r
    }

    #[test]
    fn root_examples() {
        assert_eq!(sorted_re(&Poly::new(vec![-1.0, 0.0, 1.0])), vec![-1.0, 1.0]);
        assert_eq!(sorted_re(&Poly::monomial(3)), vec![0.0, 0.0, 0.0]);
        let r = sorted_re(&Poly::from_roots(&[1.0, 2.0, 3.0]));
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-10);
        }
        assert!(matches!(
            Poly::constant(2.0).roots(),
            Err(Error::DegreeZero)
        ));
    }

    #[test]
    fn lambda_max_examples() {
        assert_abs_diff_eq!(
            Poly::new(vec![-4.0, 0.0, 1.0]).lambda_max(1e-7).unwrap(),
            2.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            Poly::new(vec![1.0, -2.0, 1.0]).lambda_max(1e-7).unwrap(),
            1.0,
            epsilon = 1e-7
        );
        assert!(matches!(
            Poly::new(vec![1.0, 0.0, 1.0]).lambda_max(1e-7),
            Err(Error::NotRealRooted { .. })
        ));
    }

    #[test]
    fn real_rootedness_examples() {
        assert!(!Poly::new(vec![1.0, 0.0, 1.0]).is_real_rooted(1e-7));
        assert!(Poly::new(vec![-1.0, 0.0, 1.0]).is_real_rooted(1e-7));
    }

    #[test]
    fn interlacing_examples() {
        let p = Poly::new(vec![-1.0, 0.0, 1.0]);
        assert!(interlaces(&Poly::monomial(1), &p, 1e-9).unwrap());
        assert!(!interlaces(&Poly::new(vec![-5.0, 1.0]), &p, 1e-9).unwrap());
        assert!(matches!(
            interlaces(&p, &p, 1e-9),
            Err(Error::DegreeMismatch(_))
        ));
    }

    #[test]
    fn common_interlacing_examples() {
        let a = Poly::new(vec![-1.0, 0.0, 1.0]);
        let b = Poly::new(vec![-4.0, 0.0, 1.0]);
        assert!(has_common_interlacing(&[a.clone(), b], 64, 1e-7));
        let c = Poly::from_roots(&[1.0, 3.0]);
        let d = Poly::from_roots(&[2.0, 4.0]);
        assert!(has_common_interlacing(&[c, d], 64, 1e-7));
        assert!(!has_common_interlacing(
            &[a, Poly::new(vec![1.0, 0.0, 1.0])],
            64,
            1e-7
        ));
        // roots 0,1 and 2,3 share no interlacer: (x)(x-1)+(x-2)(x-3) has complex roots
        let e = Poly::from_roots(&[0.0, 1.0]);
        let f = Poly::from_roots(&[2.0, 3.0]);
        assert!(!has_common_interlacing(&[e, f], 64, 1e-7));
    }

    #[test]
    fn interpolant_recovers_polynomial() {
        let p = Poly::new(vec![0.5, -1.0, 2.0, 0.25, -0.125]);
        let fit = Interpolant::fit(4, 0.3, 2.0, |x| p.eval(x));
        let g = fit.to_global();
        for k in 0..=4 {
            assert_abs_diff_eq!(g.coeff(k), p.coeff(k), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(
            fit.derivative_at_center(1),
            p.derivative().eval(0.3),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            fit.derivative_at_center(2),
            p.derivative().derivative().eval(0.3),
            epsilon = 1e-11
        );
    }

    #[test]
    fn reflect_and_even_part() {
        let p = Poly::new(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(p.reflect().coeffs(), &[1.0, -2.0, 3.0, -4.0]);
        assert_eq!(p.even_part().coeffs(), &[1.0, 0.0, 3.0]);
    }

    proptest! {
        #[test]
        fn roots_invert_expansion(mut rs in prop::collection::vec(-3.0f64..3.0, 1..7)) {
            // separated roots keep the companion problem well conditioned
            rs.sort_by(f64::total_cmp);
            rs.dedup_by(|a, b| (*a - *b).abs() < 0.05);
            let p = Poly::from_roots(&rs);
            let got = sorted_re(&p);
            for (a, b) in got.iter().zip(&rs) {
                prop_assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            }
        }

        #[test]
        fn derivative_interlaces_real_rooted(mut rs in prop::collection::vec(-3.0f64..3.0, 2..7)) {
            rs.sort_by(f64::total_cmp);
            rs.dedup_by(|a, b| (*a - *b).abs() < 0.05);
            prop_assume!(rs.len() >= 2);
            let p = Poly::from_roots(&rs);
            prop_assert!(interlaces(&p.derivative(), &p, 1e-7).unwrap());
            let lg = p.derivative().lambda_max(1e-7).unwrap();
            prop_assert!(lg <= p.lambda_max(1e-7).unwrap() + 1e-7);
            prop_assert!(has_common_interlacing(std::slice::from_ref(&p), 8, 1e-7));
        }
    }

    #[test]
    fn multiple_roots_cluster() {
        let p = Poly::from_roots(&[1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]);
        assert!(p.is_real_rooted(1e-7));
        assert_abs_diff_eq!(p.lambda_max(1e-7).unwrap(), 1.0, epsilon = 1e-10);
        let r = p.real_roots(1e-7).unwrap();
        assert_eq!(r.len(), 8);
        let q = Poly::new(vec![1e-6, 0.0, 1.0]);
        assert!(!q.is_real_rooted(1e-7));
        let close = Poly::from_roots(&[1.0, 1.004, -3.0]);
        assert_abs_diff_eq!(close.lambda_max(1e-7).unwrap(), 1.004, epsilon = 1e-10);
    }
}
