//! Dense complex Hermitian linear algebra.
//!
//! Eigenvalues come from nalgebra's Hermitian eigensolver (Householder
//! tridiagonalization followed by implicit QR). Characteristic polynomials of
//! small Gaussian-integer matrices are expanded exactly with Berkowitz's
//! division-free recurrence; everything else goes through the spectrum.

use nalgebra::{Cholesky, Complex, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rpoly::Poly;

pub type C64 = Complex<f64>;

/// Relative tolerance of the conjugate-symmetry check.
pub const HERMITIAN_RTOL: f64 = 1e-12;

/// Largest dimension routed through the exact integer characteristic polynomial.
pub const EXACT_CHARPOLY_MAX_DIM: usize = 8;

/// Eigenvalues below this fraction of the spectral radius are treated as exact
/// zeros when assembling characteristic polynomials.
const ZERO_EIGEN_RTOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexVector(pub Vec<C64>);

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvariantViolation("vector dim must be >= 1".into()));
        }
        Ok(Self(entries))
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    pub fn to_dvector(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.0)
    }

    /// `u u*` as a Hermitian matrix.
    pub fn outer(&self) -> HermitianMatrix {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| self.0[i] * self.0[j].conj());
        HermitianMatrix(m)
    }
}

/// A complex Hermitian matrix; construction checks and symmetrizes.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(DMatrix<C64>);

impl HermitianMatrix {
    /// Checks `|m_ji - conj(m_ij)| <= 1e-12 * max|m|` and stores `(M + M*)/2`.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "expected a nonempty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tolerance = HERMITIAN_RTOL * scale;
        let d = m.nrows();
        let mut asymmetry = 0.0f64;
        for i in 0..d {
            for j in 0..=i {
                asymmetry = asymmetry.max((m[(j, i)] - m[(i, j)].conj()).norm());
            }
        }
        if asymmetry > tolerance || !asymmetry.is_finite() {
            return Err(Error::NonHermitianInput {
                asymmetry,
                tolerance,
            });
        }
        let adj = m.adjoint();
        Ok(Self((m + adj).scale(0.5)))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch(
                "matrix rows must have length dim".into(),
            ));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(d: usize) -> Self {
        Self(DMatrix::zeros(d, d))
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn diag(values: &[f64]) -> Self {
        let d = values.len();
        Self(DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    /// `self += s * other`; real scalings of Hermitian sums stay exactly Hermitian.
    pub fn add_scaled(&mut self, s: f64, other: &HermitianMatrix) {
        self.0.zip_apply(&other.0, |a, b| *a += b * s);
    }

    pub fn sum_scaled<'a>(
        d: usize,
        terms: impl IntoIterator<Item = (f64, &'a HermitianMatrix)>,
    ) -> Self {
        let mut acc = Self::zeros(d);
        for (s, m) in terms {
            acc.add_scaled(s, m);
        }
        acc
    }

    /// Matrix square, `M²`, symmetrized.
    pub fn square(&self) -> Self {
        let sq = &self.0 * &self.0;
        let adj = sq.adjoint();
        Self((sq + adj).scale(0.5))
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Conjugation `U* M U` by a unitary.
    pub fn conjugate_by(&self, u: &DMatrix<C64>) -> Self {
        let m = u.adjoint() * &self.0 * u;
        let adj = m.adjoint();
        Self((m + adj).scale(0.5))
    }

    fn gaussian_integer_entries(&self) -> Option<Vec<Vec<(i128, i128)>>> {
        let d = self.dim();
        let mut rows = Vec::with_capacity(d);
        for i in 0..d {
            let mut row = Vec::with_capacity(d);
            for j in 0..d {
                let z = self.0[(i, j)];
                if z.re.fract() != 0.0
                    || z.im.fract() != 0.0
                    || z.re.abs() > 1e15
                    || z.im.abs() > 1e15
                {
                    return None;
                }
                row.push((z.re as i128, z.im as i128));
            }
            rows.push(row);
        }
        Some(rows)
    }
}

/// Spectral decomposition with ascending eigenvalues and matching unit eigenvectors (columns).
pub fn eigh(m: &HermitianMatrix) -> (Vec<f64>, DMatrix<C64>) {
    let eig = m.0.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.dim(), m.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn eigvals_hermitian(m: &HermitianMatrix) -> Vec<f64> {
    let mut values: Vec<f64> =
        m.0.clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
    values.sort_by(f64::total_cmp);
    values
}

pub fn spectral_norm(m: &HermitianMatrix) -> f64 {
    eigvals_hermitian(m)
        .iter()
        .fold(0.0, |acc, l| acc.max(l.abs()))
}

/// Order of a Schatten norm: finite `p >= 1` or infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchattenOrder {
    Finite(f64),
    Infinity,
}

impl SchattenOrder {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(Self::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Self::Finite(p))
        } else {
            Err(Error::InvalidOrder(p))
        }
    }
}

/// `(Σ s_i^p)^(1/p)` over singular values `s_i = |λ_i|`.
pub fn schatten_norm(m: &HermitianMatrix, p: f64) -> Result<f64> {
    Ok(schatten_from_eigs(
        &eigvals_hermitian(m),
        SchattenOrder::new(p)?,
    ))
}

pub fn schatten_from_eigs(eigs: &[f64], order: SchattenOrder) -> f64 {
    match order {
        SchattenOrder::Infinity => eigs.iter().fold(0.0, |acc, l| acc.max(l.abs())),
        SchattenOrder::Finite(p) => {
            let top = eigs.iter().fold(0.0, |acc: f64, l| acc.max(l.abs()));
            if top == 0.0 {
                return 0.0;
            }
            // scaled to avoid overflow for large p
            let s: f64 = eigs.iter().map(|l| (l.abs() / top).powf(p)).sum();
            top * s.powf(1.0 / p)
        }
    }
}

/// `det(xI - M)`, monic of degree `d`.
pub fn charpoly(m: &HermitianMatrix) -> Poly {
    if m.dim() <= EXACT_CHARPOLY_MAX_DIM {
        if let Some(exact) = charpoly_exact(m) {
            return Poly::new(exact.into_iter().map(|c| c as f64).collect());
        }
    }
    let eigs = eigvals_hermitian(m);
    let radius = eigs.iter().fold(0.0, |acc: f64, l| acc.max(l.abs()));
    let roots: Vec<f64> = eigs
        .into_iter()
        .map(|l| {
            if l.abs() <= ZERO_EIGEN_RTOL * radius {
                0.0
            } else {
                l
            }
        })
        .collect();
    Poly::from_roots(&roots)
}

/// Exact integer characteristic polynomial, when the matrix has integer entries.
pub fn charpoly_exact(m: &HermitianMatrix) -> Option<Vec<i128>> {
    let entries = m.gaussian_integer_entries()?;
    let d = entries.len();
    let desc = berkowitz_desc(&entries)?;
    // Hermitian ⇒ real coefficients
    if desc.iter().any(|c| c.1 != 0) {
        return None;
    }
    Some((0..=d).map(|k| desc[d - k].0).collect())
}

type Gi = (i128, i128);

fn gmul(a: Gi, b: Gi) -> Option<Gi> {
    let re = a.0.checked_mul(b.0)?.checked_sub(a.1.checked_mul(b.1)?)?;
    let im = a.0.checked_mul(b.1)?.checked_add(a.1.checked_mul(b.0)?)?;
    Some((re, im))
}

fn gadd(a: Gi, b: Gi) -> Option<Gi> {
    Some((a.0.checked_add(b.0)?, a.1.checked_add(b.1)?))
}

/// Berkowitz recurrence; returns `det(xI - M)` coefficients in descending order.
fn berkowitz_desc(m: &[Vec<Gi>]) -> Option<Vec<Gi>> {
    let n = m.len();
    if n == 0 {
        return Some(vec![(1, 0)]);
    }
    if n == 1 {
        return Some(vec![(1, 0), (-m[0][0].0, -m[0][0].1)]);
    }
    let a = m[0][0];
    let row: Vec<Gi> = m[0][1..].to_vec();
    let col: Vec<Gi> = m[1..].iter().map(|r| r[0]).collect();
    let sub: Vec<Vec<Gi>> = m[1..].iter().map(|r| r[1..].to_vec()).collect();

    // diags = [1, -a, -R C, -R A C, -R A^2 C, ...]
    let mut diags = vec![(1, 0), (-a.0, -a.1)];
    let mut v = col;
    for step in 0..(n - 1) {
        let mut dot = (0i128, 0i128);
        for (r, x) in row.iter().zip(&v) {
            dot = gadd(dot, gmul(*r, *x)?)?;
        }
        diags.push((-dot.0, -dot.1));
        if step + 1 < n - 1 {
            let mut next = vec![(0i128, 0i128); n - 1];
            for (i, out) in next.iter_mut().enumerate() {
                for (j, x) in v.iter().enumerate() {
                    *out = gadd(*out, gmul(sub[i][j], *x)?)?;
                }
            }
            v = next;
        }
    }
    let inner = berkowitz_desc(&sub)?;
    // (n+1) x n lower-triangular Toeplitz times inner (length n)
    let mut out = vec![(0i128, 0i128); n + 1];
    for (i, o) in out.iter_mut().enumerate() {
        for (j, c) in inner.iter().enumerate() {
            if i >= j {
                *o = gadd(*o, gmul(diags[i - j], *c)?)?;
            }
        }
    }
    Some(out)
}

/// Complex determinant by partial-pivot LU.
pub fn det(m: &DMatrix<C64>) -> C64 {
    m.clone().lu().determinant()
}

pub fn det_real(m: &DMatrix<f64>) -> f64 {
    m.clone().lu().determinant()
}

/// Cholesky factor of a positive definite Hermitian matrix, or `None`.
///
/// Complex square roots never fail, so every pivot is checked to be real and positive.
pub fn cholesky_pd(m: DMatrix<C64>) -> Option<Cholesky<C64, Dyn>> {
    let chol = Cholesky::new(m)?;
    let ok = chol
        .l_dirty()
        .diagonal()
        .iter()
        .all(|p| p.re > 0.0 && p.im.abs() <= 1e-10 * p.re && p.re.is_finite());
    ok.then_some(chol)
}

/// Whether a Hermitian matrix is positive definite.
pub fn is_positive_definite(m: &HermitianMatrix) -> bool {
    cholesky_pd(m.0.clone()).is_some()
}

/// PSD square root by eigendecomposition; eigenvalues in `[-1e-10·scale, 0)` are clamped.
pub fn psd_sqrt(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let (values, vectors) = eigh(m);
    let scale = values.iter().fold(1.0f64, |acc, l| acc.max(l.abs()));
    if let Some(&min) = values.first() {
        if min < -1e-10 * scale {
            return Err(Error::NotPsd(min));
        }
    }
    let roots: Vec<C64> = values
        .iter()
        .map(|&l| C64::new(l.max(0.0).sqrt(), 0.0))
        .collect();
    let d = m.dim();
    let diag = DMatrix::from_fn(
        d,
        d,
        |i, j| if i == j { roots[i] } else { C64::new(0.0, 0.0) },
    );
    let out = &vectors * diag * vectors.adjoint();
    let adj = out.adjoint();
    Ok(HermitianMatrix((out + adj).scale(0.5)))
}

/// Minimum eigenvalue, used for PSD slack checks.
pub fn min_eigenvalue(m: &HermitianMatrix) -> f64 {
    eigvals_hermitian(m)[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_and_zero_eigenvalues() {
        assert_eq!(
            eigvals_hermitian(&HermitianMatrix::diag(&[1.0, 2.0, 3.0])),
            vec![1.0, 2.0, 3.0]
        );
        assert_eq!(eigvals_hermitian(&HermitianMatrix::zeros(4)), vec![0.0; 4]);
    }

    #[test]
    fn spectral_norm_examples() {
        assert_eq!(spectral_norm(&HermitianMatrix::diag(&[-3.0, 2.0])), 3.0);
        assert_abs_diff_eq!(
            spectral_norm(&HermitianMatrix::identity(5)),
            1.0,
            epsilon = 1e-14
        );
        let s = 0.5f64.sqrt();
        let u = ComplexVector::from_real(&[s, s]);
        assert_abs_diff_eq!(spectral_norm(&u.outer()), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn schatten_examples() {
        for d in 1..5 {
            for p in [1.0, 2.0, 3.5, 7.0] {
                let v = schatten_norm(&HermitianMatrix::identity(d), p).unwrap();
                assert_abs_diff_eq!(v, (d as f64).powf(1.0 / p), epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(
            schatten_norm(&HermitianMatrix::diag(&[3.0, 4.0]), 2.0).unwrap(),
            5.0,
            epsilon = 1e-12
        );
        assert!(matches!(
            schatten_norm(&HermitianMatrix::identity(2), 0.5),
            Err(Error::InvalidOrder(_))
        ));
        assert_eq!(
            schatten_norm(&HermitianMatrix::diag(&[-3.0, 2.0]), f64::INFINITY).unwrap(),
            3.0
        );
    }

    #[test]
    fn rejects_non_hermitian() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(Error::NonHermitianInput { .. })
        ));
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)]);
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn symmetrizes_last_bit_noise() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                c(1.0, 0.0),
                c(0.3, 0.1),
                c(0.3 + 1e-17, -0.1),
                c(2.0, 1e-18),
            ],
        );
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.as_matrix()[(1, 1)].im, 0.0);
        assert_eq!(h.as_matrix()[(0, 1)], h.as_matrix()[(1, 0)].conj());
    }

    #[test]
    fn charpoly_small_cases() {
        let p = charpoly(&HermitianMatrix::diag(&[1.0, -1.0]));
        assert_eq!(p.coeffs(), &[-1.0, 0.0, 1.0]);
        let p = charpoly(&HermitianMatrix::zeros(3));
        assert_eq!(p.coeffs(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn exact_charpoly_gaussian_integers() {
        // [[2, 1+i], [1-i, 3]] : x^2 - 5x + (6 - 2)
        let h = HermitianMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, 1.0)],
            vec![c(1.0, -1.0), c(3.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(charpoly_exact(&h).unwrap(), vec![4, -5, 1]);
        assert_eq!(charpoly(&h).coeffs(), &[4.0, -5.0, 1.0]);
        // non-integer entries fall through
        assert!(charpoly_exact(&HermitianMatrix::diag(&[0.5, 1.0])).is_none());
    }

    #[test]
    fn positive_definiteness() {
        assert!(is_positive_definite(&HermitianMatrix::diag(&[1.0, 2.0])));
        assert!(!is_positive_definite(&HermitianMatrix::diag(&[1.0, -2.0])));
        assert!(!is_positive_definite(&HermitianMatrix::diag(&[-1.0])));
        assert!(!is_positive_definite(&HermitianMatrix::zeros(2)));
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let h = HermitianMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.5, 0.5)],
            vec![c(0.5, -0.5), c(1.0, 0.0)],
        ])
        .unwrap();
        let r = psd_sqrt(&h).unwrap();
        let back = r.square();
        for (a, b) in back.as_matrix().iter().zip(h.as_matrix().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(matches!(
            psd_sqrt(&HermitianMatrix::diag(&[1.0, -1.0])),
            Err(Error::NotPsd(_))
        ));
    }
}
