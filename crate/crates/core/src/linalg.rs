//! Dense complex matrices and the Hermitian spectral routines the rest of
//! the crate is built on.
//!
//! Storage is a thin newtype over `nalgebra::DMatrix<Complex64>`. Every
//! operator in this crate is at most 256x256, so nothing here tries to be
//! clever about sparsity or blocking.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Max-norm tolerance for treating a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Max-norm tolerance on `V diag(λ) V† − M` after diagonalization.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Default slack for positive-semidefiniteness checks.
pub const PSD_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
#[cfg(test)]
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub(crate) fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Dense square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Wraps an nalgebra matrix, rejecting non-square shapes.
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::NotSquare {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        Ok(Self(inner))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::from_element(dim, dim, ZERO))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    /// Real diagonal matrix.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { re(diag[i]) } else { ZERO })
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().copied().map(re).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Projector-like outer product `|v⟩⟨v|` (not normalized).
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.0[(row, col)] = value;
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `max_ij |M_ij|`.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm distance to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_abs_diff: size mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max_ij |M_ij − conj(M_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub(crate) fn ensure_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                deviation,
                tol: HERMITIAN_TOL,
            });
        }
        Ok(())
    }

    /// `max |U†U − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        (self.adjoint() * self).max_abs_diff(&Self::identity(self.dim()))
    }

    /// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
    ///
    /// The decomposition is checked by reconstruction; a residue above
    /// [`RECONSTRUCTION_TOL`] is reported as a numerical-integrity error.
    pub fn hermitian_eigensystem(&self) -> Result<Eigensystem> {
        self.ensure_hermitian()?;
        let n = self.dim();
        let sym = (&self.0 + self.0.adjoint()).map(|z| z * 0.5);
        let eig = SymmetricEigen::new(sym);

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = Self::from_fn(n, |i, col| eig.eigenvectors[(i, order[col])]);

        let system = Eigensystem { values, vectors };
        let residue = system.reconstruct().max_abs_diff(self);
        if !(residue <= RECONSTRUCTION_TOL) {
            return Err(Error::NumericalIntegrity(format!(
                "eigen-reconstruction residue {residue:e} exceeds {RECONSTRUCTION_TOL:e}"
            )));
        }
        Ok(system)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.hermitian_eigensystem()?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// True iff the smallest eigenvalue is at least `-tol`.
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -tol)
    }
}

/// Eigenvalues (ascending) with orthonormal eigenvectors as matching columns.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.dim())
            .map(|i| self.vectors.get(i, k))
            .collect()
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.len();
        let v = self.vectors.inner();
        let scaled = DMatrix::from_fn(n, n, |i, k| v[(i, k)] * self.values[k]);
        ComplexMatrix(scaled * v.adjoint())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 - rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl Mul<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * &rhs.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bit_flip() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    #[test]
    fn kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_diagonal_projectors() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let b = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        assert_eq!(a.kron(&b), ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_bit_flips_map_00_to_11() {
        let xx = bit_flip().kron(&bit_flip());
        let ket00 = [ONE, ZERO, ZERO, ZERO];
        assert_eq!(xx.matvec(&ket00), vec![ZERO, ZERO, ZERO, ONE]);
    }

    #[test]
    fn kron_spectrum_is_pairwise_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_hermitian(2, &mut rng);
            let b = random_hermitian(3, &mut rng);
            let ea = a.eigenvalues().unwrap();
            let eb = b.eigenvalues().unwrap();
            let mut products: Vec<f64> = ea.iter().flat_map(|x| eb.iter().map(move |y| x * y)).collect();
            products.sort_by(f64::total_cmp);
            let got = a.kron(&b).eigenvalues().unwrap();
            for (p, g) in products.iter().zip(&got) {
                assert!((p - g).abs() < 1e-9, "{p} vs {g}");
            }
        }
    }

    #[test]
    fn eigen_sorted_diagonal() {
        let m = ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let values = m.eigenvalues().unwrap();
        for (v, e) in values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenpairs_satisfy_residual_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 5, 9, 16] {
            let m = random_hermitian(n, &mut rng);
            let sys = m.hermitian_eigensystem().unwrap();
            let sum: f64 = sys.values.iter().sum();
            assert!((sum - m.trace().re).abs() < 1e-9);
            for k in 0..n {
                let v = sys.vector(k);
                let mv = m.matvec(&v);
                let res = mv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b * sys.values[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res < 1e-8);
            }
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(m.hermitian_eigensystem(), Err(Error::NotHermitian { .. })));
        assert!(m.is_psd(PSD_TOL).is_err());
    }

    #[test]
    fn psd_checks() {
        assert!(ComplexMatrix::identity(4).is_psd(1e-10).unwrap());
        assert!(!ComplexMatrix::from_real_diagonal(&[1.0, -0.5]).is_psd(1e-10).unwrap());
    }

    #[test]
    fn non_square_rejected() {
        let m = DMatrix::from_element(2, 3, ZERO);
        assert!(matches!(ComplexMatrix::new(m), Err(Error::NotSquare { .. })));
    }
}
