//! Operators on `C^d ⊗ C^d`.
//!
//! Basis convention: `|ij⟩` is index `i * d + j`, with subsystem A the
//! leading tensor factor.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};

/// Tolerance on `Tr ρ = 1` for operators flagged as normalized.
pub const TRACE_TOL: f64 = 1e-9;

/// Which tensor factor to trace out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceOut {
    A,
    B,
}

/// Hermitian operator of size `d² × d²` with its bipartite structure.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteOperator {
    matrix: ComplexMatrix,
    local_dim: usize,
    normalized: bool,
}

pub(crate) fn perfect_square_root(n: usize) -> Result<usize> {
    let r = (n as f64).sqrt().round() as usize;
    if r * r != n {
        return Err(Error::NotPerfectSquare(n));
    }
    Ok(r)
}

impl BipartiteOperator {
    /// Validates shape and Hermiticity. A `normalized` operator must also
    /// have unit trace.
    pub fn new(matrix: ComplexMatrix, local_dim: usize, normalized: bool) -> Result<Self> {
        if matrix.dim() != local_dim * local_dim {
            return Err(Error::DimensionMismatch {
                expected: local_dim * local_dim,
                got: matrix.dim(),
            });
        }
        matrix.ensure_hermitian()?;
        if normalized {
            let tr = matrix.trace();
            if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
                return Err(Error::NotAState(format!("trace {tr} is not 1")));
            }
        }
        Ok(Self {
            matrix,
            local_dim,
            normalized,
        })
    }

    /// Unnormalized operator; the local dimension is inferred.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let d = perfect_square_root(matrix.dim())?;
        Self::new(matrix, d, false)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Entry `⟨ij|M|kl⟩`.
    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        let d = self.local_dim;
        self.matrix.get(i * d + j, k * d + l)
    }

    /// `M / Tr M`. Fails on (near-)traceless input.
    pub fn normalize(&self) -> Result<Self> {
        let tr = self.trace();
        if tr.abs() < 1e-300 || !tr.is_finite() {
            return Err(Error::Degenerate(format!("cannot normalize operator with trace {tr}")));
        }
        Ok(Self {
            matrix: self.matrix.scale(1.0 / tr),
            local_dim: self.local_dim,
            normalized: true,
        })
    }

    /// Real rescaling; clears the normalized flag unless the factor is one.
    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(factor),
            local_dim: self.local_dim,
            normalized: self.normalized && factor == 1.0,
        }
    }

    /// Linear combination `self + factor * other` (unnormalized result).
    pub fn add_scaled(&self, other: &Self, factor: f64) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix.scale(factor),
            local_dim: self.local_dim,
            normalized: false,
        })
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.local_dim != other.local_dim {
            return Err(Error::DimensionMismatch {
                expected: self.local_dim,
                got: other.local_dim,
            });
        }
        Ok(())
    }

    /// Crate-internal constructor for results that are Hermitian by
    /// construction (conjugations, mixtures) up to rounding.
    pub(crate) fn from_parts(matrix: ComplexMatrix, local_dim: usize, normalized: bool) -> Self {
        debug_assert_eq!(matrix.dim(), local_dim * local_dim);
        Self {
            matrix,
            local_dim,
            normalized,
        }
    }

    /// Transpose of the second factor: `⟨ij|M'|kl⟩ = ⟨il|M|kj⟩`.
    pub fn partial_transpose(&self) -> Self {
        let d = self.local_dim;
        let matrix = ComplexMatrix::from_fn(d * d, |row, col| {
            let (i, j) = (row / d, row % d);
            let (k, l) = (col / d, col % d);
            self.matrix.get(i * d + l, k * d + j)
        });
        Self::from_parts(matrix, d, self.normalized)
    }

    /// Reduced `d × d` operator after tracing out one factor.
    pub fn partial_trace(&self, which: TraceOut) -> ComplexMatrix {
        let d = self.local_dim;
        ComplexMatrix::from_fn(d, |r, c| {
            (0..d).fold(ZERO, |acc, s| {
                acc + match which {
                    TraceOut::B => self.matrix.get(r * d + s, c * d + s),
                    TraceOut::A => self.matrix.get(s * d + r, s * d + c),
                }
            })
        })
    }

    /// `Tr(self · other)`, returning the real part after checking that the
    /// imaginary residue is below `1e-8`.
    pub fn trace_product(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.matrix.get(i, k) * other.matrix.get(k, i);
            }
        }
        if acc.im.abs() > 1e-8 {
            return Err(Error::NumericalIntegrity(format!(
                "Tr(AB) has imaginary residue {:e}",
                acc.im
            )));
        }
        Ok(acc.re)
    }

    /// `⟨ψ|M|ψ⟩` for a vector of length `d²`.
    pub fn expectation(&self, psi: &[Complex64]) -> Result<f64> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: psi.len(),
            });
        }
        let mv = self.matrix.matvec(psi);
        let val: Complex64 = psi.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum();
        if val.im.abs() > 1e-8 {
            return Err(Error::NumericalIntegrity(format!(
                "expectation has imaginary residue {:e}",
                val.im
            )));
        }
        Ok(val.re)
    }
}
