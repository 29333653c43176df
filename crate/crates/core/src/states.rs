//! Pure states in Schmidt form and the operator families built from them:
//! the maximally entangled projector, `Z`, isotropic states, the optimal
//! separable mixer `ρ_g`, local filters and subset mixtures.

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bipartite::{perfect_square_root, BipartiteOperator};
use crate::error::{Error, Result};
use crate::linalg::{re, ComplexMatrix, ZERO};

/// Singular values above this count toward the Schmidt rank.
pub const SCHMIDT_RANK_TOL: f64 = 1e-9;
/// Tolerance on `Σ a_i² = 1` for [`PureState::new`].
pub const COEFF_NORM_TOL: f64 = 1e-12;

/// Ordered Schmidt coefficients of a pure state on `C^d ⊗ C^d`.
///
/// Always carries exactly `d` entries (zero-padded), sorted descending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    coeffs: Vec<f64>,
}

impl PureState {
    /// Validates a coefficient list (nonnegative, unit 2-norm) and sorts it.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::param("coeffs", "empty coefficient list"));
        }
        if let Some(bad) = coeffs.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::param("coeffs", format!("coefficient {bad} is negative or not finite")));
        }
        let norm_sq: f64 = coeffs.iter().map(|c| c * c).sum();
        if (norm_sq - 1.0).abs() > COEFF_NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        coeffs.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { coeffs })
    }

    /// Like [`PureState::new`] but zero-pads to local dimension `d`.
    pub fn with_dim(mut coeffs: Vec<f64>, d: usize) -> Result<Self> {
        if coeffs.len() > d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: coeffs.len(),
            });
        }
        coeffs.resize(d, 0.0);
        Self::new(coeffs)
    }

    /// Rescales to unit norm first. Returns the state and the original norm.
    pub fn normalizing(coeffs: Vec<f64>) -> Result<(Self, f64)> {
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::param("coeffs", "coefficient list has zero or non-finite norm"));
        }
        let scaled = coeffs.iter().map(|c| c / norm).collect();
        Ok((Self::new_unchecked_norm(scaled)?, norm))
    }

    fn new_unchecked_norm(coeffs: Vec<f64>) -> Result<Self> {
        // Rescaling can leave ~1 ulp of norm error; re-run validation on the
        // polished vector.
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        Self::new(coeffs.into_iter().map(|c| c / norm).collect())
    }

    /// Uniform coefficients `1/√d`.
    pub fn maximally_entangled(d: usize) -> Self {
        Self {
            coeffs: vec![1.0 / (d as f64).sqrt(); d],
        }
    }

    /// `|00⟩` padded to dimension `d`.
    pub fn product(d: usize) -> Self {
        let mut coeffs = vec![0.0; d];
        coeffs[0] = 1.0;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn local_dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn schmidt_rank(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c > SCHMIDT_RANK_TOL).count()
    }

    /// `Σ a_i`.
    pub fn coeff_sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// `Σ a_i |ii⟩` as a length-`d²` vector.
    pub fn ket(&self) -> Vec<Complex64> {
        diagonal_ket(&self.coeffs)
    }

    /// Normalized projector `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> BipartiteOperator {
        BipartiteOperator::from_parts(ComplexMatrix::outer(&self.ket()), self.local_dim(), true)
    }

    /// Local filter `Σ_k √a_k |k⟩⟨k|`.
    pub fn sqrt_filter(&self) -> ComplexMatrix {
        let roots: Vec<f64> = self.coeffs.iter().map(|c| c.sqrt()).collect();
        ComplexMatrix::from_real_diagonal(&roots)
    }
}

/// `Σ c_i |ii⟩` for arbitrary real amplitudes.
pub(crate) fn diagonal_ket(c: &[f64]) -> Vec<Complex64> {
    let d = c.len();
    let mut v = vec![ZERO; d * d];
    for (i, ci) in c.iter().enumerate() {
        v[i * d + i] = re(*ci);
    }
    v
}

/// Schmidt form of a bipartite pure state.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub state: PureState,
    /// Columns are the local basis vectors `|i_A⟩`.
    pub left: ComplexMatrix,
    /// Columns are the local basis vectors `|i_B⟩`.
    pub right: ComplexMatrix,
    /// Number of coefficients above the rank tolerance used.
    pub rank: usize,
}

impl SchmidtDecomposition {
    /// `Σ_i a_i |i_A⟩|i_B⟩`.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let d = self.state.local_dim();
        let a = self.state.coeffs();
        let mut v = vec![ZERO; d * d];
        for (k, ak) in a.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    v[i * d + j] += self.left.get(i, k) * self.right.get(j, k) * *ak;
                }
            }
        }
        v
    }
}

/// SVD of the `d × d` coefficient matrix of a unit vector in `C^{d²}`.
pub fn schmidt_decompose(vec: &[Complex64], tol: f64) -> Result<SchmidtDecomposition> {
    let d = perfect_square_root(vec.len())?;
    let norm_sq: f64 = vec.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sq.sqrt() - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm_sq });
    }
    let coeff = DMatrix::from_fn(d, d, |i, j| vec[i * d + j]);
    let svd = SVD::new(coeff, true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::NumericalIntegrity("SVD did not return singular vectors".into())),
    };
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let values: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let left = ComplexMatrix::from_fn(d, |i, k| u[(i, order[k])]);
    let right = ComplexMatrix::from_fn(d, |j, k| v_t[(order[k], j)]);
    let rank = values.iter().filter(|&&s| s > tol).count();

    let decomposition = SchmidtDecomposition {
        state: PureState::new_unchecked_norm(values)?,
        left,
        right,
        rank,
    };
    let rebuilt = decomposition.reconstruct();
    let residue = rebuilt
        .iter()
        .zip(vec)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if residue > 1e-9 {
        return Err(Error::NumericalIntegrity(format!(
            "Schmidt reconstruction residue {residue:e}"
        )));
    }
    Ok(decomposition)
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::param("d", format!("local dimension must be at least 2, got {d}")));
    }
    Ok(())
}

/// Projector `P₊` onto `(1/√d) Σ_i |ii⟩`.
pub fn max_entangled(d: usize) -> Result<BipartiteOperator> {
    check_dim(d)?;
    Ok(PureState::maximally_entangled(d).projector())
}

/// `Z = Σ_i |ii⟩⟨ii|`.
pub fn z_operator(d: usize) -> Result<BipartiteOperator> {
    check_dim(d)?;
    let diag: Vec<f64> = (0..d * d)
        .map(|idx| if idx / d == idx % d { 1.0 } else { 0.0 })
        .collect();
    Ok(BipartiteOperator::from_parts(ComplexMatrix::from_real_diagonal(&diag), d, false))
}

/// Parameters of the unnormalized isotropic family `𝟙 + β P₊`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotropicParams {
    local_dim: usize,
    beta: f64,
}

impl IsotropicParams {
    pub fn new(local_dim: usize, beta: f64) -> Result<Self> {
        check_dim(local_dim)?;
        if !(beta >= -1.0) || !beta.is_finite() {
            return Err(Error::param("beta", format!("must be finite and >= -1, got {beta}")));
        }
        Ok(Self { local_dim, beta })
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// `𝟙 + β P₊` (unnormalized, trace `d² + β`).
pub fn isotropic(p: IsotropicParams) -> BipartiteOperator {
    let d = p.local_dim;
    let p_plus = PureState::maximally_entangled(d).projector();
    let m = &ComplexMatrix::identity(d * d) + &p_plus.matrix().scale(p.beta);
    BipartiteOperator::from_parts(m, d, false)
}

/// Largest `β` at which `𝟙 + β P₊` still has Schmidt number at most `n`:
/// `d(nd − 1)/(d − n)`, infinite for `n ≥ d`.
pub fn isotropic_threshold(d: usize, n: usize) -> f64 {
    if n >= d {
        return f64::INFINITY;
    }
    let (d, n) = (d as f64, n as f64);
    d * (n * d - 1.0) / (d - n)
}

/// Exact Schmidt number of an isotropic state. Interval endpoints follow the
/// half-open convention: strict below, inclusive above.
pub fn isotropic_schmidt_number(p: IsotropicParams) -> usize {
    let d = p.local_dim;
    (1..d)
        .find(|&n| {
            // β ≤ d(nd−1)/(d−n), cross-multiplied to keep exact boundaries exact
            let lhs = p.beta * (d - n) as f64;
            let rhs = (d * (n * d - 1)) as f64;
            lhs <= rhs
        })
        .unwrap_or(d)
}

/// Separable state `(1/R_g) Σ_{i≠j} a_i a_j |ij⟩⟨ij|` that washes out the
/// entanglement of `ψ` fastest.
pub fn rho_g(psi: &PureState) -> Result<BipartiteOperator> {
    let d = psi.local_dim();
    let a = psi.coeffs();
    let rg = psi.coeff_sum().powi(2) - 1.0;
    if psi.schmidt_rank() < 2 || rg <= 1e-12 {
        return Err(Error::Degenerate(format!(
            "rho_g needs Schmidt rank >= 2 (R_g = {rg:e})"
        )));
    }
    let diag: Vec<f64> = (0..d * d)
        .map(|idx| {
            let (i, j) = (idx / d, idx % d);
            if i == j {
                0.0
            } else {
                a[i] * a[j] / rg
            }
        })
        .collect();
    Ok(BipartiteOperator::from_parts(ComplexMatrix::from_real_diagonal(&diag), d, true))
}

/// `(A ⊗ B) M (A ⊗ B)†`.
pub fn local_filter(
    m: &BipartiteOperator,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<BipartiteOperator> {
    let d = m.local_dim();
    for f in [a, b] {
        if f.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: f.dim(),
            });
        }
    }
    let ab = a.kron(b);
    let out = &(&ab * m.matrix()) * &ab.adjoint();
    Ok(BipartiteOperator::from_parts(out, d, false))
}

/// All `n`-element subsets of `0..d` in lexicographic order.
pub(crate) fn subsets(d: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, d: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            if d - i < n - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, d, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, d, n, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Equal-weight (unnormalized) sum over all `n`-subsets `S` of
/// `|ψ_S⟩⟨ψ_S|`, with `|ψ_S⟩ = Σ_{i∈S} c_i |ii⟩` and `c = a` or all ones.
///
/// Every term has Schmidt rank `n`, so the result has Schmidt number at
/// most `n`.
pub fn subset_mixture(d: usize, n: usize, a: Option<&[f64]>) -> Result<BipartiteOperator> {
    check_dim(d)?;
    if n < 2 || n >= d {
        return Err(Error::param("n", format!("need 2 <= n < d = {d}, got {n}")));
    }
    let weights: Vec<f64> = match a {
        Some(a) if a.len() != d => {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.len(),
            })
        }
        Some(a) => a.to_vec(),
        None => vec![1.0; d],
    };
    let mut acc = ComplexMatrix::zeros(d * d);
    for subset in subsets(d, n) {
        let mut c = vec![0.0; d];
        for &i in &subset {
            c[i] = weights[i];
        }
        acc = acc + ComplexMatrix::outer(&diagonal_ket(&c));
    }
    Ok(BipartiteOperator::from_parts(acc, d, false))
}
