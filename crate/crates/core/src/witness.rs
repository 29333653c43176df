//! Schmidt witnesses: the canonical isotropic family, local filtering, and
//! evaluation on states.
//!
//! A witness of class `k` is nonnegative on every state of Schmidt number
//! at most `k`. (In the usual "n-SW" naming this is an (k+1)-SW.)

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bipartite::BipartiteOperator;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HERMITIAN_TOL};
use crate::par::Execution;
use crate::sampling::random_schmidt_rank_vector;
use crate::states::{diagonal_ket, max_entangled};

/// Tolerance on `Σ a_i² = 1` for coefficient lists fed to witness formulas.
pub const WITNESS_COEFF_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    op: BipartiteOperator,
    schmidt_class: usize,
    trace: f64,
}

impl Witness {
    pub fn new(op: BipartiteOperator, schmidt_class: usize) -> Result<Self> {
        op.matrix().ensure_hermitian()?;
        let trace = op.trace();
        Ok(Self {
            op,
            schmidt_class,
            trace,
        })
    }

    pub fn op(&self) -> &BipartiteOperator {
        &self.op
    }

    pub fn schmidt_class(&self) -> usize {
        self.schmidt_class
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn local_dim(&self) -> usize {
        self.op.local_dim()
    }

    /// Zero (or numerically zero) operator, e.g. after filtering with `A = 0`.
    pub fn is_degenerate(&self) -> bool {
        self.op.matrix().max_abs() < 1e-14
    }

    /// Value on a pure state vector, `⟨ψ|W|ψ⟩`.
    pub fn value_on_vector(&self, psi: &[num_complex::Complex64]) -> Result<f64> {
        self.op.expectation(psi)
    }

    /// Smallest value seen on `samples` random pure states of Schmidt rank
    /// at most `rank`. Each sample draws from its own ChaCha stream, so the
    /// result is independent of the execution strategy.
    pub fn sampled_min_value(
        &self,
        rank: usize,
        samples: usize,
        seed: u64,
        exec: Execution,
    ) -> Result<f64> {
        let d = self.local_dim();
        let values = exec.map_range(samples, |i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let psi = random_schmidt_rank_vector(d, rank, &mut rng);
            self.value_on_vector(&psi)
        });
        values
            .into_iter()
            .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)))
    }
}

/// `𝟙 − (d/k) P₊`, a class-`k` witness.
pub fn canonical_witness(d: usize, k: usize) -> Result<Witness> {
    if k < 1 || k >= d {
        return Err(Error::param("k", format!("need 1 <= k < d = {d}, got {k}")));
    }
    let p = max_entangled(d)?;
    let m = &ComplexMatrix::identity(d * d) - &p.matrix().scale(d as f64 / k as f64);
    Witness::new(BipartiteOperator::new(m, d, false)?, k)
}

/// `(A ⊗ B) W (A ⊗ B)†`; the Schmidt class is unchanged.
pub fn filter_witness(w: &Witness, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Witness> {
    let op = crate::states::local_filter(&w.op, a, b)?;
    let deviation = op.matrix().hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NumericalIntegrity(format!(
            "filtered witness lost Hermiticity ({deviation:e})"
        )));
    }
    Witness::new(op, w.schmidt_class)
}

fn check_coeffs(name: &'static str, a: &[f64]) -> Result<()> {
    if let Some(bad) = a.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::param(name, format!("coefficient {bad} is negative or not finite")));
    }
    let norm_sq: f64 = a.iter().map(|x| x * x).sum();
    if (norm_sq - 1.0).abs() > WITNESS_COEFF_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    Ok(())
}

/// `Σ_ij a_i a_j |ij⟩⟨ij| − (1/n)|ψ_a⟩⟨ψ_a|`: the canonical class-`n`
/// witness after the diagonal filter `A = B = Σ √a_k |k⟩⟨k|`.
pub fn diag_filtered_witness(a: &[f64], n: usize) -> Result<Witness> {
    check_coeffs("a", a)?;
    let d = a.len();
    if n < 1 || n >= d {
        return Err(Error::param("n", format!("need 1 <= n < d = {d}, got {n}")));
    }
    let diag: Vec<f64> = (0..d * d).map(|idx| a[idx / d] * a[idx % d]).collect();
    let psi = ComplexMatrix::outer(&diagonal_ket(a));
    let m = &ComplexMatrix::from_real_diagonal(&diag) - &psi.scale(1.0 / n as f64);
    Witness::new(BipartiteOperator::new(m, d, false)?, n)
}

/// `Tr(W ρ)`.
pub fn witness_value(w: &Witness, rho: &BipartiteOperator) -> Result<f64> {
    w.op.trace_product(rho)
}

/// Closed-form value of the trace-normalized diagonal-filtered witness on
/// the pure state `Σ b_i |ii⟩`:
/// `(n Σ a_i² b_i² − (Σ a_i b_i)²) / (n (Σ a_i)² − 1)`.
pub fn normalized_witness_value_on_pure(a: &[f64], b: &[f64], n: usize) -> Result<f64> {
    check_coeffs("a", a)?;
    check_coeffs("b", b)?;
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    pure_value_formula(a, b, n)
}

/// Unvalidated formula shared with the optimizer's inner loop.
pub(crate) fn pure_value_formula(a: &[f64], b: &[f64], n: usize) -> Result<f64> {
    let n = n as f64;
    let sum_a: f64 = a.iter().sum();
    let denom = n * sum_a * sum_a - 1.0;
    if !(denom > 0.0) {
        return Err(Error::Degenerate(format!(
            "witness trace n(Σa)² − 1 = {denom:e} is not positive"
        )));
    }
    let mut sq = 0.0;
    let mut overlap = 0.0;
    for (x, y) in a.iter().zip(b) {
        sq += x * x * y * y;
        overlap += x * y;
    }
    Ok((n * sq - overlap * overlap) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{isotropic, isotropic_threshold, IsotropicParams, PureState};

    #[test]
    fn canonical_entanglement_witness_d3() {
        let w = canonical_witness(3, 1).unwrap();
        let p = max_entangled(3).unwrap();
        let expected = &ComplexMatrix::identity(9) - &p.matrix().scale(3.0);
        assert!(w.op().matrix().max_abs_diff(&expected) < 1e-15);
        assert!((w.trace() - 6.0).abs() < 1e-12);
        assert!((witness_value(&w, &p).unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_detects_p_plus_above_class() {
        let w = canonical_witness(3, 2).unwrap();
        let v = witness_value(&w, &max_entangled(3).unwrap()).unwrap();
        assert!((v + 0.5).abs() < 1e-12);
        assert!((w.trace() - 7.5).abs() < 1e-12);
    }

    #[test]
    fn canonical_range_checked() {
        assert!(canonical_witness(3, 0).is_err());
        assert!(canonical_witness(3, 3).is_err());
    }

    #[test]
    fn canonical_nonnegative_on_low_rank_samples() {
        let w = canonical_witness(4, 3).unwrap();
        let min = w.sampled_min_value(3, 1000, 17, Execution::Parallel).unwrap();
        assert!(min >= -1e-9, "{min}");
    }

    #[test]
    fn value_on_isotropic_matches_trace_algebra() {
        for d in 3..=5 {
            for k in 1..d {
                let w = canonical_witness(d, k).unwrap();
                for beta in [-1.0, 0.0, 2.5, 10.0, 40.0] {
                    let rho = isotropic(IsotropicParams::new(d, beta).unwrap());
                    let got = witness_value(&w, &rho).unwrap();
                    let df = d as f64;
                    let expected = df * df + beta - (df / k as f64) * (1.0 + beta);
                    assert!((got - expected).abs() < 1e-10);
                }
                let root = isotropic_threshold(d, k);
                let rho = isotropic(IsotropicParams::new(d, root).unwrap());
                assert!(witness_value(&w, &rho).unwrap().abs() < 1e-9);
            }
        }
    }

    #[test]
    fn value_on_identity_is_trace() {
        let w = canonical_witness(4, 2).unwrap();
        let id = isotropic(IsotropicParams::new(4, 0.0).unwrap());
        assert!((witness_value(&w, &id).unwrap() - w.trace()).abs() < 1e-12);
    }

    #[test]
    fn filtering_canonical_gives_diag_witness() {
        let a = [0.6f64.sqrt(), 0.3f64.sqrt(), 0.1f64.sqrt()];
        let psi = PureState::new(a.to_vec()).unwrap();
        let f = psi.sqrt_filter();
        let filtered = filter_witness(&canonical_witness(3, 2).unwrap(), &f, &f).unwrap();
        let direct = diag_filtered_witness(psi.coeffs(), 2).unwrap();
        assert_eq!(filtered.schmidt_class(), 2);
        let ratio = direct.trace() / filtered.trace();
        let diff = filtered.op().matrix().scale(ratio).max_abs_diff(direct.op().matrix());
        assert!(diff < 1e-10);
    }

    #[test]
    fn identity_and_zero_filters() {
        let w = canonical_witness(3, 1).unwrap();
        let id = ComplexMatrix::identity(3);
        assert_eq!(filter_witness(&w, &id, &id).unwrap().op().matrix().max_abs_diff(w.op().matrix()), 0.0);
        let z = ComplexMatrix::zeros(3);
        let zero = filter_witness(&w, &z, &z).unwrap();
        assert!(zero.is_degenerate());
        assert_eq!(zero.trace(), 0.0);
        assert!(!w.is_degenerate());
    }

    #[test]
    fn diag_witness_trace_and_product_case() {
        let u = vec![1.0 / 3f64.sqrt(); 3];
        let w = diag_filtered_witness(&u, 2).unwrap();
        assert!((w.trace() - 2.5).abs() < 1e-12);

        let w = diag_filtered_witness(&[1.0, 0.0, 0.0], 2).unwrap();
        let mut expected = ComplexMatrix::zeros(9);
        expected.set(0, 0, crate::linalg::re(0.5));
        assert!(w.op().matrix().max_abs_diff(&expected) < 1e-15);
        assert!(w.op().matrix().is_psd(1e-12).unwrap());

        assert!(matches!(diag_filtered_witness(&[1.0, 1.0, 0.0], 2), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn closed_form_matches_operator_value() {
        let a = [0.5f64.sqrt(), 0.3f64.sqrt(), 0.2f64.sqrt()];
        let b = [0.7f64.sqrt(), 0.25f64.sqrt(), 0.05f64.sqrt()];
        for n in 1..3 {
            let w = diag_filtered_witness(&a, n).unwrap();
            let psi = PureState::new(b.to_vec()).unwrap();
            // PureState sorts; b is already descending
            let direct = witness_value(&w, &psi.projector()).unwrap() / w.trace();
            let closed = normalized_witness_value_on_pure(&a, &b, n).unwrap();
            assert!((direct - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_examples() {
        let u = vec![1.0 / 3f64.sqrt(); 3];
        let v = normalized_witness_value_on_pure(&u, &u, 2).unwrap();
        assert!((v + 1.0 / 15.0).abs() < 1e-14);

        let a = [0.6f64.sqrt(), 0.3f64.sqrt(), 0.1f64.sqrt()];
        let v = normalized_witness_value_on_pure(&a, &[1.0, 0.0, 0.0], 2).unwrap();
        let s: f64 = a.iter().sum();
        assert!((v - a[0] * a[0] / (2.0 * s * s - 1.0)).abs() < 1e-14);
        assert!(v >= 0.0);

        let h = [std::f64::consts::FRAC_1_SQRT_2; 2];
        let v = normalized_witness_value_on_pure(&h, &h, 1).unwrap();
        assert!((v + 0.5).abs() < 1e-14);
    }

    #[test]
    fn closed_form_denominator_guard() {
        // n(Σa)² − 1 = 0 for a product filter with n = 1
        assert!(matches!(
            normalized_witness_value_on_pure(&[1.0, 0.0], &[1.0, 0.0], 1),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn filtered_witness_positive_on_filtered_samples() {
        // local filtering preserves the witness class
        let a = [0.6f64.sqrt(), 0.3f64.sqrt(), 0.1f64.sqrt()];
        let w = diag_filtered_witness(&a, 2).unwrap();
        let min = w.sampled_min_value(2, 500, 3, Execution::Sequential).unwrap();
        assert!(min >= -1e-9);
    }
}
