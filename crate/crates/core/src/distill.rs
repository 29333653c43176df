//! Distillability screening from the most negative eigenvalue of the
//! partial transpose, plus the reduction criterion for comparison.
//!
//! If `ρ^{T_B}` has eigenpair `(λ, ψ)` with `λ < −R̃`, where `R̃` is any upper
//! bound on the random Schmidt-2 robustness of `ψ`, then `ρ` is distillable.

use serde::{Deserialize, Serialize};

use crate::bipartite::{BipartiteOperator, TraceOut};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Eigensystem, PSD_TOL};
use crate::par::Execution;
use crate::robustness::{random_schmidt_upper, random_schmidt_upper_weak};
use crate::states::{schmidt_decompose, PureState, SCHMIDT_RANK_TOL};

/// Slack on trace and positivity when accepting a density matrix.
pub const STATE_TOL: f64 = 1e-9;
/// Margin in `λ < −R̃ − margin`.
pub const VERDICT_MARGIN: f64 = 1e-12;
/// Eigenvalues this close to the minimum are treated as one eigenspace.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Conjectured universal Schmidt-2 ball bound `1/(2(2·2² − 1))`.
pub const CONJECTURED_R2: f64 = 1.0 / 14.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundChoice {
    /// `a₁a₂ (d − 2)/(2d − 1)`.
    #[default]
    Theorem5,
    /// `(d − 2)/(2d − 1)`, state-independent.
    Weak,
    /// `1/14`; rests on an unproven conjecture.
    Conjecture1,
}

impl BoundChoice {
    pub fn is_conjectural(self) -> bool {
        matches!(self, BoundChoice::Conjecture1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Distillable,
    Inconclusive,
}

/// Outcome of [`distillability_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistillCertificate {
    pub lambda_min: f64,
    /// Schmidt coefficients of the chosen eigenvector.
    pub eigvec_schmidt: PureState,
    pub eigvec_schmidt_rank: usize,
    /// Upper bound on the random Schmidt-2 robustness of that eigenvector.
    pub r2_bound: f64,
    pub bound_choice: BoundChoice,
    pub conjectural: bool,
    /// Dimension of the eigenspace at `lambda_min`.
    pub multiplicity: usize,
    pub verdict: Verdict,
}

fn validate_state(rho: &BipartiteOperator) -> Result<()> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > STATE_TOL {
        return Err(Error::NotAState(format!("trace {tr} is not 1")));
    }
    let min = rho.matrix().min_eigenvalue()?;
    if min < -STATE_TOL {
        return Err(Error::NotAState(format!("minimum eigenvalue {min:e} is negative")));
    }
    Ok(())
}

/// Eigensystem of `ρ^{T_B}`, eigenvalues ascending.
pub fn npt_spectrum(rho: &BipartiteOperator) -> Result<Eigensystem> {
    validate_state(rho)?;
    rho.partial_transpose().matrix().hermitian_eigensystem()
}

fn r2_bound(psi: &PureState, rank: usize, choice: BoundChoice) -> Result<f64> {
    if rank <= 2 {
        return Ok(0.0);
    }
    let d = psi.local_dim();
    Ok(match choice {
        BoundChoice::Theorem5 => random_schmidt_upper(psi, 2)?.value,
        BoundChoice::Weak => random_schmidt_upper_weak(d, 2)?.value,
        BoundChoice::Conjecture1 => CONJECTURED_R2,
    })
}

/// Applies the screen to a normalized state.
///
/// With a degenerate minimum eigenvalue, every basis vector of the
/// eigenspace is tried and the smallest bound kept.
pub fn distillability_check(rho: &BipartiteOperator, choice: BoundChoice) -> Result<DistillCertificate> {
    let spectrum = npt_spectrum(rho)?;
    let lambda_min = spectrum.values[0];
    let multiplicity = spectrum
        .values
        .iter()
        .take_while(|&&v| v - lambda_min <= DEGENERACY_TOL)
        .count();

    let mut best: Option<(f64, PureState, usize)> = None;
    for k in 0..multiplicity {
        let sd = schmidt_decompose(&spectrum.vector(k), SCHMIDT_RANK_TOL)?;
        let bound = r2_bound(&sd.state, sd.rank, choice)?;
        if best.as_ref().is_none_or(|(b, _, _)| bound < *b) {
            best = Some((bound, sd.state, sd.rank));
        }
    }
    let (r2_bound, eigvec_schmidt, eigvec_schmidt_rank) =
        best.expect("spectrum of a nonempty operator");

    let verdict = if lambda_min < 0.0 && lambda_min < -r2_bound - VERDICT_MARGIN {
        Verdict::Distillable
    } else {
        Verdict::Inconclusive
    };
    Ok(DistillCertificate {
        lambda_min,
        eigvec_schmidt,
        eigvec_schmidt_rank,
        r2_bound,
        bound_choice: choice,
        conjectural: choice.is_conjectural(),
        multiplicity,
        verdict,
    })
}

/// Screens many states; results come back in input order.
pub fn screen_batch(
    states: &[BipartiteOperator],
    choice: BoundChoice,
    exec: Execution,
) -> Vec<Result<DistillCertificate>> {
    exec.map_slice(states, |rho| distillability_check(rho, choice))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionVerdict {
    Distillable,
    NotDetected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    /// Minimum eigenvalue of `𝟙 ⊗ ρ_B − ρ`.
    pub min_eig_identity_b: f64,
    /// Minimum eigenvalue of `ρ_A ⊗ 𝟙 − ρ`.
    pub min_eig_a_identity: f64,
    pub verdict: ReductionVerdict,
}

/// Distillable if either `𝟙 ⊗ ρ_B − ρ` or `ρ_A ⊗ 𝟙 − ρ` fails to be PSD.
pub fn reduction_criterion(rho: &BipartiteOperator) -> Result<ReductionReport> {
    validate_state(rho)?;
    let d = rho.local_dim();
    let id = ComplexMatrix::identity(d);
    let rho_a = rho.partial_trace(TraceOut::B);
    let rho_b = rho.partial_trace(TraceOut::A);
    let op_b = &id.kron(&rho_b) - rho.matrix();
    let op_a = &rho_a.kron(&id) - rho.matrix();
    let min_eig_identity_b = op_b.min_eigenvalue()?;
    let min_eig_a_identity = op_a.min_eigenvalue()?;
    let verdict = if min_eig_identity_b < -PSD_TOL || min_eig_a_identity < -PSD_TOL {
        ReductionVerdict::Distillable
    } else {
        ReductionVerdict::NotDetected
    };
    Ok(ReductionReport {
        min_eig_identity_b,
        min_eig_a_identity,
        verdict,
    })
}

/// Worked 3⊗3 example: the screen certifies distillability while the
/// reduction criterion does not fire.
pub fn paper_example_state() -> BipartiteOperator {
    const ROWS: [[f64; 9]; 9] = [
        [1., 0., 0., 0., 0., 0., 0., 0., 0.],
        [0., 2., 0., -1., 0., 0., 0., 0., 0.],
        [0., 0., 2., 0., 0., 0., 2., 0., 0.],
        [0., -1., 0., 2., 0., 0., 0., 0., 0.],
        [0., 0., 0., 0., 1., 0., 0., 0., 0.],
        [0., 0., 0., 0., 0., 2., 0., 2., 0.],
        [0., 0., 2., 0., 0., 0., 2., 0., 0.],
        [0., 0., 0., 0., 0., 2., 0., 2., 0.],
        [0., 0., 0., 0., 0., 0., 0., 0., 2.],
    ];
    let m = ComplexMatrix::from_fn(9, |i, j| crate::linalg::re(ROWS[i][j] / 16.0));
    BipartiteOperator::new(m, 3, true).expect("example matrix is a valid normalized state")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_unitary;
    use crate::states::{isotropic, max_entangled, IsotropicParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag_state(p: &[f64]) -> BipartiteOperator {
        BipartiteOperator::from_matrix(ComplexMatrix::from_real_diagonal(p))
            .unwrap()
            .normalize()
            .unwrap()
    }

    #[test]
    fn example_state_properties() {
        let rho = paper_example_state();
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!(rho.matrix().is_hermitian(0.0));
        assert!(rho.matrix().is_psd(1e-12).unwrap());
        let spectrum = npt_spectrum(&rho).unwrap();
        assert!((spectrum.values[0] + 0.125).abs() < 1e-12);
    }

    #[test]
    fn example_certificate() {
        let cert = distillability_check(&paper_example_state(), BoundChoice::Theorem5).unwrap();
        assert!((cert.lambda_min + 0.125).abs() < 1e-12);
        assert_eq!(cert.multiplicity, 1);
        for a in cert.eigvec_schmidt.coeffs() {
            assert!((a - 1.0 / 3f64.sqrt()).abs() < 1e-9);
        }
        assert!((cert.r2_bound - 1.0 / 15.0).abs() < 1e-12);
        assert_eq!(cert.verdict, Verdict::Distillable);
        assert!(!cert.conjectural);
    }

    #[test]
    fn example_reduction_not_detected() {
        let r = reduction_criterion(&paper_example_state()).unwrap();
        assert_eq!(r.verdict, ReductionVerdict::NotDetected);
        assert!(r.min_eig_identity_b >= -1e-10 && r.min_eig_a_identity >= -1e-10);
    }

    #[test]
    fn separable_states_are_ppt() {
        let rho = diag_state(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let spectrum = npt_spectrum(&rho).unwrap();
        assert!(spectrum.values[0] >= -1e-10);
        let cert = distillability_check(&rho, BoundChoice::Theorem5).unwrap();
        assert_eq!(cert.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn bell_state_rank_two_shortcut() {
        let cert = distillability_check(&max_entangled(2).unwrap(), BoundChoice::Theorem5).unwrap();
        assert!((cert.lambda_min + 0.5).abs() < 1e-12);
        assert_eq!(cert.r2_bound, 0.0);
        assert_eq!(cert.verdict, Verdict::Distillable);
    }

    #[test]
    fn maximally_mixed_inconclusive() {
        let rho = diag_state(&[1.0; 9]);
        let cert = distillability_check(&rho, BoundChoice::Weak).unwrap();
        assert_eq!(cert.verdict, Verdict::Inconclusive);
        assert!((cert.lambda_min - 1.0 / 9.0).abs() < 1e-12);
        assert_eq!(cert.multiplicity, 9);
    }

    #[test]
    fn bound_choices_on_example() {
        let rho = paper_example_state();
        let weak = distillability_check(&rho, BoundChoice::Weak).unwrap();
        assert!((weak.r2_bound - 0.2).abs() < 1e-15);
        // −1/8 is not below −1/5
        assert_eq!(weak.verdict, Verdict::Inconclusive);
        let conj = distillability_check(&rho, BoundChoice::Conjecture1).unwrap();
        assert!(conj.conjectural);
        assert_eq!(conj.r2_bound, CONJECTURED_R2);
        assert_eq!(conj.verdict, Verdict::Distillable);
    }

    #[test]
    fn rejects_non_states() {
        let id = BipartiteOperator::from_matrix(ComplexMatrix::identity(4)).unwrap();
        assert!(matches!(npt_spectrum(&id), Err(Error::NotAState(_))));
        let neg = BipartiteOperator::from_matrix(ComplexMatrix::from_real_diagonal(&[1.5, -0.5, 0.0, 0.0])).unwrap();
        assert!(matches!(distillability_check(&neg, BoundChoice::Theorem5), Err(Error::NotAState(_))));
    }

    #[test]
    fn reduction_detects_high_fidelity_isotropic() {
        let rho = isotropic(IsotropicParams::new(3, 20.0).unwrap()).normalize().unwrap();
        assert_eq!(reduction_criterion(&rho).unwrap().verdict, ReductionVerdict::Distillable);
        let id = ComplexMatrix::identity(3).scale(1.0 / 3.0);
        let expected_min = (&id.kron(&id) - rho.matrix()).min_eigenvalue().unwrap();
        assert!(expected_min < 0.0);
        let product = diag_state(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(reduction_criterion(&product).unwrap().verdict, ReductionVerdict::NotDetected);
    }

    #[test]
    fn local_unitary_invariance() {
        let rho = paper_example_state();
        let base = distillability_check(&rho, BoundChoice::Theorem5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let u = random_unitary(3, &mut rng);
            let v = random_unitary(3, &mut rng);
            let w = u.kron(&v);
            let m = &(&w * rho.matrix()) * &w.adjoint();
            let rotated = BipartiteOperator::new(m, 3, true).unwrap();
            let cert = distillability_check(&rotated, BoundChoice::Theorem5).unwrap();
            assert_eq!(cert.verdict, base.verdict);
            assert!((cert.lambda_min - base.lambda_min).abs() < 1e-9);
            assert!((cert.r2_bound - base.r2_bound).abs() < 1e-9);
        }
    }

    #[test]
    fn batch_preserves_order() {
        let states = vec![paper_example_state(), diag_state(&[1.0; 9]), paper_example_state()];
        let out = screen_batch(&states, BoundChoice::Theorem5, Execution::Parallel);
        let verdicts: Vec<_> = out.into_iter().map(|c| c.unwrap().verdict).collect();
        assert_eq!(verdicts, vec![Verdict::Distillable, Verdict::Inconclusive, Verdict::Distillable]);
    }
}
