//! Numerical check of the subset-mixture → QFT → phase-mixing route to the
//! Schmidt-number-`n` state `ρ(βₙ) ∝ βₙ ρ_g + P₊`, `βₙ = (d − n)/n`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bipartite::BipartiteOperator;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ZERO};
use crate::states::{max_entangled, rho_g, subset_mixture, subsets, z_operator, PureState};

/// Max-norm tolerance on unitarity of conjugating matrices.
pub const UNITARY_TOL: f64 = 1e-9;
/// Projective residue allowed in the construction check.
pub const PROJECTIVE_TOL: f64 = 1e-9;

/// `T = (1/√d) Σ_{j,k} e^{2πi jk/d} |j⟩⟨k|`.
pub fn qft_matrix(d: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::param("d", format!("local dimension must be at least 2, got {d}")));
    }
    let norm = 1.0 / (d as f64).sqrt();
    Ok(ComplexMatrix::from_fn(d, |j, k| {
        let phase = 2.0 * PI * ((j * k) % d) as f64 / d as f64;
        Complex64::from_polar(norm, phase)
    }))
}

/// `(U ⊗ U*) M (U ⊗ U*)†`.
pub fn uu_star_conjugate(m: &BipartiteOperator, u: &ComplexMatrix) -> Result<BipartiteOperator> {
    let d = m.local_dim();
    if u.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: u.dim(),
        });
    }
    let deviation = u.unitarity_deviation();
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let w = u.kron(&u.conj());
    let out = &(&w * m.matrix()) * &w.adjoint();
    Ok(BipartiteOperator::from_parts(out, d, m.is_normalized()))
}

fn phase_unitary(d: usize, l: usize, phase: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, |i, j| {
        if i != j {
            ZERO
        } else if i == l {
            Complex64::from_polar(1.0, phase)
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

/// The `2d` phase unitaries: `e^{iπ δ_kl}` for each `l`, then `e^{iπ δ_kl / 2}`.
pub fn phase_unitaries(d: usize) -> Vec<ComplexMatrix> {
    let flips = (0..d).map(|l| phase_unitary(d, l, PI));
    let quarter = (0..d).map(|l| phase_unitary(d, l, PI / 2.0));
    flips.chain(quarter).collect()
}

/// Applies `K ← ½ (U ⊗ U*) K (U ⊗ U*)† + ½ K` for each phase unitary in
/// turn. Entries `|ii⟩⟨jj|` and `|ij⟩⟨ij|` pass through; every other entry
/// is cancelled.
pub fn phase_mixing_pipeline(m: &BipartiteOperator) -> Result<BipartiteOperator> {
    let d = m.local_dim();
    let mut k = m.clone();
    for u in phase_unitaries(d) {
        let conj = uu_star_conjugate(&k, &u)?;
        let mixed = &conj.matrix().scale(0.5) + &k.matrix().scale(0.5);
        k = BipartiteOperator::from_parts(mixed, d, m.is_normalized());
    }
    Ok(k)
}

/// Largest entry outside the `|ii⟩⟨jj|` / `|ij⟩⟨ij|` pattern.
fn off_pattern_max(m: &BipartiteOperator) -> f64 {
    let d = m.local_dim();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let kept = (i == j && k == l) || (i == k && j == l);
                    if !kept {
                        worst = worst.max(m.entry(i, j, k, l).norm());
                    }
                }
            }
        }
    }
    worst
}

fn projective_distance(a: &BipartiteOperator, b: &BipartiteOperator) -> Result<f64> {
    Ok(a.normalize()?.matrix().max_abs_diff(b.normalize()?.matrix()))
}

/// Residues from each stage of the construction check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwirlReport {
    pub d: usize,
    pub n: usize,
    /// `βₙ = (d − n)/n`.
    pub beta_n: f64,
    /// Number of `n`-subsets mixed.
    pub subsets: usize,
    /// `‖K − (Z + d(n−1)/(d−n) P₊)‖_max` after trace-matching the mixture.
    pub mixture_residue: f64,
    /// Largest off-pattern entry of `K′ = d (T ⊗ T*) K (T ⊗ T*)†`.
    pub off_pattern_before: f64,
    /// Largest off-pattern entry after phase mixing.
    pub off_pattern_after: f64,
    /// `‖K″ − (𝟙 − Z + dn(d−1)/(d−n) P₊)‖_max`, no rescaling.
    pub literal_residue: f64,
    /// Projective distance from `K″` to `ρ(βₙ) = (βₙ ρ_g + P₊)/(1 + βₙ)`.
    pub projective_residue: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl TwirlReport {
    /// Turns a failed check into an error carrying the full residue list.
    pub fn ok(&self) -> Result<()> {
        if self.passed {
            return Ok(());
        }
        Err(Error::NumericalIntegrity(format!(
            "twirl construction failed for d={} n={}: mixture {:e}, off-pattern {:e} -> {:e}, literal {:e}, projective {:e} (tol {:e})",
            self.d,
            self.n,
            self.mixture_residue,
            self.off_pattern_before,
            self.off_pattern_after,
            self.literal_residue,
            self.projective_residue,
            self.tolerance
        )))
    }
}

/// Runs the full construction for `2 ≤ n < d` and reports every residue.
///
/// A mismatch is reported through `passed = false`, never dropped.
pub fn verify_thm3_construction(d: usize, n: usize) -> Result<TwirlReport> {
    let (df, nf) = (d as f64, n as f64);
    let mix = subset_mixture(d, n, None)?;
    let p_plus = max_entangled(d)?;
    let z = z_operator(d)?;

    let c = df * (nf - 1.0) / (df - nf);
    let k_target = z.add_scaled(&p_plus, c)?;
    let k = mix.scale(k_target.trace() / mix.trace());
    let mixture_residue = k.matrix().max_abs_diff(k_target.matrix());

    let t = qft_matrix(d)?;
    let k_prime = uu_star_conjugate(&k, &t)?.scale(df);
    let off_pattern_before = off_pattern_max(&k_prime);

    let k_second = phase_mixing_pipeline(&k_prime)?;
    let off_pattern_after = off_pattern_max(&k_second);

    let identity = BipartiteOperator::from_parts(ComplexMatrix::identity(d * d), d, false);
    let literal = identity
        .add_scaled(&z, -1.0)?
        .add_scaled(&p_plus, df * nf * (df - 1.0) / (df - nf))?;
    let literal_residue = k_second.matrix().max_abs_diff(literal.matrix());

    let beta_n = (df - nf) / nf;
    let rho_beta = rho_g(&PureState::maximally_entangled(d))?
        .scale(beta_n)
        .add_scaled(&p_plus, 1.0)?
        .scale(1.0 / (1.0 + beta_n));
    let projective_residue = projective_distance(&k_second, &rho_beta)?;

    let tolerance = PROJECTIVE_TOL;
    let passed = [mixture_residue, off_pattern_after, literal_residue, projective_residue]
        .iter()
        .all(|r| *r <= tolerance);

    Ok(TwirlReport {
        d,
        n,
        beta_n,
        subsets: subsets(d, n).len(),
        mixture_residue,
        off_pattern_before,
        off_pattern_after,
        literal_residue,
        projective_residue,
        tolerance,
        passed,
    })
}
