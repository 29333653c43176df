//! Random operators and states for property checks and statistical
//! invariants. All samplers take an explicit RNG so callers control seeding.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, ZERO};
use crate::states::{schmidt_decompose, PureState, SCHMIDT_RANK_TOL};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
}

/// Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| gaussian(rng));
    (&g + &g.adjoint()).scale(0.5)
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    ComplexMatrix::from_fn(dim, |i, j| {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { Complex64::new(1.0, 0.0) };
        q[(i, j)] * phase
    })
}

/// Haar-random unit vector in `C^dim`.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    normalize(&mut v);
    v
}

/// Pure state of Schmidt rank at most `k` on `C^d ⊗ C^d`: `k` Gaussian
/// amplitudes placed on the first `k` columns of two independent Haar
/// unitaries, then normalized.
pub fn random_schmidt_rank_vector<R: Rng + ?Sized>(
    d: usize,
    k: usize,
    rng: &mut R,
) -> Vec<Complex64> {
    let k = k.min(d);
    let u = random_unitary(d, rng);
    let v = random_unitary(d, rng);
    let amps: Vec<Complex64> = (0..k).map(|_| gaussian(rng)).collect();
    let mut psi = vec![ZERO; d * d];
    for (t, amp) in amps.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                psi[i * d + j] += amp * u.get(i, t) * v.get(j, t);
            }
        }
    }
    normalize(&mut psi);
    psi
}

/// Schmidt coefficients of a Haar-random pure state in `C^d ⊗ C^d`.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    let psi = random_unit_vector(d * d, rng);
    schmidt_decompose(&psi, SCHMIDT_RANK_TOL)
        .expect("Haar sample is a unit vector of square length")
        .state
}
