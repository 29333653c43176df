//! Closed-form robustness values and Schmidt-robustness bounds for pure
//! states.
//!
//! Random-robustness quantities use the unnormalized-identity convention:
//! the mixer is `𝟙` itself, not `𝟙/d²`. [`BoundReport::with_normalized_identity`]
//! converts to the other convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::PureState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "R_s")]
    Robustness,
    #[serde(rename = "R_g")]
    GeneralizedRobustness,
    #[serde(rename = "R_r")]
    RandomRobustness,
    #[serde(rename = "R_gn")]
    GeneralizedSchmidt,
    #[serde(rename = "R_rn")]
    RandomSchmidt,
    #[serde(rename = "ball_radius")]
    BallRadius,
}

impl Measure {
    /// Measures whose mixer is the identity, and so depend on its normalization.
    pub fn is_random_family(self) -> bool {
        matches!(self, Measure::RandomRobustness | Measure::RandomSchmidt)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Exact,
    Lower,
    Upper,
    Conjectured,
}

/// A robustness value tagged with what it measures and how it is known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub measure: Measure,
    pub kind: BoundKind,
    pub value: f64,
    /// Pre-clamp value when `value` was clamped at zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw_value: Option<f64>,
    pub d: usize,
    /// Schmidt level `n` (or ball level `k`) where applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub normalized_identity: bool,
}

impl BoundReport {
    fn new(measure: Measure, kind: BoundKind, value: f64, d: usize, n: Option<usize>) -> Self {
        Self {
            measure,
            kind,
            value,
            raw_value: None,
            d,
            n,
            normalized_identity: false,
        }
    }

    fn clamped(mut self) -> Self {
        if self.value < 0.0 {
            self.raw_value = Some(self.value);
            self.value = 0.0;
        }
        self
    }

    /// Rescales random-family values by `d²` (identity normalized to trace
    /// one). Other measures pass through unchanged.
    pub fn with_normalized_identity(mut self) -> Self {
        if self.measure.is_random_family() && !self.normalized_identity {
            let f = (self.d * self.d) as f64;
            self.value *= f;
            self.raw_value = self.raw_value.map(|v| v * f);
            self.normalized_identity = true;
        }
        self
    }
}

fn check_level(name: &'static str, n: usize, d: usize, allow_d: bool) -> Result<()> {
    let ok = n >= 1 && (n < d || (allow_d && n == d));
    if !ok {
        let hi = if allow_d { "<=" } else { "<" };
        return Err(Error::param(name, format!("need 1 <= {name} {hi} d = {d}, got {n}")));
    }
    Ok(())
}

/// `R_s = (Σ a_i)² − 1`, which also equals the generalized robustness.
pub fn robustness_pure(psi: &PureState) -> BoundReport {
    let value = (psi.coeff_sum().powi(2) - 1.0).max(0.0);
    BoundReport::new(Measure::Robustness, BoundKind::Exact, value, psi.local_dim(), None)
}

/// Same value as [`robustness_pure`], labelled as `R_g`.
pub fn generalized_robustness_pure(psi: &PureState) -> BoundReport {
    BoundReport {
        measure: Measure::GeneralizedRobustness,
        ..robustness_pure(psi)
    }
}

/// `R_r = a₁ a₂`.
pub fn random_robustness_pure(psi: &PureState) -> BoundReport {
    let a = psi.coeffs();
    let value = a[0] * a.get(1).copied().unwrap_or(0.0);
    BoundReport::new(Measure::RandomRobustness, BoundKind::Exact, value, psi.local_dim(), None)
}

/// Lower and upper bounds on the generalized Schmidt-`n` robustness:
/// `(Σa)²/n − 1 ≤ R_gn ≤ R_g (d − n)/((d − 1) n)`.
///
/// The lower bound is clamped at zero (raw value kept). States already of
/// Schmidt rank at most `n` get exactly zero for both.
pub fn gen_schmidt_bounds(psi: &PureState, n: usize) -> Result<(BoundReport, BoundReport)> {
    let d = psi.local_dim();
    check_level("n", n, d, true)?;
    let mk = |kind, v| BoundReport::new(Measure::GeneralizedSchmidt, kind, v, d, Some(n));
    if psi.schmidt_rank() <= n {
        return Ok((mk(BoundKind::Lower, 0.0), mk(BoundKind::Upper, 0.0)));
    }
    let s2 = psi.coeff_sum().powi(2);
    let lower = mk(BoundKind::Lower, s2 / n as f64 - 1.0).clamped();
    let rg = s2 - 1.0;
    let upper = mk(
        BoundKind::Upper,
        rg * (d - n) as f64 / ((d - 1) * n) as f64,
    );
    Ok((lower, upper))
}

/// `R_gn(P₊) = (d − n)/n`.
pub fn gen_schmidt_robustness_maxent(d: usize, n: usize) -> Result<BoundReport> {
    check_level("n", n, d, true)?;
    let value = (d - n) as f64 / n as f64;
    Ok(BoundReport::new(Measure::GeneralizedSchmidt, BoundKind::Exact, value, d, Some(n)))
}

/// `R_rn(P₊) = (d − n)/(d (n d − 1))`.
pub fn random_schmidt_robustness_maxent(d: usize, n: usize) -> Result<BoundReport> {
    check_level("n", n, d, true)?;
    let value = (d - n) as f64 / (d * (n * d - 1)) as f64;
    Ok(BoundReport::new(Measure::RandomSchmidt, BoundKind::Exact, value, d, Some(n)))
}

/// State-independent bound `R_rn ≤ (d − n)/(n d − 1)`.
pub fn random_schmidt_upper_weak(d: usize, n: usize) -> Result<BoundReport> {
    check_level("n", n, d, false)?;
    let value = (d - n) as f64 / (n * d - 1) as f64;
    Ok(BoundReport::new(Measure::RandomSchmidt, BoundKind::Upper, value, d, Some(n)))
}

/// `R_rn ≤ a₁ a₂ (d − n)/(d n − 1)`; zero when the Schmidt rank is at most `n`.
pub fn random_schmidt_upper(psi: &PureState, n: usize) -> Result<BoundReport> {
    let d = psi.local_dim();
    check_level("n", n, d, false)?;
    let value = if psi.schmidt_rank() <= n {
        0.0
    } else {
        random_robustness_pure(psi).value * (d - n) as f64 / (d * n - 1) as f64
    };
    Ok(BoundReport::new(Measure::RandomSchmidt, BoundKind::Upper, value, d, Some(n)))
}

/// Outcome of the integer scan for the conjectured Schmidt-ball radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallRadius {
    pub radius: BoundReport,
    pub optimal_dprime: usize,
    /// Whether the scan reproduced `2(2k² − 1)` at `d′ = 2k`.
    pub matches_closed_form: bool,
    /// Continuous minimizer `k + √(k² − 1)`.
    pub continuous_minimizer: f64,
}

/// Minimizes `d′(k d′ − 1)/(d′ − k)` over integers `d′ ∈ (k, d_max]`: the
/// largest isotropic weight `β` keeping `𝟙 + β P₊^{d′}` within Schmidt
/// number `k`, minimized over the embedding dimension.
///
/// Fractions are compared exactly. When `d_max ≥ 2k` the result must be
/// `2(2k² − 1)` at `d′ = 2k`; anything else is a numerical-integrity error.
pub fn conjectured_ball_radius(k: usize, d_max: usize) -> Result<BallRadius> {
    if k < 1 {
        return Err(Error::param("k", "must be at least 1"));
    }
    if d_max <= k {
        return Err(Error::param("dmax", format!("must exceed k = {k}, got {d_max}")));
    }
    let k128 = k as u128;
    // (numerator, denominator, d′)
    let mut best: Option<(u128, u128, usize)> = None;
    for dp in (k + 1)..=d_max {
        let dp128 = dp as u128;
        let num = dp128 * (k128 * dp128 - 1);
        let den = dp128 - k128;
        let better = match best {
            None => true,
            Some((bn, bd, _)) => num * bd < bn * den,
        };
        if better {
            best = Some((num, den, dp));
        }
    }
    let (num, den, dprime) = best.expect("range (k, d_max] is nonempty");
    let closed = 2 * (2 * k128 * k128 - 1);
    let matches = num == closed * den && dprime == 2 * k;
    if d_max >= 2 * k && !matches {
        return Err(Error::NumericalIntegrity(format!(
            "ball radius scan gave {num}/{den} at d' = {dprime}, expected {closed} at d' = {}",
            2 * k
        )));
    }
    let kf = k as f64;
    Ok(BallRadius {
        radius: BoundReport::new(
            Measure::BallRadius,
            BoundKind::Conjectured,
            num as f64 / den as f64,
            dprime,
            Some(k),
        ),
        optimal_dprime: dprime,
        matches_closed_form: matches,
        continuous_minimizer: kf + (kf * kf - 1.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(c: &[f64]) -> PureState {
        PureState::new(c.to_vec()).unwrap()
    }

    #[test]
    fn robustness_examples() {
        for d in 2..=6 {
            let v = robustness_pure(&PureState::maximally_entangled(d)).value;
            assert!((v - (d - 1) as f64).abs() < 1e-12);
        }
        assert_eq!(robustness_pure(&st(&[1.0, 0.0])).value, 0.0);
        let v = robustness_pure(&st(&[0.8f64.sqrt(), 0.2f64.sqrt()])).value;
        assert!((v - 0.8).abs() < 1e-12);
        let g = generalized_robustness_pure(&st(&[0.8f64.sqrt(), 0.2f64.sqrt()]));
        assert_eq!(g.measure, Measure::GeneralizedRobustness);
        assert_eq!(g.value, v);
    }

    #[test]
    fn random_robustness_examples() {
        let v = random_robustness_pure(&PureState::maximally_entangled(3)).value;
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(random_robustness_pure(&st(&[1.0, 0.0])).value, 0.0);
        let v = random_robustness_pure(&PureState::maximally_entangled(2)).value;
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pure_state_gen_schmidt_bounds() {
        for d in 2..=6 {
            for n in 1..=d {
                let (lo, hi) = gen_schmidt_bounds(&PureState::maximally_entangled(d), n).unwrap();
                let expected = (d - n) as f64 / n as f64;
                assert!((lo.value - expected).abs() < 1e-12);
                assert!((hi.value - expected).abs() < 1e-12);
            }
        }
        let psi = PureState::with_dim(vec![0.8f64.sqrt(), 0.2f64.sqrt()], 3).unwrap();
        // rank 2 <= n = 2: already in S_2
        let (lo, hi) = gen_schmidt_bounds(&psi, 2).unwrap();
        assert_eq!((lo.value, hi.value), (0.0, 0.0));
        assert!(gen_schmidt_bounds(&psi, 0).is_err());
        assert!(gen_schmidt_bounds(&psi, 4).is_err());
    }

    #[test]
    fn gen_schmidt_bound_formula_values() {
        // raw formulas on a = (√0.8, √0.2, 0), d = 3, n = 2
        let s2: f64 = (0.8f64.sqrt() + 0.2f64.sqrt()).powi(2);
        assert!(((s2 / 2.0 - 1.0).max(0.0)).abs() < 1e-15);
        assert!((((s2 - 1.0) * 1.0 / 4.0) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn gen_schmidt_lower_bound_clamp_records_raw() {
        let psi = st(&[0.9f64.sqrt(), 0.06f64.sqrt(), 0.04f64.sqrt()]);
        let (lo, hi) = gen_schmidt_bounds(&psi, 2).unwrap();
        assert_eq!(lo.value, 0.0);
        assert!(lo.raw_value.unwrap() < 0.0);
        assert!(hi.value > 0.0);
    }

    #[test]
    fn maxent_exact_values() {
        assert_eq!(gen_schmidt_robustness_maxent(4, 2).unwrap().value, 1.0);
        assert_eq!(gen_schmidt_robustness_maxent(5, 5).unwrap().value, 0.0);
        assert_eq!(gen_schmidt_robustness_maxent(3, 1).unwrap().value, 2.0);
        assert!((random_schmidt_robustness_maxent(3, 2).unwrap().value - 1.0 / 15.0).abs() < 1e-15);
        assert!((random_schmidt_robustness_maxent(4, 2).unwrap().value - 1.0 / 14.0).abs() < 1e-15);
        assert_eq!(random_schmidt_robustness_maxent(4, 4).unwrap().value, 0.0);
    }

    #[test]
    fn random_schmidt_upper_values() {
        assert!((random_schmidt_upper_weak(3, 2).unwrap().value - 0.2).abs() < 1e-15);
        assert_eq!(random_schmidt_upper_weak(2, 1).unwrap().value, 1.0);
        assert!(random_schmidt_upper_weak(3, 3).is_err());

        let u3 = PureState::maximally_entangled(3);
        assert!((random_schmidt_upper(&u3, 2).unwrap().value - 1.0 / 15.0).abs() < 1e-15);
        assert_eq!(random_schmidt_upper(&PureState::product(4), 2).unwrap().value, 0.0);
        let u4 = PureState::maximally_entangled(4);
        assert!((random_schmidt_upper(&u4, 2).unwrap().value - 1.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn tight_at_max_entangled() {
        for d in 2..=8 {
            for n in 1..d {
                let up = random_schmidt_upper(&PureState::maximally_entangled(d), n).unwrap().value;
                let exact = random_schmidt_robustness_maxent(d, n).unwrap().value;
                assert!((up - exact).abs() < 1e-15, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn normalized_identity_rescaling() {
        let r = random_robustness_pure(&PureState::maximally_entangled(3)).with_normalized_identity();
        assert!((r.value - 3.0).abs() < 1e-12);
        assert!(r.normalized_identity);
        let s = robustness_pure(&PureState::maximally_entangled(3)).with_normalized_identity();
        assert!(!s.normalized_identity);
        assert!((s.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ball_radii() {
        for (k, radius, dp) in [(1, 2.0, 2), (2, 14.0, 4), (3, 34.0, 6)] {
            let b = conjectured_ball_radius(k, 40).unwrap();
            assert_eq!(b.radius.value, radius);
            assert_eq!(b.optimal_dprime, dp);
            assert!(b.matches_closed_form);
            assert_eq!(b.radius.kind, BoundKind::Conjectured);
        }
        for k in 1..=30 {
            let b = conjectured_ball_radius(k, 4 * k).unwrap();
            let dp = b.optimal_dprime as f64;
            assert!(b.continuous_minimizer >= dp - 1.0 && b.continuous_minimizer <= dp + 1.0);
        }
        assert!(conjectured_ball_radius(3, 3).is_err());
        // scan range too short to reach d' = 2k: no assertion, no match
        let b = conjectured_ball_radius(3, 5).unwrap();
        assert!(!b.matches_closed_form);
        assert_eq!(b.optimal_dprime, 5);
    }
}
