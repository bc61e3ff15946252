//! Closed-form probabilities of an invariant measure `μ_f`.
//!
//! In hyperspherical coordinates `dμ_f = ½ l³ f(l) sin 2ψ dl dψ dφ dθ`, so
//! on product sets the measure factorizes into a radial part, which depends
//! on `f` through the `|W|` CDF, and an angular part `∫_Ψ sin 2ψ dψ`, which
//! does not depend on `f` at all. Cone probabilities, the chain
//! `A_t = {|β| ≤ t|α|}` and the Born rule are all angular.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::radial::NormalizedProfile;

/// Finite union of closed intervals of `[0, π/2]`, sorted and disjoint
/// (touching endpoints allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSet {
    intervals: Vec<(f64, f64)>,
}

impl AngleSet {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        check_intervals(&intervals, FRAC_PI_2)?;
        Ok(Self { intervals })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi)])
    }

    pub fn full() -> Self {
        Self { intervals: vec![(0.0, FRAC_PI_2)] }
    }

    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, psi: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= psi && psi <= b)
    }
}

/// Finite union of closed intervals of `[0, ∞]`, sorted and disjoint; the
/// upper end of the last interval may be `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSet {
    intervals: Vec<(f64, f64)>,
}

impl RadiusSet {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        check_intervals(&intervals, f64::INFINITY)?;
        Ok(Self { intervals })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi)])
    }

    pub fn full() -> Self {
        Self { intervals: vec![(0.0, f64::INFINITY)] }
    }

    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn contains(&self, l: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= l && l <= b)
    }
}

fn check_intervals(intervals: &[(f64, f64)], upper: f64) -> Result<()> {
    let mut prev_hi = f64::NEG_INFINITY;
    for (i, &(lo, hi)) in intervals.iter().enumerate() {
        if lo.is_nan() || hi.is_nan() || !lo.is_finite() {
            return Err(Error::InvalidSet(format!("interval {i} has a non-finite lower end")));
        }
        if !(0.0 <= lo && lo <= hi && hi <= upper) {
            return Err(Error::InvalidSet(format!("interval {i} = [{lo}, {hi}] not inside [0, {upper}]")));
        }
        if lo < prev_hi {
            return Err(Error::InvalidSet(format!("interval {i} overlaps or precedes its predecessor")));
        }
        prev_hi = hi;
    }
    Ok(())
}

/// `∫_Ψ sin 2ψ dψ = Σ (sin²ψ₂ − sin²ψ₁)`; independent of any profile.
pub fn cone_probability(psi_set: &AngleSet) -> f64 {
    psi_set
        .intervals
        .iter()
        .map(|&(a, b)| sin_sq(b) - sin_sq(a))
        .sum::<f64>()
        .clamp(0.0, 1.0)
}

fn sin_sq(psi: f64) -> f64 {
    if psi == FRAC_PI_2 {
        1.0
    } else {
        psi.sin().powi(2)
    }
}

/// `p(t) = μ(|β| ≤ t|α|) = t² / (1 + t²)` for every invariant probability.
///
/// # Panics
/// If `t` is negative, NaN or infinite; the full cone is
/// `born_probability(a, 0)`.
pub fn chain_probability(t: f64) -> f64 {
    assert!(t.is_finite() && t >= 0.0, "chain parameter must be finite and nonnegative, got {t}");
    if t <= 1.0 {
        let t2 = t * t;
        t2 / (1.0 + t2)
    } else {
        let s = 1.0 / t;
        1.0 / (1.0 + s * s)
    }
}

/// `P[|a||A| ≥ |b||B|] = a² / (a² + b²)`.
pub fn born_probability(a_mag: f64, b_mag: f64) -> Result<f64> {
    if !(a_mag.is_finite() && b_mag.is_finite() && a_mag >= 0.0 && b_mag >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "amplitude magnitudes must be finite and nonnegative, got ({a_mag}, {b_mag})"
        )));
    }
    if a_mag == 0.0 && b_mag == 0.0 {
        return Err(Error::BothZero);
    }
    if b_mag == 0.0 {
        return Ok(1.0);
    }
    let t = a_mag / b_mag;
    if t.is_infinite() {
        return Ok(1.0);
    }
    Ok(chain_probability(t))
}

/// An SU(2)-invariant probability measure with normalized radial profile.
#[derive(Debug, Clone)]
pub struct InvariantMeasure {
    profile: NormalizedProfile,
}

impl InvariantMeasure {
    pub fn new(profile: NormalizedProfile) -> Result<Self> {
        let m = Self { profile };
        let total = m.shell_measure(&RadiusSet::full());
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidProfile(format!("total mass {total} differs from 1")));
        }
        Ok(m)
    }

    pub fn profile(&self) -> &NormalizedProfile {
        &self.profile
    }

    /// `μ(T_h(A_Ψ))`. Reads no profile data.
    pub fn cone_measure(&self, psi_set: &AngleSet) -> f64 {
        cone_probability(psi_set)
    }

    /// `μ(T_h(A_L)) = 2π² ∫_L l³ f(l) dl`.
    pub fn shell_measure(&self, l_set: &RadiusSet) -> f64 {
        l_set
            .intervals
            .iter()
            .map(|&(a, b)| {
                let hi = if b.is_infinite() { 1.0 } else { self.profile.abs_cdf(b) };
                hi - self.profile.abs_cdf(a)
            })
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    /// Measure of the closed ball `|w| ≤ radius`.
    pub fn ball_measure(&self, radius: f64) -> f64 {
        self.profile.abs_cdf(radius.max(0.0))
    }

    /// Measure of `{ |w| ∈ L, ψ ∈ Ψ }`.
    pub fn product_measure(&self, l_set: &RadiusSet, psi_set: &AngleSet) -> f64 {
        self.shell_measure(l_set) * self.cone_measure(psi_set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialProfile;
    use crate::quadrature::{integrate, SimpsonConfig};
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn gaussian() -> InvariantMeasure {
        InvariantMeasure::new(RadialProfile::gaussian().normalize().unwrap()).unwrap()
    }

    #[test]
    fn cone_examples() {
        let m = gaussian();
        assert_eq!(m.cone_measure(&AngleSet::full()), 1.0);
        assert!((m.cone_measure(&AngleSet::interval(0.0, FRAC_PI_4).unwrap()) - 0.5).abs() <= 1e-15);
        let v = m.cone_measure(&AngleSet::interval(FRAC_PI_6, FRAC_PI_3).unwrap());
        assert!((v - 0.5).abs() <= 1e-15);
        assert_eq!(m.cone_measure(&AngleSet::empty()), 0.0);
    }

    #[test]
    fn shell_examples() {
        let m = gaussian();
        assert_eq!(m.shell_measure(&RadiusSet::full()), 1.0);
        assert_eq!(m.shell_measure(&RadiusSet::empty()), 0.0);
        for &r in &[0.5f64, 1.0, 2.0, 3.5] {
            let exact = 1.0 - (r * r / 2.0 + 1.0) * (-r * r / 2.0).exp();
            let v = m.shell_measure(&RadiusSet::interval(0.0, r).unwrap());
            assert!((v - exact).abs() <= 1e-14);
            // ball oracle: ½ l³ e^{-l²/2} integrated numerically
            let q = integrate(|l| 0.5 * l.powi(3) * (-0.5 * l * l).exp(), 0.0, r, &SimpsonConfig::default())
                .unwrap()
                .value;
            assert!((v - q).abs() <= 1e-10);
            assert_eq!(m.ball_measure(r), v);
        }
    }

    #[test]
    fn product_examples() {
        let m = gaussian();
        assert_eq!(m.product_measure(&RadiusSet::full(), &AngleSet::full()), 1.0);
        let v = m.product_measure(&RadiusSet::full(), &AngleSet::interval(0.0, FRAC_PI_4).unwrap());
        assert!((v - 0.5).abs() <= 1e-15);
        let shell = RadiusSet::interval(0.0, 1.0).unwrap();
        assert_eq!(m.product_measure(&shell, &AngleSet::full()), m.shell_measure(&shell));
    }

    #[test]
    fn chain_examples() {
        assert_eq!(chain_probability(0.0), 0.0);
        assert_eq!(chain_probability(1.0), 0.5);
        assert!((chain_probability(2.0) - 0.8).abs() <= 1e-16);
        assert!((chain_probability(1e200) - 1.0).abs() <= 1e-16);
    }

    #[test]
    #[should_panic]
    fn chain_rejects_negative() {
        chain_probability(-1.0);
    }

    #[test]
    fn chain_equals_cone_up_to_arctan() {
        for &t in &[0.0, 0.1, 0.5, 1.0, 2.0, 10.0, 1e6] {
            let cone = cone_probability(&AngleSet::interval(0.0, f64::atan(t)).unwrap());
            assert!((chain_probability(t) - cone).abs() <= 1e-14, "t={t}");
        }
    }

    #[test]
    fn born_examples() {
        assert_eq!(born_probability(1.0, 1.0).unwrap(), 0.5);
        assert!((born_probability(2.0, 1.0).unwrap() - 0.8).abs() <= 1e-16);
        assert_eq!(born_probability(1.0, 0.0).unwrap(), 1.0);
        assert_eq!(born_probability(0.0, 3.0).unwrap(), 0.0);
        assert!(matches!(born_probability(0.0, 0.0), Err(Error::BothZero)));
        assert!(born_probability(-1.0, 1.0).is_err());
        assert_eq!(born_probability(3.0, 7.0).unwrap(), chain_probability(3.0 / 7.0));
    }

    #[test]
    fn set_validation() {
        assert!(AngleSet::interval(0.2, 0.1).is_err());
        assert!(AngleSet::interval(0.0, 2.0).is_err());
        assert!(AngleSet::new(vec![(0.0, 0.5), (0.4, 0.6)]).is_err());
        assert!(AngleSet::new(vec![(0.0, 0.5), (0.5, 0.6)]).is_ok());
        assert!(RadiusSet::interval(-1.0, 1.0).is_err());
        assert!(RadiusSet::interval(1.0, f64::INFINITY).is_ok());
        assert!(RadiusSet::interval(f64::INFINITY, f64::INFINITY).is_err());
        assert!(RadiusSet::interval(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn cone_ignores_profile() {
        let set = AngleSet::new(vec![(0.1, 0.3), (0.7, 1.2)]).unwrap();
        let a = gaussian().cone_measure(&set);
        let b = InvariantMeasure::new(RadialProfile::ball_uniform(1.0).unwrap().normalize().unwrap())
            .unwrap()
            .cone_measure(&set);
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
