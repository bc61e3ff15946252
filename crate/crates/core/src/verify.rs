//! The verification suite: closed forms, samplers and the SU(2) action
//! checked against each other. Every check yields a [`TestReport`].

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use rand::Rng;

use crate::coords::CartesianPoint;
use crate::error::Result;
use crate::measure::{chain_probability, born_probability, AngleSet, InvariantMeasure};
use crate::quadrature::{integrate, SimpsonConfig};
use crate::radial::{RadialProfile, NORMALIZED_THIRD_MOMENT};
use crate::sampler::{sample_gaussian_direct, sample_invariant, substream, SampleBatch};
use crate::stats::{
    binomial_band, chi_square_independence, contingency, estimate_born, estimate_chain, invariance_test,
    ks_test, norm_values, psi_values, sorted, TestReport,
};
use crate::su2::SU2Matrix;

pub const CHAIN_PARAMETERS: [f64; 3] = [0.5, 1.0, 2.0];
pub const INVARIANCE_ROTATIONS: usize = 10;
pub const GEOMETRY_POINTS: usize = 100_000;
const GEOMETRY_TOL: f64 = 1e-12;

// Stream offsets from the suite seed for the independent random inputs.
const DIRECT_SEED_OFFSET: u64 = 1;
const HAAR_SEED_OFFSET: u64 = 2;
const GEOMETRY_SEED_OFFSET: u64 = 3;
const INTERVAL_SEED_OFFSET: u64 = 4;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub profile: RadialProfile,
    pub n: usize,
    pub seed: u64,
}

/// `1 − (l²/2 + 1) e^{−l²/2}`, the `|W|` CDF of the Gaussian profile.
pub fn gaussian_norm_cdf(l: f64) -> f64 {
    if l <= 0.0 {
        return 0.0;
    }
    let x = 0.5 * l * l;
    -(-x).exp_m1() - x * (-x).exp()
}

/// Rayleigh(1) CDF `1 − e^{−s²/2}`.
pub fn rayleigh_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        -(-0.5 * s * s).exp_m1()
    }
}

/// Rayleigh(1) quantile.
pub fn rayleigh_quantile(p: f64) -> f64 {
    (-2.0 * (-p).ln_1p()).sqrt()
}

pub fn cone_checks(seed: u64) -> Vec<TestReport> {
    let full = crate::measure::cone_probability(&AngleSet::full());
    let quarter = crate::measure::cone_probability(&AngleSet::interval(0.0, FRAC_PI_4).expect("valid"));
    let mut rng = substream(seed.wrapping_add(INTERVAL_SEED_OFFSET), 0);
    let cfg = SimpsonConfig::default();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = rng.random::<f64>() * FRAC_PI_2;
        let b = rng.random::<f64>() * FRAC_PI_2;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let closed = crate::measure::cone_probability(&AngleSet::interval(lo, hi).expect("valid"));
        let numeric = integrate(|p| (2.0 * p).sin(), lo, hi, &cfg).map(|r| r.value).unwrap_or(f64::NAN);
        worst = worst.max((closed - numeric).abs());
    }
    vec![
        TestReport::estimator("cone_full", 1, full, 1.0, 0.0),
        TestReport::estimator("cone_quarter", 1, quarter, 0.5, 1e-15),
        TestReport::new("cone_vs_quadrature", 50, worst, 1e-10),
    ]
}

pub fn normalization_checks(profile: &RadialProfile) -> Result<Vec<TestReport>> {
    let normalized = profile.clone().normalize()?;
    let analytic = normalized.third_moment();
    let numeric = normalized.scale() * profile.third_moment_numeric(1e-12)?;
    let rel = |v: f64| (v - NORMALIZED_THIRD_MOMENT).abs() / NORMALIZED_THIRD_MOMENT;
    let mut a = TestReport::new("third_moment_analytic", 1, rel(analytic), 1e-10);
    a.estimate = Some(analytic);
    a.target = Some(NORMALIZED_THIRD_MOMENT);
    let mut q = TestReport::new("third_moment_quadrature", 1, rel(numeric), 1e-10);
    q.estimate = Some(numeric);
    q.target = Some(NORMALIZED_THIRD_MOMENT);
    Ok(vec![a, q])
}

pub fn chain_checks(batch: &SampleBatch) -> Vec<TestReport> {
    CHAIN_PARAMETERS
        .iter()
        .map(|&t| {
            let p = chain_probability(t);
            TestReport::estimator(format!("chain_t{t}"), batch.len(), estimate_chain(batch, t), p, binomial_band(p, batch.len()))
        })
        .collect()
}

pub fn born_check(direct: &SampleBatch, a: f64, b: f64) -> Result<TestReport> {
    let p = born_probability(a, b)?;
    let est = estimate_born(direct, a, b)?;
    Ok(TestReport::estimator(format!("born_{a}_{b}"), direct.len(), est, p, binomial_band(p, direct.len())))
}

/// ψ, φ, θ and `|W|` marginals of an invariant batch.
pub fn marginal_checks(batch: &SampleBatch, m: &InvariantMeasure) -> Vec<TestReport> {
    let tag = &batch.profile_id;
    let psi = psi_values(&batch.points);
    let phi = sorted(batch.points.iter().map(|w| crate::coords::eta(w.y, w.x)).collect());
    let theta = sorted(batch.points.iter().map(|w| crate::coords::eta(w.v, w.u)).collect());
    let norms = norm_values(&batch.points);
    vec![
        ks_test(&format!("ks_psi[{tag}]"), &psi, |p| p.sin().powi(2)),
        ks_test(&format!("ks_phi[{tag}]"), &phi, |a| a / TAU),
        ks_test(&format!("ks_theta[{tag}]"), &theta, |a| a / TAU),
        ks_test(&format!("ks_norm[{tag}]"), &norms, |l| m.profile().abs_cdf(l)),
    ]
}

/// `|W|`, `|A|`, `|B|` laws and the independence of `|A|` and `|B|` on a
/// direct Gaussian batch.
pub fn gaussian_direct_checks(direct: &SampleBatch) -> Vec<TestReport> {
    let norms = norm_values(&direct.points);
    let a: Vec<f64> = direct.points.iter().map(CartesianPoint::alpha_abs).collect();
    let b: Vec<f64> = direct.points.iter().map(CartesianPoint::beta_abs).collect();
    let edges: Vec<f64> = [0.25, 0.5, 0.75].iter().map(|&p| rayleigh_quantile(p)).collect();
    let table = contingency(&a, &b, &edges, &edges);
    vec![
        ks_test("ks_norm[gaussian-direct]", &norms, gaussian_norm_cdf),
        ks_test("ks_rayleigh_a", &sorted(a), rayleigh_cdf),
        ks_test("ks_rayleigh_b", &sorted(b), rayleigh_cdf),
        chi_square_independence("rayleigh_independence", &table, 0.01),
    ]
}

pub fn invariance_checks(batch: &SampleBatch, seed: u64, rotations: usize) -> Vec<TestReport> {
    let mut rng = substream(seed.wrapping_add(HAAR_SEED_OFFSET), 0);
    (0..rotations)
        .map(|k| {
            let u = SU2Matrix::haar_sample(&mut rng);
            let mut r = invariance_test(batch, &u);
            r.name = format!("invariance_{k}");
            r
        })
        .collect()
}

fn rel_dist(a: &CartesianPoint, b: &CartesianPoint) -> f64 {
    let d = CartesianPoint::new(a.x - b.x, a.y - b.y, a.u - b.u, a.v - b.v);
    d.norm() / b.norm()
}

/// Chart round trips and the aligning property on random points of
/// `[-10, 10]⁴`.
pub fn geometry_checks(seed: u64, points: usize) -> Vec<TestReport> {
    let mut rng = substream(seed.wrapping_add(GEOMETRY_SEED_OFFSET), 0);
    let (mut hopf, mut polar, mut align) = (0.0f64, 0.0f64, 0.0f64);
    let mut done = 0;
    while done < points {
        let w = CartesianPoint::new(
            rng.random_range(-10.0..=10.0),
            rng.random_range(-10.0..=10.0),
            rng.random_range(-10.0..=10.0),
            rng.random_range(-10.0..=10.0),
        );
        if w.norm() < 1e-9 {
            continue;
        }
        done += 1;
        let h = w.to_hopf().expect("nonzero").to_cartesian();
        let p = w.to_double_polar().expect("nonzero").to_cartesian();
        hopf = hopf.max(rel_dist(&h, &w));
        polar = polar.max(rel_dist(&p, &w));
        let l = w.norm();
        let a = SU2Matrix::aligning(&w).expect("nonzero").apply(&w);
        let err = ((a.x - l).abs()).max(a.y.abs()).max(a.u.abs()).max(a.v.abs()) / l;
        align = align.max(err);
    }
    vec![
        TestReport::new("roundtrip_hopf", points, hopf, GEOMETRY_TOL),
        TestReport::new("roundtrip_double_polar", points, polar, GEOMETRY_TOL),
        TestReport::new("aligning_matrix", points, align, GEOMETRY_TOL),
    ]
}

/// Runs the whole suite for one profile.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<TestReport>> {
    let measure = InvariantMeasure::new(cfg.profile.clone().normalize()?)?;
    let batch = sample_invariant(&measure, cfg.n, cfg.seed);
    let direct = sample_gaussian_direct(cfg.n, cfg.seed.wrapping_add(DIRECT_SEED_OFFSET));

    let mut reports = cone_checks(cfg.seed);
    reports.extend(normalization_checks(&cfg.profile)?);
    reports.extend(chain_checks(&batch));
    reports.push(born_check(&direct, 2.0, 1.0)?);
    reports.extend(marginal_checks(&batch, &measure));
    reports.extend(gaussian_direct_checks(&direct));
    reports.extend(invariance_checks(&batch, cfg.seed, INVARIANCE_ROTATIONS));
    reports.extend(geometry_checks(cfg.seed, GEOMETRY_POINTS.min(cfg.n.max(1000))));
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_norm_cdf_matches_direct_formula() {
        for &l in &[0.01f64, 0.3, 1.0, 2.0, 5.0] {
            let direct = 1.0 - (0.5 * l * l + 1.0) * (-0.5 * l * l).exp();
            assert!((gaussian_norm_cdf(l) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn rayleigh_quantile_inverts_cdf() {
        for &p in &[0.01, 0.25, 0.5, 0.75, 0.99] {
            assert!((rayleigh_cdf(rayleigh_quantile(p)) - p).abs() < 1e-15);
        }
    }

    #[test]
    fn cone_checks_pass() {
        assert!(cone_checks(0).iter().all(|r| r.pass));
    }

    #[test]
    fn small_suite_runs() {
        let cfg = SuiteConfig { profile: RadialProfile::gaussian(), n: 2000, seed: 0 };
        let reports = run_suite(&cfg).unwrap();
        assert!(reports.len() > 20);
        let geometry: Vec<_> = reports.iter().filter(|r| r.name.starts_with("roundtrip")).collect();
        assert!(geometry.iter().all(|r| r.pass));
    }
}
