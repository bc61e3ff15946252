use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use su2meas::coords::eta;
use su2meas::sampler::{sample_gaussian_direct, sample_invariant, SampleBatch};
use su2meas::stats::{
    correlation, estimate_born, estimate_chain, invariance_test, ks_test, ks_two_sample, norm_values, psi_values,
    sorted,
};
use su2meas::verify::{gaussian_norm_cdf, rayleigh_cdf};
use su2meas::{CartesianPoint, InvariantMeasure, RadialProfile, SU2Matrix};

const N: usize = 100_000;

fn measure(p: RadialProfile) -> InvariantMeasure {
    InvariantMeasure::new(p.normalize().unwrap()).unwrap()
}

fn haar_columns(n: usize, seed: u64) -> Vec<CartesianPoint> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n).map(|_| SU2Matrix::haar_sample(&mut rng).first_column()).collect()
}

#[test]
fn haar_first_column_is_uniform_on_s3() {
    let cols = haar_columns(N, 110);
    assert!(cols.iter().all(|c| (c.norm() - 1.0).abs() <= 1e-12));
    let r = ks_test("haar_psi", &psi_values(&cols), |p| p.sin().powi(2));
    assert!(r.pass, "{r:?}");
    let phi = sorted(cols.iter().map(|c| eta(c.y, c.x)).collect());
    let theta = sorted(cols.iter().map(|c| eta(c.v, c.u)).collect());
    assert!(ks_test("haar_phi", &phi, |a| a / TAU).pass);
    assert!(ks_test("haar_theta", &theta, |a| a / TAU).pass);
}

#[test]
fn haar_sampler_is_left_invariant() {
    let mut rng = ChaCha20Rng::seed_from_u64(101);
    let v = SU2Matrix::haar_sample(&mut rng);
    let cols: Vec<CartesianPoint> = (0..N).map(|_| v.compose(&SU2Matrix::haar_sample(&mut rng)).first_column()).collect();
    let r = ks_test("haar_left_invariance", &psi_values(&cols), |p| p.sin().powi(2));
    assert!(r.pass, "{r:?}");
}

#[test]
fn haar_unitarity_over_many_draws() {
    let mut rng = ChaCha20Rng::seed_from_u64(102);
    for _ in 0..10_000 {
        assert!(SU2Matrix::haar_sample(&mut rng).unit_defect() <= 1e-12);
    }
}

#[test]
fn invariant_sampler_marginals() {
    let m = measure(RadialProfile::gaussian());
    let batch = sample_invariant(&m, N, 200);
    let r = ks_test("norm", &norm_values(&batch.points), gaussian_norm_cdf);
    assert!(r.pass, "{r:?}");
    for p in [RadialProfile::exponential(2.0).unwrap(), RadialProfile::ball_uniform(1.0).unwrap()] {
        let m = measure(p);
        let b = sample_invariant(&m, N, 202);
        let r = ks_test("psi", &psi_values(&b.points), |p| p.sin().powi(2));
        assert!(r.pass, "{r:?}");
        let r = ks_test("norm", &norm_values(&b.points), |l| m.profile().abs_cdf(l));
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn direct_sampler_marginals() {
    let batch = sample_gaussian_direct(N, 300);
    let a = sorted(batch.points.iter().map(CartesianPoint::alpha_abs).collect());
    let b = sorted(batch.points.iter().map(CartesianPoint::beta_abs).collect());
    assert!(ks_test("rayleigh_a", &a, rayleigh_cdf).pass);
    assert!(ks_test("rayleigh_b", &b, rayleigh_cdf).pass);
    assert!(ks_test("norm", &norm_values(&batch.points), gaussian_norm_cdf).pass);
    let x: Vec<f64> = batch.points.iter().map(|p| p.x).collect();
    let u: Vec<f64> = batch.points.iter().map(|p| p.u).collect();
    let c = correlation(&x, &u);
    assert!(c.abs() <= 0.01, "correlation {c}");
}

#[test]
fn two_samplers_agree_for_gaussian_profile() {
    let m = measure(RadialProfile::gaussian());
    let inv = sample_invariant(&m, N, 400);
    let dir = sample_gaussian_direct(N, 401);
    type Marginal = fn(&CartesianPoint) -> f64;
    let marginals: [(&str, Marginal); 4] = [
        ("psi", CartesianPoint::psi),
        ("norm", CartesianPoint::norm),
        ("phi", |w| eta(w.y, w.x)),
        ("theta", |w| eta(w.v, w.u)),
    ];
    for (name, f) in marginals {
        let a = sorted(inv.points.iter().map(f).collect());
        let b = sorted(dir.points.iter().map(f).collect());
        let r = ks_two_sample(name, &a, &b);
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn applying_haar_rotation_keeps_marginals() {
    let m = measure(RadialProfile::gaussian());
    let batch = sample_invariant(&m, N, 500);
    let u = SU2Matrix::haar_sample(&mut ChaCha20Rng::seed_from_u64(501));
    let r = invariance_test(&batch, &u);
    assert!(r.pass, "{r:?}");
    assert_eq!(invariance_test(&batch, &SU2Matrix::IDENTITY).statistic, 0.0);
}

#[test]
fn non_invariant_batch_fails_invariance() {
    // all mass on the α-axis: ψ = 0 everywhere
    let points: Vec<CartesianPoint> = (1..=10_000).map(|i| CartesianPoint::new(i as f64 * 1e-3, 0.0, 0.0, 0.0)).collect();
    let batch = SampleBatch { points, seed: 0, profile_id: "axis".into() };
    let u = SU2Matrix::haar_sample(&mut ChaCha20Rng::seed_from_u64(502));
    let r = invariance_test(&batch, &u);
    assert!(!r.pass, "{r:?}");
}

#[test]
fn wrong_psi_cdf_is_rejected() {
    let m = measure(RadialProfile::gaussian());
    let batch = sample_invariant(&m, N, 600);
    let r = ks_test("psi_linear", &psi_values(&batch.points), |p| p / std::f64::consts::FRAC_PI_2);
    assert!(!r.pass);
    // oracle: sup of |2ψ/π − sin²ψ| on a fine grid
    let gap = (0..=100_000)
        .map(|i| {
            let p = std::f64::consts::FRAC_PI_2 * i as f64 / 100_000.0;
            (p / std::f64::consts::FRAC_PI_2 - p.sin().powi(2)).abs()
        })
        .fold(0.0, f64::max);
    assert!((gap - 0.1055).abs() < 1e-3, "{gap}");
    assert!((r.statistic - gap).abs() < 0.01, "{} vs {gap}", r.statistic);
}

#[test]
fn ks_false_positive_rate_is_calibrated() {
    let m = measure(RadialProfile::gaussian());
    let failures = (0..200u64)
        .filter(|&k| {
            let b = sample_invariant(&m, 10_000, 10_000 + k);
            !ks_test("cal", &norm_values(&b.points), gaussian_norm_cdf).pass
        })
        .count();
    assert!(failures <= 6, "{failures} of 200 runs rejected");
}

#[test]
fn estimator_examples() {
    let m = measure(RadialProfile::gaussian());
    let batch = sample_invariant(&m, 1_000_000, 700);
    assert!(estimate_chain(&batch, 1e6) > 0.999_99);
    assert!((estimate_chain(&batch, 1.0) - 0.5).abs() <= 0.002);
    assert!((estimate_chain(&batch, 2.0) - 0.8).abs() <= 0.0016);
    assert!((estimate_born(&batch, 1.0, 2.0).unwrap() - 0.2).abs() <= 0.0016);
    assert!((estimate_born(&batch, 1.0, 1.0).unwrap() - 0.5).abs() <= 0.002);
    assert_eq!(estimate_born(&batch, 1.0, 0.0).unwrap(), 1.0);
    for (a, b) in [(1.0, 2.0), (3.0, 0.7), (0.2, 0.2)] {
        assert_eq!(estimate_born(&batch, a, b).unwrap(), estimate_chain(&batch, a / b));
    }
}

#[test]
fn single_point_golden_fixture() {
    let m = measure(RadialProfile::gaussian());
    let b = sample_invariant(&m, 1, 7);
    let p = b.points[0];
    let golden = GOLDEN_SEED_7;
    for (a, g) in p.to_array().iter().zip(golden) {
        assert!((a - g).abs() <= 1e-14 * g.abs().max(1.0), "{:?}", p.to_array());
    }
    assert_eq!(b.seed, 7);
    assert_eq!(b.profile_id, "gaussian");
}

const GOLDEN_SEED_7: [f64; 4] = [0.44445430199145464, -0.14014458406442262, -0.10531141020160543, 0.4882517118181434];
