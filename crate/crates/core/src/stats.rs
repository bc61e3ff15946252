//! Monte Carlo estimators and goodness-of-fit tests.
//!
//! Every check produces a [`TestReport`] with `pass = statistic ≤ threshold`.
//! For estimator reports the statistic is `|estimate − target|` and the
//! threshold a 4σ binomial band.

use std::io::Write;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::coords::CartesianPoint;
use crate::error::{Error, Result};
use crate::fmt17;
use crate::sampler::SampleBatch;
use crate::su2::SU2Matrix;

/// Asymptotic Kolmogorov–Smirnov coefficient at α = 0.01.
pub const KS_COEFF_01: f64 = 1.63;

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub name: String,
    pub n: usize,
    pub statistic: f64,
    pub threshold: f64,
    pub estimate: Option<f64>,
    pub target: Option<f64>,
    pub pass: bool,
}

impl TestReport {
    pub fn new(name: impl Into<String>, n: usize, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            n,
            statistic,
            threshold,
            estimate: None,
            target: None,
            pass: statistic <= threshold,
        }
    }

    /// Report for an estimate compared with its target within `band`.
    pub fn estimator(name: impl Into<String>, n: usize, estimate: f64, target: f64, band: f64) -> Self {
        let mut r = Self::new(name, n, (estimate - target).abs(), band);
        r.estimate = Some(estimate);
        r.target = Some(target);
        r
    }

    /// One JSON object, 17 significant digits for every real.
    pub fn to_json(&self) -> String {
        let opt = |v: Option<f64>| v.map(json_number).unwrap_or_else(|| "null".to_string());
        format!(
            "{{\"name\":{},\"n\":{},\"statistic\":{},\"threshold\":{},\"estimate\":{},\"target\":{},\"pass\":{}}}",
            serde_json::Value::String(self.name.clone()),
            self.n,
            json_number(self.statistic),
            json_number(self.threshold),
            opt(self.estimate),
            opt(self.target),
            self.pass
        )
    }

    pub fn csv_header() -> &'static str {
        "name,n,statistic,threshold,estimate,target,pass"
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.name,
            self.n,
            fmt17(self.statistic),
            fmt17(self.threshold),
            opt(self.estimate),
            opt(self.target),
            self.pass
        )
    }
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        fmt17(x)
    } else {
        "null".to_string()
    }
}

/// Writes reports as JSON lines.
pub fn write_json_lines<W: Write>(out: &mut W, reports: &[TestReport]) -> std::io::Result<()> {
    for r in reports {
        writeln!(out, "{}", r.to_json())?;
    }
    Ok(())
}

/// 4σ half-width of a binomial proportion estimate.
pub fn binomial_band(p: f64, n: usize) -> f64 {
    4.0 * (p * (1.0 - p) / n as f64).sqrt()
}

fn fraction(count: usize, n: usize) -> f64 {
    count as f64 / n as f64
}

/// Fraction of points in the chain cone `|β| ≤ t|α|`.
pub fn estimate_chain(batch: &SampleBatch, t: f64) -> f64 {
    let hits = batch.points.iter().filter(|w| w.beta_abs() <= t * w.alpha_abs()).count();
    fraction(hits, batch.len())
}

/// Fraction of points with `a|α| ≥ b|β|`.
///
/// For `b > 0` this is exactly `estimate_chain(batch, a / b)`.
pub fn estimate_born(batch: &SampleBatch, a_mag: f64, b_mag: f64) -> Result<f64> {
    if !(a_mag >= 0.0 && b_mag >= 0.0 && a_mag.is_finite() && b_mag.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad amplitudes ({a_mag}, {b_mag})")));
    }
    if a_mag == 0.0 && b_mag == 0.0 {
        return Err(Error::BothZero);
    }
    if b_mag == 0.0 {
        return Ok(1.0);
    }
    Ok(estimate_chain(batch, a_mag / b_mag))
}

/// One-sample KS distance `sup |F_n − F|` for ascending `sorted`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |acc, (i, &x)| {
        let c = cdf(x);
        let above = (i as f64 + 1.0) / n - c;
        let below = c - i as f64 / n;
        acc.max(above).max(below)
    })
}

/// One-sample KS test at α = 0.01 with threshold `1.63 / √n`.
pub fn ks_test<F: Fn(f64) -> f64>(name: &str, sorted: &[f64], cdf: F) -> TestReport {
    debug_assert!(sorted.windows(2).all(|w| w[0] <= w[1]), "samples must be sorted");
    let n = sorted.len();
    TestReport::new(name, n, ks_statistic(sorted, cdf), KS_COEFF_01 / (n as f64).sqrt())
}

/// Two-sample KS distance between ascending samples.
pub fn ks_two_sample_statistic(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Two-sample KS test at α = 0.01, threshold `1.63 √((n+m)/(nm))`.
pub fn ks_two_sample(name: &str, a: &[f64], b: &[f64]) -> TestReport {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let threshold = KS_COEFF_01 * ((na + nb) / (na * nb)).sqrt();
    TestReport::new(name, a.len().min(b.len()), ks_two_sample_statistic(a, b), threshold)
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_unstable_by(f64::total_cmp);
    v
}

pub fn psi_values(points: &[CartesianPoint]) -> Vec<f64> {
    sorted(points.iter().map(CartesianPoint::psi).collect())
}

pub fn norm_values(points: &[CartesianPoint]) -> Vec<f64> {
    sorted(points.iter().map(CartesianPoint::norm).collect())
}

/// Two-sample KS on the ψ and `|w|` marginals of `batch` and `u · batch`;
/// the report carries the larger statistic.
pub fn invariance_test(batch: &SampleBatch, u: &SU2Matrix) -> TestReport {
    let moved: Vec<CartesianPoint> = batch.points.iter().map(|w| u.apply(w)).collect();
    let psi = ks_two_sample_statistic(&psi_values(&batch.points), &psi_values(&moved));
    let l = ks_two_sample_statistic(&norm_values(&batch.points), &norm_values(&moved));
    let n = batch.len();
    let threshold = KS_COEFF_01 * (2.0 / n as f64).sqrt();
    TestReport::new("invariance", n, psi.max(l), threshold)
}

/// Pearson correlation coefficient.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    sab / (saa * sbb).sqrt()
}

/// Pearson chi-square test of independence on a contingency table at
/// significance `alpha`.
pub fn chi_square_independence(name: &str, table: &[Vec<u64>], alpha: f64) -> TestReport {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    assert!(rows >= 2 && cols >= 2 && table.iter().all(|r| r.len() == cols), "table must be at least 2x2 and rectangular");
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let total: f64 = row_sums.iter().sum();
    let mut stat = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let expected = row_sums[i] * col_sums[j] / total;
            if expected > 0.0 {
                stat += (obs as f64 - expected).powi(2) / expected;
            }
        }
    }
    let dof = ((rows - 1) * (cols - 1)) as f64;
    let critical = ChiSquared::new(dof).expect("positive degrees of freedom").inverse_cdf(1.0 - alpha);
    TestReport::new(name, total as usize, stat, critical)
}

/// Counts pairs `(a, b)` into the cells cut by the ascending `edges`.
pub fn contingency(a: &[f64], b: &[f64], a_edges: &[f64], b_edges: &[f64]) -> Vec<Vec<u64>> {
    let mut table = vec![vec![0u64; b_edges.len() + 1]; a_edges.len() + 1];
    for (&x, &y) in a.iter().zip(b) {
        let i = a_edges.partition_point(|&e| e <= x);
        let j = b_edges.partition_point(|&e| e <= y);
        table[i][j] += 1;
    }
    table
}
