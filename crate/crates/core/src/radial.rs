//! Radial profiles of invariant measures.
//!
//! An SU(2)-invariant absolutely continuous measure on C² has density
//! `f(|w|)` for a nonnegative profile `f`. The measure is finite iff the
//! third moment `M₃(f) = ∫₀^∞ l³ f(l) dl` is finite, and it is a probability
//! measure iff `M₃(f) = 1/(2π²)`. The norm `|W|` of a sample then has density
//! `2π² l³ f(l)`.
//!
//! All built-in kinds have closed-form moments and partial third moments, so
//! the `|W|` CDF is evaluated exactly; the adaptive quadrature path is kept
//! as an independent route to the same numbers.

use std::f64::consts::PI;
use std::fmt;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::quadrature::{self, SimpsonConfig};

/// `1 / (2π²)`, the third moment of every probability profile.
pub const NORMALIZED_THIRD_MOMENT: f64 = 1.0 / (2.0 * PI * PI);

const CDF_TABLE_POINTS: usize = 200;
const TAIL_RATIO: f64 = 1e-16;
const MAX_PROBE_DOUBLINGS: u32 = 1100;

/// Piecewise-linear profile on an ascending grid, zero outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
    // prefix[i] = ∫_{grid[0]}^{grid[i]} q³ f(q) dq
    prefix: Vec<f64>,
}

impl TabulatedProfile {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidProfile(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(Error::InvalidProfile("a tabulated profile needs at least 2 points".into()));
        }
        for (i, (&l, &f)) in grid.iter().zip(&values).enumerate() {
            if !l.is_finite() || l < 0.0 {
                return Err(Error::InvalidProfile(format!("grid point {i} ({l}) is not a finite nonnegative radius")));
            }
            if !f.is_finite() || f < 0.0 {
                return Err(Error::InvalidProfile(format!("value {i} ({f}) is not finite and nonnegative")));
            }
            if i > 0 && l <= grid[i - 1] {
                return Err(Error::InvalidProfile(format!("grid is not strictly ascending at point {i}")));
            }
        }
        let mut prefix = Vec::with_capacity(grid.len());
        prefix.push(0.0);
        for i in 1..grid.len() {
            let seg = segment_moment(3, grid[i - 1], grid[i] - grid[i - 1], values[i - 1], values[i]);
            prefix.push(prefix[i - 1] + seg);
        }
        Ok(Self { grid, values, prefix })
    }

    /// Parses two-column CSV `l,f`. A non-numeric first row is taken as a
    /// header. Errors carry the 1-based line number.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (idx, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                Error::Parse { line, message: e.to_string() }
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(idx as u64 + 1);
            if rec.iter().all(|s| s.is_empty()) {
                continue;
            }
            if rec.len() != 2 {
                return Err(Error::Parse { line, message: format!("expected 2 columns, found {}", rec.len()) });
            }
            let l = rec[0].parse::<f64>();
            let f = rec[1].parse::<f64>();
            let (l, f) = match (l, f) {
                (Ok(l), Ok(f)) => (l, f),
                _ if idx == 0 => continue,
                (Err(e), _) => {
                    return Err(Error::Parse { line, message: format!("bad radius {:?}: {e}", &rec[0]) })
                }
                (_, Err(e)) => {
                    return Err(Error::Parse { line, message: format!("bad value {:?}: {e}", &rec[1]) })
                }
            };
            if !l.is_finite() || l < 0.0 {
                return Err(Error::Parse { line, message: format!("radius {l} must be finite and nonnegative") });
            }
            if !f.is_finite() || f < 0.0 {
                return Err(Error::Parse { line, message: format!("value {f} must be finite and nonnegative") });
            }
            if let Some(&prev) = grid.last() {
                if l <= prev {
                    return Err(Error::Parse { line, message: format!("radius {l} does not exceed previous {prev}") });
                }
            }
            grid.push(l);
            values.push(f);
        }
        if grid.len() < 2 {
            return Err(Error::Parse {
                line: 0,
                message: format!("need at least 2 data rows, found {}", grid.len()),
            });
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn eval(&self, l: f64) -> f64 {
        let n = self.grid.len();
        if !(l >= self.grid[0] && l <= self.grid[n - 1]) {
            return 0.0;
        }
        let i = self.grid.partition_point(|&g| g <= l);
        if i >= n {
            return self.values[n - 1];
        }
        let (x0, x1) = (self.grid[i - 1], self.grid[i]);
        let t = (l - x0) / (x1 - x0);
        self.values[i - 1] + t * (self.values[i] - self.values[i - 1])
    }

    fn moment(&self, k: u32) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(g, v)| segment_moment(k, g[0], g[1] - g[0], v[0], v[1]))
            .sum()
    }

    fn partial_third_moment(&self, l: f64) -> f64 {
        let n = self.grid.len();
        if l <= self.grid[0] {
            return 0.0;
        }
        if l >= self.grid[n - 1] {
            return self.prefix[n - 1];
        }
        let i = self.grid.partition_point(|&g| g <= l);
        let x0 = self.grid[i - 1];
        self.prefix[i - 1] + segment_moment(3, x0, l - x0, self.values[i - 1], self.eval(l))
    }
}

/// `∫_{x0}^{x0+h} q^k f(q) dq` for `f` linear from `f0` to `f1`.
///
/// Expanded binomially in `q = x0 + s h`; every term is nonnegative, so
/// there is no cancellation.
fn segment_moment(k: u32, x0: f64, h: f64, f0: f64, f1: f64) -> f64 {
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        let jf = j as f64;
        let term = binom * x0.powi((k - j) as i32) * h.powi(j as i32 + 1) * (f0 + (jf + 1.0) * f1)
            / ((jf + 1.0) * (jf + 2.0));
        sum += term;
        binom = binom * (k - j) as f64 / (jf + 1.0);
    }
    sum
}

/// Regularized lower incomplete gamma `P(n, y)` for integer `n ≥ 1`.
fn lower_gamma_regularized(n: u32, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y < n as f64 + 1.0 {
        // P(n, y) = e^{-y} y^n Σ_k y^k / (n + k)!
        let mut fact = 1.0;
        for i in 2..=n {
            fact *= i as f64;
        }
        let mut term = y.powi(n as i32) / fact;
        let mut sum = term;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= y / (n as f64 + k);
            sum += term;
            k += 1.0;
        }
        (sum * (-y).exp()).min(1.0)
    } else {
        // Q(n, y) = e^{-y} Σ_{k<n} y^k / k!
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..n {
            term *= y / k as f64;
            sum += term;
        }
        (1.0 - (-y).exp() * sum).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `e^{-l²/2} / (4π²)`, the profile of four independent N(0, 1) reals.
    Gaussian,
    /// `e^{-rate·l}`
    Exponential { rate: f64 },
    /// `1` on `[0, radius]`, `0` beyond.
    BallUniform { radius: f64 },
    Tabulated(TabulatedProfile),
}

/// A nonnegative profile `weight · kind(l)` with finite third moment.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    kind: ProfileKind,
    weight: f64,
}

impl RadialProfile {
    pub fn gaussian() -> Self {
        Self { kind: ProfileKind::Gaussian, weight: 1.0 }
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidProfile(format!("exponential rate {rate} must be positive")));
        }
        Ok(Self { kind: ProfileKind::Exponential { rate }, weight: 1.0 })
    }

    pub fn ball_uniform(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidProfile(format!("ball radius {radius} must be positive")));
        }
        Ok(Self { kind: ProfileKind::BallUniform { radius }, weight: 1.0 })
    }

    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(Self { kind: ProfileKind::Tabulated(TabulatedProfile::new(grid, values)?), weight: 1.0 })
    }

    pub fn tabulated_from_csv<R: Read>(reader: R) -> Result<Self> {
        Ok(Self { kind: ProfileKind::Tabulated(TabulatedProfile::from_csv_reader(reader)?), weight: 1.0 })
    }

    pub fn tabulated_from_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::tabulated_from_csv(std::io::BufReader::new(file))
    }

    /// Multiplies the profile by `factor ≥ 0`.
    pub fn scaled(mut self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::InvalidProfile(format!("scale factor {factor} must be finite and nonnegative")));
        }
        self.weight *= factor;
        Ok(self)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `f(l)`; zero for negative `l`.
    pub fn eval(&self, l: f64) -> f64 {
        if l < 0.0 {
            return 0.0;
        }
        let base = match &self.kind {
            ProfileKind::Gaussian => (-0.5 * l * l).exp() / (4.0 * PI * PI),
            ProfileKind::Exponential { rate } => (-rate * l).exp(),
            ProfileKind::BallUniform { radius } => {
                if l <= *radius {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileKind::Tabulated(t) => t.eval(l),
        };
        self.weight * base
    }

    /// End of the support when it is bounded.
    pub fn support_end(&self) -> Option<f64> {
        match &self.kind {
            ProfileKind::BallUniform { radius } => Some(*radius),
            ProfileKind::Tabulated(t) => t.grid.last().copied(),
            _ => None,
        }
    }

    /// Moment `∫₀^∞ l^k f(l) dl` for `k ≤ 3`, in closed form.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k > 3 {
            return Err(Error::InvalidArgument(format!("moment order {k} exceeds 3")));
        }
        let base = match &self.kind {
            ProfileKind::Gaussian => {
                // ∫ l^k e^{-l²/2} dl = √(π/2), 1, √(π/2), 2
                let g = [(PI / 2.0).sqrt(), 1.0, (PI / 2.0).sqrt(), 2.0][k as usize];
                g / (4.0 * PI * PI)
            }
            ProfileKind::Exponential { rate } => {
                let fact = [1.0, 1.0, 2.0, 6.0][k as usize];
                fact / rate.powi(k as i32 + 1)
            }
            ProfileKind::BallUniform { radius } => radius.powi(k as i32 + 1) / (k as f64 + 1.0),
            ProfileKind::Tabulated(t) => t.moment(k),
        };
        let m = self.weight * base;
        if m.is_finite() {
            Ok(m)
        } else {
            Err(Error::DivergentMoment(format!("moment {k} of {self} overflows")))
        }
    }

    /// `M₃(f)`, analytic for every kind.
    pub fn third_moment(&self) -> Result<f64> {
        self.moment(3)
    }

    /// `M₃(f)` by adaptive Simpson quadrature of `l³ f(l)` on `[0, l_max]`.
    pub fn third_moment_numeric(&self, rel_tol: f64) -> Result<f64> {
        let cfg = SimpsonConfig { rel_tol, ..SimpsonConfig::default() };
        let integrand = |l: f64| l * l * l * self.eval(l);
        let breaks: Vec<f64> = match &self.kind {
            ProfileKind::Tabulated(t) => {
                let mut b = vec![0.0];
                b.extend(t.grid.iter().copied().filter(|&g| g > 0.0));
                b
            }
            _ => vec![0.0, self.truncation_radius()?],
        };
        let mut total = 0.0;
        for w in breaks.windows(2) {
            let r = quadrature::integrate(integrand, w[0], w[1], &cfg)
                .map_err(|e| Error::DivergentMoment(e.to_string()))?;
            total += r.value;
        }
        Ok(total)
    }

    /// `∫₀^l q³ f(q) dq` in closed form.
    pub fn partial_third_moment(&self, l: f64) -> f64 {
        if l <= 0.0 {
            return 0.0;
        }
        let base = match &self.kind {
            ProfileKind::Gaussian => 2.0 * lower_gamma_regularized(2, 0.5 * l * l) / (4.0 * PI * PI),
            ProfileKind::Exponential { rate } => 6.0 / rate.powi(4) * lower_gamma_regularized(4, rate * l),
            ProfileKind::BallUniform { radius } => l.min(*radius).powi(4) / 4.0,
            ProfileKind::Tabulated(t) => t.partial_third_moment(l),
        };
        self.weight * base
    }

    /// Radius beyond which the third-moment integrand is negligible.
    ///
    /// Bounded supports end where they end; otherwise the radius is doubled
    /// from 1 until `l³ f(l)` drops below `1e-16` times the integral so far.
    pub fn truncation_radius(&self) -> Result<f64> {
        if let Some(end) = self.support_end() {
            return Ok(end);
        }
        let mut l = 1.0;
        for _ in 0..MAX_PROBE_DOUBLINGS {
            let bound = l * l * l * self.eval(l);
            if bound <= TAIL_RATIO * self.partial_third_moment(l) {
                return Ok(l);
            }
            l *= 2.0;
            if !l.is_finite() {
                break;
            }
        }
        Err(Error::DivergentMoment(format!("tail of {self} does not decay")))
    }

    pub fn normalize(self) -> Result<NormalizedProfile> {
        NormalizedProfile::new(self)
    }
}

impl fmt::Display for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ProfileKind::Gaussian => write!(f, "gaussian")?,
            ProfileKind::Exponential { rate } => write!(f, "exponential:{rate}")?,
            ProfileKind::BallUniform { radius } => write!(f, "ball:{radius}")?,
            ProfileKind::Tabulated(t) => write!(f, "tabulated[{}]", t.grid.len())?,
        }
        if self.weight != 1.0 {
            write!(f, "*{}", self.weight)?;
        }
        Ok(())
    }
}

/// A profile rescaled into the probability class `M₃(scale·f) = 1/(2π²)`,
/// with the `|W|` CDF table used for quantile inversion.
#[derive(Debug, Clone)]
pub struct NormalizedProfile {
    profile: RadialProfile,
    scale: f64,
    raw_third_moment: f64,
    l_max: f64,
    // (l, cdf(l)) on a uniform grid of [0, l_max]
    table: Vec<(f64, f64)>,
}

impl NormalizedProfile {
    pub fn new(profile: RadialProfile) -> Result<Self> {
        let m3 = profile.third_moment()?;
        if m3 <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let scale = NORMALIZED_THIRD_MOMENT / m3;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::DivergentMoment(format!("scale for {profile} is not representable")));
        }
        let l_max = profile.truncation_radius()?;
        let mut np = Self { profile, scale, raw_third_moment: m3, l_max, table: Vec::new() };
        np.table = (0..CDF_TABLE_POINTS)
            .map(|i| {
                let l = l_max * i as f64 / (CDF_TABLE_POINTS - 1) as f64;
                (l, np.abs_cdf(l))
            })
            .collect();
        Ok(np)
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn l_max(&self) -> f64 {
        self.l_max
    }

    /// `scale · f(l)`
    pub fn eval(&self, l: f64) -> f64 {
        self.scale * self.profile.eval(l)
    }

    /// `M₃(scale · f)`; equals `1/(2π²)` up to rounding.
    pub fn third_moment(&self) -> f64 {
        self.scale * self.raw_third_moment
    }

    /// Moments of `scale · f` of order `k ≤ 3`.
    pub fn moment(&self, k: u32) -> Result<f64> {
        Ok(self.scale * self.profile.moment(k)?)
    }

    /// Density of `|W|`: `2π² l³ scale f(l)`.
    pub fn abs_density(&self, l: f64) -> f64 {
        if l <= 0.0 {
            return 0.0;
        }
        2.0 * PI * PI * l * l * l * self.eval(l)
    }

    /// `P[|W| < l]`.
    pub fn abs_cdf(&self, l: f64) -> f64 {
        if l <= 0.0 {
            return 0.0;
        }
        (self.profile.partial_third_moment(l) / self.raw_third_moment).clamp(0.0, 1.0)
    }

    /// Smallest `l` with `abs_cdf(l) ≥ u`, by bisection from the cached table.
    /// `u ≤ 0` gives 0; `u ≥ 1` gives the truncation radius.
    pub fn abs_quantile(&self, u: f64) -> f64 {
        if u.is_nan() || u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return self.l_max;
        }
        let i = self.table.partition_point(|&(_, c)| c < u);
        let (mut lo, mut hi) = if i == 0 {
            return 0.0;
        } else if i < self.table.len() {
            (self.table[i - 1].0, self.table[i].0)
        } else {
            let mut lo = self.l_max;
            let mut hi = 2.0 * self.l_max;
            while self.abs_cdf(hi) < u && hi.is_finite() {
                lo = hi;
                hi *= 2.0;
            }
            (lo, hi)
        };
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return hi;
            }
            if self.abs_cdf(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
}
