//! Adaptive composite Simpson quadrature with error control.
//!
//! The interval is first split into a fixed number of panels to obtain a
//! global estimate `I`. Each panel is then bisected until the Richardson
//! error estimate `|S₂ − S₁| / 15` falls below `rel_tol · |I|` scaled by the
//! panel's share of the interval. Panels still unresolved at `max_depth`
//! are accepted and their error is accumulated; the result is reported as
//! converged only if that accumulated error stays below the tolerance.

const INITIAL_PANELS: usize = 8;
const MAX_EVALUATIONS: usize = 20_000_000;

#[derive(Debug, Clone, Copy)]
pub struct SimpsonConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for SimpsonConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 0.0, max_depth: 60 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuadError {
    NonFinite { at: f64 },
    NotConverged { value: f64, error: f64 },
}

impl std::fmt::Display for QuadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuadError::NonFinite { at } => write!(f, "integrand is not finite at {at}"),
            QuadError::NotConverged { value, error } => {
                write!(f, "no convergence: estimate {value} with error {error}")
            }
        }
    }
}

impl std::error::Error for QuadError {}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f` over `[a, b]` (`a ≤ b`, both finite).
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &SimpsonConfig) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    assert!(a.is_finite() && b.is_finite() && a <= b, "bad interval [{a}, {b}]");
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let evaluations = std::cell::Cell::new(0usize);
    let eval = |x: f64| -> Result<f64, QuadError> {
        evaluations.set(evaluations.get() + 1);
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFinite { at: x })
        }
    };

    let h = (b - a) / INITIAL_PANELS as f64;
    let mut stack = Vec::with_capacity(2 * cfg.max_depth as usize + INITIAL_PANELS);
    let mut global = 0.0;
    let mut left = eval(a)?;
    for i in 0..INITIAL_PANELS {
        let pa = a + h * i as f64;
        let pb = if i + 1 == INITIAL_PANELS { b } else { a + h * (i + 1) as f64 };
        let fm = eval(0.5 * (pa + pb))?;
        let fb = eval(pb)?;
        let whole = simpson(pa, pb, left, fm, fb);
        global += whole;
        stack.push(Panel { a: pa, b: pb, fa: left, fm, fb, whole, depth: 0 });
        left = fb;
    }

    let tol = (cfg.rel_tol * global.abs()).max(cfg.abs_tol);
    let width = b - a;
    let mut value = 0.0;
    let mut compensation = 0.0;
    let mut error = 0.0;
    let mut unresolved = 0.0;

    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let flm = eval(0.5 * (p.a + m))?;
        let frm = eval(0.5 * (m + p.b))?;
        let l = simpson(p.a, m, p.fa, flm, p.fm);
        let r = simpson(m, p.b, p.fm, frm, p.fb);
        let diff = l + r - p.whole;
        let local = diff.abs() / 15.0;
        let share = tol * (p.b - p.a) / width;
        let at_floor = p.depth + 1 >= cfg.max_depth || evaluations.get() > MAX_EVALUATIONS;
        if local <= share || at_floor {
            // Kahan-summed accumulation of the extrapolated panel values
            let y = (l + r + diff / 15.0) - compensation;
            let t = value + y;
            compensation = (t - value) - y;
            value = t;
            error += local;
            if local > share {
                unresolved += local;
            }
        } else {
            stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: l, depth: p.depth + 1 });
            stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: r, depth: p.depth + 1 });
        }
    }

    if unresolved > tol {
        return Err(QuadError::NotConverged { value, error });
    }
    Ok(QuadResult { value, error, evaluations: evaluations.get() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        integrate(f, a, b, &SimpsonConfig::default()).unwrap().value
    }

    // Calibration integrals with known closed forms.

    #[test]
    fn sin_2psi_partial_integrals() {
        for k in 0..=50 {
            let x = FRAC_PI_2 * k as f64 / 50.0;
            let v = quad(|p| (2.0 * p).sin(), 0.0, x);
            assert!((v - x.sin().powi(2)).abs() <= 1e-10, "x={x}: {v}");
        }
        let full = quad(|p| (2.0 * p).sin(), 0.0, FRAC_PI_2);
        assert!((full - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn q_exp_minus_q_over_two() {
        for &l in &[0.0, 0.5, 1.0, 3.0, 10.0, 40.0] {
            let v = quad(|q| q * (-q / 2.0).exp(), 0.0, l);
            let exact = 4.0 - 2.0 * (l + 2.0) * (-l / 2.0).exp();
            assert!((v - exact).abs() <= 1e-10, "l={l}: {v} vs {exact}");
        }
        let v = quad(|q| q * (-q / 2.0).exp(), 0.0, 200.0);
        assert!((v - 4.0).abs() <= 1e-10);
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x * x, 0.0, 2.0, &SimpsonConfig::default()).unwrap();
        assert!((r.value - 4.0).abs() < 1e-14);
        assert!(r.evaluations < 100);
    }

    #[test]
    fn jump_discontinuity_converges() {
        let v = quad(|x| if x <= 1.0 { x.powi(3) } else { 0.0 }, 0.0, PI);
        assert!((v - 0.25).abs() < 1e-12, "{v}");
    }

    #[test]
    fn zero_integrand() {
        let r = integrate(|_| 0.0, 0.0, 5.0, &SimpsonConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(quad(|x| x, 1.0, 1.0), 0.0);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let e = integrate(|x| 1.0 / x, 0.0, 1.0, &SimpsonConfig::default()).unwrap_err();
        assert!(matches!(e, QuadError::NonFinite { at } if at == 0.0));
    }

    #[test]
    fn shallow_depth_reports_non_convergence() {
        let cfg = SimpsonConfig { rel_tol: 1e-14, abs_tol: 0.0, max_depth: 2 };
        let e = integrate(|x| (50.0 * x).sin().abs(), 0.0, 3.0, &cfg).unwrap_err();
        assert!(matches!(e, QuadError::NotConverged { .. }));
    }
}
