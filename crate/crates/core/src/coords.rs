//! Charts of C² \ {0}.
//!
//! A point `w = (α, β)` with `α = x + iy`, `β = u + iv` is stored as four
//! reals. Two charts cover it almost everywhere:
//!
//! * double polar `(r, ρ, φ, θ)`: `w = (r cos φ, r sin φ, ρ cos θ, ρ sin θ)`,
//!   volume element `r ρ dr dρ dφ dθ`;
//! * hyperspherical `(l, ψ, φ, θ)` with `r = l cos ψ`, `ρ = l sin ψ`,
//!   volume element `½ l³ sin 2ψ dl dψ dφ dθ`.
//!
//! The angular triple `(ψ, φ, θ)` are the Hopf coordinates of `w / |w|`.
//! Angles are stored in `[0, 2π)`. When a radius vanishes its angle is
//! meaningless and is reported as 0.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{Error, Result};

/// Angle of the planar point `(x, y)` in `[0, 2π)`; `eta(0, 0) = 0`.
///
/// Note the argument order matches `atan2`: ordinate first.
pub fn eta(y: f64, x: f64) -> f64 {
    let a = y.atan2(x);
    if a < 0.0 {
        (a + TAU).min(TAU.next_down())
    } else {
        // maps -0.0 to +0.0
        a + 0.0
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w + 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
}

impl CartesianPoint {
    pub const fn new(x: f64, y: f64, u: f64, v: f64) -> Self {
        Self { x, y, u, v }
    }

    /// Checked constructor rejecting NaN and infinities.
    pub fn try_new(x: f64, y: f64, u: f64, v: f64) -> Result<Self> {
        let p = Self::new(x, y, u, v);
        if p.is_finite() {
            Ok(p)
        } else {
            Err(Error::InvalidCoordinates(format!(
                "non-finite component in ({x}, {y}, {u}, {v})"
            )))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.u.is_finite() && self.v.is_finite()
    }

    pub fn is_origin(&self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.u == 0.0 && self.v == 0.0
    }

    /// `|α|`
    pub fn alpha_abs(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// `|β|`
    pub fn beta_abs(&self) -> f64 {
        self.u.hypot(self.v)
    }

    /// Euclidean norm `l = |w|`, computed without intermediate overflow.
    pub fn norm(&self) -> f64 {
        self.alpha_abs().hypot(self.beta_abs())
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x, self.y, self.u, self.v]
    }

    pub fn to_double_polar(&self) -> Result<DoublePolarPoint> {
        if self.is_origin() {
            return Err(Error::ZeroVector);
        }
        Ok(DoublePolarPoint {
            r: self.alpha_abs(),
            rho: self.beta_abs(),
            phi: eta(self.y, self.x),
            theta: eta(self.v, self.u),
        })
    }

    pub fn to_hopf(&self) -> Result<HopfPoint> {
        if self.is_origin() {
            return Err(Error::ZeroVector);
        }
        let r = self.alpha_abs();
        let rho = self.beta_abs();
        Ok(HopfPoint {
            l: r.hypot(rho),
            // atan2 yields exactly π/2 when r = 0
            psi: rho.atan2(r),
            phi: eta(self.y, self.x),
            theta: eta(self.v, self.u),
        })
    }

    /// Hyperspherical ψ of `w` alone; `π/2` exactly when `α = 0`.
    pub fn psi(&self) -> f64 {
        self.beta_abs().atan2(self.alpha_abs())
    }
}

/// Double polar coordinates `(r, ρ, φ, θ)` of a nonzero point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublePolarPoint {
    r: f64,
    rho: f64,
    phi: f64,
    theta: f64,
}

impl DoublePolarPoint {
    /// Angles are reduced into `[0, 2π)`; radii must be nonnegative and not
    /// both zero.
    pub fn new(r: f64, rho: f64, phi: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && rho.is_finite() && phi.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidCoordinates("non-finite double polar component".into()));
        }
        if r < 0.0 || rho < 0.0 {
            return Err(Error::InvalidCoordinates(format!("negative radius r={r}, rho={rho}")));
        }
        if r == 0.0 && rho == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self { r, rho, phi: wrap_angle(phi), theta: wrap_angle(theta) })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_cartesian(&self) -> CartesianPoint {
        let (sp, cp) = self.phi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        CartesianPoint::new(self.r * cp, self.r * sp, self.rho * ct, self.rho * st)
    }

    /// `|det J| = r ρ`
    pub fn jacobian(&self) -> f64 {
        self.r * self.rho
    }
}

/// Hyperspherical coordinates `(l, ψ, φ, θ)`; `(ψ, φ, θ)` are the Hopf
/// coordinates of the direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfPoint {
    l: f64,
    psi: f64,
    phi: f64,
    theta: f64,
}

impl HopfPoint {
    pub fn new(l: f64, psi: f64, phi: f64, theta: f64) -> Result<Self> {
        if !(l.is_finite() && psi.is_finite() && phi.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidCoordinates("non-finite hyperspherical component".into()));
        }
        if l <= 0.0 {
            return Err(Error::InvalidCoordinates(format!("radius l={l} must be positive")));
        }
        if !(0.0..=FRAC_PI_2).contains(&psi) {
            return Err(Error::InvalidCoordinates(format!("psi={psi} outside [0, pi/2]")));
        }
        Ok(Self { l, psi, phi: wrap_angle(phi), theta: wrap_angle(theta) })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_cartesian(&self) -> CartesianPoint {
        let (sp, cp) = self.phi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        let (ss, cs) = self.psi.sin_cos();
        let r = self.l * cs;
        let rho = self.l * ss;
        CartesianPoint::new(r * cp, r * sp, rho * ct, rho * st)
    }

    /// `|det J| = ½ l³ sin 2ψ`
    pub fn jacobian(&self) -> f64 {
        0.5 * self.l.powi(3) * (2.0 * self.psi).sin()
    }
}
