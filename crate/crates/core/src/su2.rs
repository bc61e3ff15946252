//! The group SU(2) acting on C².
//!
//! Every element has the block form `[[α, −β̄], [β, ᾱ]]` with
//! `|α|² + |β|² = 1`, so a matrix is stored as its first column `(α, β)`.
//! This also fixes the identification SU(2) ≅ S³ used by the statistical
//! tests: a matrix is the unit vector of its first column.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::coords::CartesianPoint;
use crate::error::{Error, Result};

/// Tolerance on `| |α|² + |β|² − 1 |`.
pub const UNIT_TOL: f64 = 1e-12;

/// Haar draws whose Gaussian seed vector is shorter than this are redrawn.
const MIN_SEED_NORM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU2Matrix {
    alpha: Complex64,
    beta: Complex64,
}

impl SU2Matrix {
    pub const IDENTITY: SU2Matrix =
        SU2Matrix { alpha: Complex64::new(1.0, 0.0), beta: Complex64::new(0.0, 0.0) };

    /// Builds the matrix with first column `(a_re + i a_im, b_re + i b_im)`.
    pub fn new(a_re: f64, a_im: f64, b_re: f64, b_im: f64) -> Result<Self> {
        let m = Self { alpha: Complex64::new(a_re, a_im), beta: Complex64::new(b_re, b_im) };
        let defect = (m.alpha.norm_sqr() + m.beta.norm_sqr() - 1.0).abs();
        if defect.is_finite() && defect <= UNIT_TOL {
            Ok(m)
        } else {
            Err(Error::InvalidArgument(format!(
                "|alpha|^2 + |beta|^2 deviates from 1 by {defect:e}"
            )))
        }
    }

    /// Builds a matrix from any nonzero first column by normalizing it.
    pub fn from_column(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let l = alpha.norm().hypot(beta.norm());
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(Self { alpha: alpha / l, beta: beta / l })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// `[a_re, a_im, b_re, b_im]`
    pub fn to_array(&self) -> [f64; 4] {
        [self.alpha.re, self.alpha.im, self.beta.re, self.beta.im]
    }

    /// The first column as a point of the unit sphere S³ ⊂ C².
    pub fn first_column(&self) -> CartesianPoint {
        CartesianPoint::new(self.alpha.re, self.alpha.im, self.beta.re, self.beta.im)
    }

    /// Full matrix, row-major.
    pub fn to_matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.alpha, -self.beta.conj()], [self.beta, self.alpha.conj()]]
    }

    pub fn unit_defect(&self) -> f64 {
        (self.alpha.norm_sqr() + self.beta.norm_sqr() - 1.0).abs()
    }

    /// `T_U(w) = U w`.
    pub fn apply(&self, w: &CartesianPoint) -> CartesianPoint {
        let a = Complex64::new(w.x, w.y);
        let b = Complex64::new(w.u, w.v);
        let na = self.alpha * a - self.beta.conj() * b;
        let nb = self.beta * a + self.alpha.conj() * b;
        CartesianPoint::new(na.re, na.im, nb.re, nb.im)
    }

    /// Matrix product `self · other`, renormalized onto the group.
    pub fn compose(&self, other: &SU2Matrix) -> SU2Matrix {
        let alpha = self.alpha * other.alpha - self.beta.conj() * other.beta;
        let beta = self.beta * other.alpha + self.alpha.conj() * other.beta;
        let l = alpha.norm().hypot(beta.norm());
        SU2Matrix { alpha: alpha / l, beta: beta / l }
    }

    /// Conjugate transpose.
    pub fn inverse(&self) -> SU2Matrix {
        SU2Matrix { alpha: self.alpha.conj(), beta: -self.beta }
    }

    /// The matrix `U_w` rotating `w` onto `(|w|, 0)`:
    /// rows `(ᾱ/l, β̄/l)` and `(−β/l, α/l)`.
    pub fn aligning(w: &CartesianPoint) -> Result<SU2Matrix> {
        if w.is_origin() {
            return Err(Error::ZeroVector);
        }
        let l = w.norm();
        let a = Complex64::new(w.x, w.y) / l;
        let b = Complex64::new(w.u, w.v) / l;
        Ok(SU2Matrix { alpha: a.conj(), beta: -b })
    }

    /// Draws a Haar-distributed element: four independent standard normals
    /// give a rotation-invariant vector of R⁴ whose direction is the first
    /// column.
    pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> SU2Matrix {
        loop {
            let g: [f64; 4] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let l = g[0].hypot(g[1]).hypot(g[2].hypot(g[3]));
            if l >= MIN_SEED_NORM {
                return SU2Matrix {
                    alpha: Complex64::new(g[0] / l, g[1] / l),
                    beta: Complex64::new(g[2] / l, g[3] / l),
                };
            }
        }
    }

    /// Largest entrywise distance between the two first columns.
    pub fn distance(&self, other: &SU2Matrix) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
