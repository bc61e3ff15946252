//! SU(2)-invariant, absolutely continuous probability measures on C².
//!
//! An invariant measure is determined by a radial profile `f` with finite
//! third moment. This crate provides the coordinate charts used to integrate
//! against such measures, the SU(2) group action, radial profiles with their
//! `|W|` laws, closed-form probabilities of cones, shells and balls, samplers
//! for `W`, and the statistical checks tying the samplers to the closed forms.
//!
//! ```
//! use su2meas::measure::{chain_probability, born_probability};
//!
//! assert_eq!(chain_probability(1.0), 0.5);
//! assert!((born_probability(2.0, 1.0).unwrap() - 0.8).abs() < 1e-15);
//! ```

pub mod coords;
pub mod error;
pub mod measure;
pub mod quadrature;
pub mod radial;
pub mod sampler;
pub mod stats;
pub mod su2;
pub mod verify;

pub use coords::{CartesianPoint, DoublePolarPoint, HopfPoint};
pub use error::{Error, Result};
pub use measure::{AngleSet, InvariantMeasure, RadiusSet};
pub use radial::{NormalizedProfile, ProfileKind, RadialProfile};
pub use sampler::SampleBatch;
pub use stats::TestReport;
pub use su2::SU2Matrix;

/// Formats a float with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}
