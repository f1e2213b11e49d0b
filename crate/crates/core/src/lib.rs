//! Weighted vector spaces, subresonant polynomial maps and their
//! linearization, with Lyapunov-exponent and temperedness tooling for
//! sequences of contracting maps.
//!
//! Weights are exact rationals; coefficients are `f64`. Coordinates are
//! always adapted, so every flag level is a coordinate prefix.

pub mod error;
pub mod tolerance;
pub mod weighted_algebra;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
pub use weighted_algebra::{Rational, Weight, WeightSpec};
pub mod srpoly;
pub mod linearizer;
pub mod cocycle;
pub mod tempered;
pub mod cli;
