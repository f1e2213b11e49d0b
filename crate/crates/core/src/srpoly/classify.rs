use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use super::PolyMap;
use crate::error::Result;
use crate::weighted_algebra::{Rational, Weight, WeightSpec};

/// Nested classes `STRICTLY_SUBRESONANT < STAR < SUBRESONANT`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SrClass {
    StrictlySubresonant,
    Star,
    Subresonant,
    NotSubresonant,
}

impl SrClass {
    /// Whether a map of class `self` also belongs to `other`.
    pub fn is_within(self, other: SrClass) -> bool {
        self <= other
    }
}

impl fmt::Display for SrClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SrClass::StrictlySubresonant => "STRICTLY_SUBRESONANT",
            SrClass::Star => "STAR",
            SrClass::Subresonant => "SUBRESONANT",
            SrClass::NotSubresonant => "NOT_SUBRESONANT",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub class: SrClass,
    pub weight: Weight,
}

/// Classifies `f` from its term weights.
///
/// Zero coefficients are never stored, so every stored term counts.
pub fn classify(f: &PolyMap) -> Classification {
    let zero = Rational::zero();
    let weight = f.weight();
    let class = if weight < Weight::Finite(zero) {
        SrClass::StrictlySubresonant
    } else if weight > Weight::Finite(zero) {
        SrClass::NotSubresonant
    } else if f.terms().filter(|(_, a, _)| a.degree() == 1).all(|(j, a, _)| f.term_weight(j, a) < zero) {
        SrClass::Star
    } else {
        SrClass::Subresonant
    };
    Classification { class, weight }
}

/// Largest degree of a term of weight `<= kappa`: `floor((eta_1 - kappa) / lambda_l)`.
///
/// Returns 0 when no term of positive degree can qualify.
pub fn max_degree(src: &WeightSpec, tgt: &WeightSpec, kappa: Rational) -> Result<u32> {
    src.require_negative()?;
    let d = ((tgt.min() - kappa) / src.max()).floor().to_integer();
    Ok(d.max(0) as u32)
}
