//! Numerical tolerances shared by the weight, polynomial and linearization code.

use crate::error::{Error, Result};

/// Environment variable read by [`Tolerances::from_env`].
pub const ENV_VAR: &str = "SUBRES_TOL";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Entries below `zero * max|entry|` count as zero when computing weights.
    pub zero: f64,
    /// Polynomial coefficients with magnitude at or below this are dropped.
    pub drop: f64,
    /// Accepted max-abs coefficient residual of an inversion round trip.
    pub round_trip: f64,
    /// Determinants below this (in absolute value) are treated as singular.
    pub singular: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero: 1e-12,
            drop: 1e-12,
            round_trip: 1e-9,
            singular: 1e-12,
        }
    }
}

impl Tolerances {
    /// Parses an override string.
    ///
    /// A bare number replaces `zero` and `drop`; otherwise a comma separated
    /// list of `key=value` pairs with keys `zero`, `drop`, `round_trip`,
    /// `singular`.
    pub fn parse_override(base: Self, text: &str) -> Result<Self> {
        let text = text.trim();
        if let Ok(v) = text.parse::<f64>() {
            check(v, text)?;
            return Ok(Self {
                zero: v,
                drop: v,
                ..base
            });
        }
        let mut out = base;
        for part in text.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("{ENV_VAR}: expected key=value, got `{part}`")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{ENV_VAR}: bad number `{value}`")))?;
            check(v, part)?;
            match key.trim() {
                "zero" => out.zero = v,
                "drop" => out.drop = v,
                "round_trip" => out.round_trip = v,
                "singular" => out.singular = v,
                other => return Err(Error::Parse(format!("{ENV_VAR}: unknown key `{other}`"))),
            }
        }
        Ok(out)
    }

    /// Defaults, overridden by `SUBRES_TOL` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(ENV_VAR) {
            Ok(s) => Self::parse_override(Self::default(), &s),
            Err(_) => Ok(Self::default()),
        }
    }
}

fn check(v: f64, ctx: &str) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Parse(format!("{ENV_VAR}: tolerance must be finite and >= 0 (`{ctx}`)")))
    }
}
