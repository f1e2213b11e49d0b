//! Temperedness diagnostics for a scalar series `phi(f^n x)`, `n = 0..N`.
//!
//! Values are stored as logarithms so that series like `e^{0.5 n}` with large
//! `N` stay representable.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default threshold on the growth rate for a "tempered" verdict.
pub const TEMPER_TOL: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSeries {
    log_values: Vec<f64>,
}

impl OrbitSeries {
    /// Values must be `>= 1` (and finite).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::from_logs(values.into_iter().map(f64::ln).collect())
    }

    /// Series given by `ln phi`; every entry must be `>= 0`.
    pub fn from_logs(log_values: Vec<f64>) -> Result<Self> {
        if log_values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(n) = log_values.iter().position(|l| !(*l >= 0.0 && l.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "phi_{n} = exp({}) is not a finite value >= 1",
                log_values[n]
            )));
        }
        Ok(Self { log_values })
    }

    /// Reads the `phi` column of a CSV file.
    pub fn from_csv(path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            phi: f64,
        }
        let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let values = rdr
            .deserialize::<Row>()
            .enumerate()
            .map(|(i, r)| r.map(|r| r.phi).map_err(|e| Error::Parse(format!("{} row {}: {e}", path.display(), i + 1))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.log_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_values.is_empty()
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    /// The series started one step later, `phi(f^{n+1} x)`.
    pub fn shift(&self) -> Result<Self> {
        Self::from_logs(self.log_values[1..].to_vec())
    }
}

/// `ln C_eps = max_n (ln phi_n - eps n)`.
pub fn log_c_epsilon(s: &OrbitSeries, eps: f64) -> Result<f64> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    Ok(s.log_values
        .iter()
        .enumerate()
        .map(|(n, l)| l - eps * n as f64)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `C_eps = max_n e^{-eps n} phi_n`; may be `inf` when only the logarithm is finite.
pub fn c_epsilon(s: &OrbitSeries, eps: f64) -> Result<f64> {
    log_c_epsilon(s, eps).map(f64::exp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperRate {
    /// Max of `(1/n) ln phi_n` over the top quartile of indices.
    pub rate: f64,
    pub tempered: bool,
}

/// Growth-rate estimate with the default threshold.
pub fn temper_rate(s: &OrbitSeries) -> Result<TemperRate> {
    temper_rate_with(s, TEMPER_TOL)
}

pub fn temper_rate_with(s: &OrbitSeries, tol: f64) -> Result<TemperRate> {
    let n = s.len() - 1;
    if n < 10 {
        return Err(Error::InvalidParameter(format!("need at least 10 steps, got {n}")));
    }
    let start = (3 * n).div_ceil(4).max(1);
    let rate = (start..=n)
        .map(|k| s.log_values[k] / k as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(TemperRate {
        rate,
        tempered: rate <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpGrowthReport {
    /// Whether `phi_{n+1} <= M phi_n` for every stored step.
    pub bounded: bool,
    /// `max_n (ln phi_{n+1} - ln phi_n)`.
    pub max_step_log_ratio: f64,
    #[serde(flatten)]
    pub rate: TemperRate,
}

/// Checks the per-step bound `phi(f x) <= M phi(x)` along the data, then
/// estimates the growth rate.
///
/// A violated bound means the hypothesis does not hold and is an error.
pub fn exp_growth_check(s: &OrbitSeries, m: f64) -> Result<ExpGrowthReport> {
    if !(m >= 1.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("M must be finite and >= 1, got {m}")));
    }
    let lm = m.ln();
    let max_step = s
        .log_values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    if let Some(n) = s.log_values.windows(2).position(|w| w[1] - w[0] > lm + 1e-12) {
        return Err(Error::Hypothesis(format!(
            "phi_{} / phi_{n} = {:.6} exceeds M = {m}",
            n + 1,
            (s.log_values[n + 1] - s.log_values[n]).exp()
        )));
    }
    Ok(ExpGrowthReport {
        bounded: true,
        max_step_log_ratio: max_step,
        rate: temper_rate(s)?,
    })
}

/// `ln phi` of a series with per-step factor at most `M` that drops back to 1
/// every `gap` steps: it climbs by `ln M` per step and resets.
pub fn bounded_return_series(n: usize, m: f64, gap: usize) -> Result<OrbitSeries> {
    if gap == 0 {
        return Err(Error::InvalidParameter("gap must be positive".into()));
    }
    OrbitSeries::from_logs((0..=n).map(|k| (k % gap) as f64 * m.ln()).collect())
}
