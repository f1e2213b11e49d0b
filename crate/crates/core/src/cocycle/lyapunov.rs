use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde::Serialize;

use super::{renormalize, CocycleSequence};
use crate::error::{Error, Result};
use crate::linearizer::linearize;
use crate::weighted_algebra::{ratio_to_f64, Rational, WeightSpec};

#[derive(Debug, Clone, Serialize)]
pub struct LyapunovEstimate {
    /// `(1/N) log |A^(N) v|`.
    pub rate: f64,
    /// `partial[n-1] = (1/n) log |A^(n) v|` for `n = 1..=N`.
    pub partial: Vec<f64>,
}

/// Finite-horizon Lyapunov weight of `v`.
pub fn lyapunov_weight(seq: &CocycleSequence, v: &[f64]) -> Result<LyapunovEstimate> {
    let d = seq.spec().dim();
    if v.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: v.len() });
    }
    if seq.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut x = DVector::from_row_slice(v);
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut log = renormalize(&mut x);
    let base = log;
    let mut partial = Vec::with_capacity(seq.len());
    for (n, a) in seq.matrices().enumerate() {
        x = a * x;
        log += renormalize(&mut x);
        partial.push((log - base) / (n + 1) as f64);
    }
    Ok(LyapunovEstimate {
        rate: *partial.last().unwrap(),
        partial,
    })
}

/// Running QR (Benettin) estimates; `history[n-1]` holds the `d` estimates
/// after `n` steps in column order (not sorted).
pub fn qr_history<I>(mats: I) -> Result<(Vec<f64>, Vec<Vec<f64>>)>
where
    I: IntoIterator<Item = DMatrix<f64>>,
{
    let mut q: Option<DMatrix<f64>> = None;
    let mut sums: Vec<f64> = Vec::new();
    let mut history = Vec::new();
    for (n, a) in mats.into_iter().enumerate() {
        let d = a.nrows();
        let q0 = q.take().unwrap_or_else(|| DMatrix::identity(d, d));
        let qr = (a * q0).qr();
        let r = qr.r();
        if sums.is_empty() {
            sums = vec![0.0; d];
        }
        for (i, s) in sums.iter_mut().enumerate() {
            *s += r[(i, i)].abs().ln();
        }
        q = Some(qr.q());
        history.push(sums.iter().map(|s| s / (n + 1) as f64).collect());
    }
    if history.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut fin: Vec<f64> = history.last().cloned().unwrap();
    fin.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok((fin, history))
}

/// Estimated Lyapunov exponents, ascending.
pub fn qr_exponents<I>(mats: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = DMatrix<f64>>,
{
    qr_history(mats).map(|(e, _)| e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovSpectrum {
    /// Strictly increasing values with multiplicities summing to the dimension.
    pub exponents: Vec<SpectrumEntry>,
    /// `|(1/N) log|det A^(N)| - sum m_i lambda_i|`, when computed.
    pub regularity_defect: Option<f64>,
}

impl LyapunovSpectrum {
    /// Distinct weights of `ws` with their multiplicities.
    pub fn from_spec(ws: &WeightSpec) -> Self {
        Self {
            exponents: ws
                .distinct()
                .into_iter()
                .zip(ws.multiplicities())
                .map(|(v, m)| SpectrumEntry {
                    value: ratio_to_f64(v),
                    multiplicity: m,
                })
                .collect(),
            regularity_defect: None,
        }
    }

    /// Groups ascending estimates that lie within `tol` of the running group.
    pub fn from_estimates(values: &[f64], tol: f64) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut groups: Vec<Vec<f64>> = Vec::new();
        for v in sorted {
            match groups.last_mut() {
                Some(g) if (v - g[0]).abs() <= tol => g.push(v),
                _ => groups.push(vec![v]),
            }
        }
        Self {
            exponents: groups
                .into_iter()
                .map(|g| SpectrumEntry {
                    value: g.iter().sum::<f64>() / g.len() as f64,
                    multiplicity: g.len(),
                })
                .collect(),
            regularity_defect: None,
        }
    }

    pub fn weighted_sum(&self) -> f64 {
        self.exponents.iter().map(|e| e.value * e.multiplicity as f64).sum()
    }

    pub fn dimension(&self) -> usize {
        self.exponents.iter().map(|e| e.multiplicity).sum()
    }
}

/// `|(1/N) sum_i log|det A_i| - sum m_i lambda_i|`.
pub fn forward_regularity(seq: &CocycleSequence, claimed: &LyapunovSpectrum) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::EmptySeries);
    }
    if claimed.dimension() != seq.spec().dim() {
        return Err(Error::DimensionMismatch {
            expected: seq.spec().dim(),
            got: claimed.dimension(),
        });
    }
    let log_det: f64 = seq.matrices().map(|a| log_abs_det(&a)).sum();
    Ok((log_det / seq.len() as f64 - claimed.weighted_sum()).abs())
}

/// `log |det A|` from the LU diagonal, safe for tiny determinants.
pub(crate) fn log_abs_det(a: &DMatrix<f64>) -> f64 {
    let lu = a.clone().lu();
    lu.u().diagonal().iter().map(|x| x.abs().ln()).sum()
}

/// All `sum_i n_i lambda_i` with `n_i >= 0` integers lying in `[lambda_1, 0]`,
/// ascending and distinct.
pub fn resonant_combinations(ws: &WeightSpec) -> Result<Vec<Rational>> {
    ws.require_negative()?;
    let lambdas = ws.distinct();
    let floor = ws.min();
    let mut out = vec![Rational::zero()];
    let mut frontier = vec![Rational::zero()];
    while let Some(v) = frontier.pop() {
        for &l in &lambdas {
            let w = v + l;
            if w >= floor && !out.contains(&w) {
                out.push(w);
                frontier.push(w);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Exponents of the linearized sequence `L f_i` compared with the
/// predicted resonant combinations.
#[derive(Debug, Clone, Serialize)]
pub struct LinearizedSpectrumReport {
    pub exponents: Vec<f64>,
    pub combinations: Vec<f64>,
    /// Distance from each exponent to the nearest combination.
    pub distances: Vec<f64>,
    /// Number of exponents within `tol` of zero.
    pub zero_multiplicity: usize,
    /// Exponents on the invariant subspace where the constant coordinate vanishes.
    pub restricted_exponents: Vec<f64>,
}

impl LinearizedSpectrumReport {
    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }
}

pub fn linearized_spectrum(seq: &CocycleSequence, tol: f64) -> Result<LinearizedSpectrumReport> {
    let lins = seq.maps().map(|f| linearize(&f).map(|l| l.matrix)).collect::<Result<Vec<_>>>()?;
    let exponents = qr_exponents(lins.iter().cloned())?;
    let k = lins[0].nrows() - 1;
    let restricted_exponents = qr_exponents(lins.iter().map(|m| m.view((0, 0), (k, k)).into_owned()))?;
    let combinations: Vec<f64> = resonant_combinations(seq.spec())?.into_iter().map(ratio_to_f64).collect();
    let distances = exponents
        .iter()
        .map(|e| combinations.iter().map(|c| (e - c).abs()).fold(f64::INFINITY, f64::min))
        .collect();
    let zero_multiplicity = exponents.iter().filter(|e| e.abs() <= tol).count();
    Ok(LinearizedSpectrumReport {
        exponents,
        combinations,
        distances,
        zero_multiplicity,
        restricted_exponents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{generate_sequence, Mode};

    fn spec(ws: &[i64]) -> WeightSpec {
        WeightSpec::from_ints(ws).unwrap()
    }

    #[test]
    fn diagonal_model_weights() {
        let ws = spec(&[-2, -1]);
        let eps = 0.01;
        let seq = generate_sequence(&ws, Mode::DiagonalModel, eps, 4, 2000).unwrap();
        let tol = 2.0 * eps + 0.05;
        assert!((lyapunov_weight(&seq, &[0.0, 1.0]).unwrap().rate + 1.0).abs() < tol);
        assert!((lyapunov_weight(&seq, &[1.0, 1.0]).unwrap().rate + 1.0).abs() < tol);
        assert!((lyapunov_weight(&seq, &[1.0, 0.0]).unwrap().rate + 2.0).abs() < tol);
        assert!(matches!(lyapunov_weight(&seq, &[0.0, 0.0]), Err(Error::ZeroVector)));
    }

    #[test]
    fn qr_matches_diagonal_product() {
        let ws = spec(&[-3, -2, -1]);
        let seq = generate_sequence(&ws, Mode::DiagonalModel, 0.0, 1, 50).unwrap();
        let e = qr_exponents(seq.matrices()).unwrap();
        for (got, want) in e.iter().zip([-3.0, -2.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn regularity_defects() {
        let ws = spec(&[-2, -1]);
        let seq = generate_sequence(&ws, Mode::DiagonalModel, 0.0, 1, 200).unwrap();
        assert!(forward_regularity(&seq, &LyapunovSpectrum::from_spec(&ws)).unwrap() < 1e-10);
        let wrong = LyapunovSpectrum::from_spec(&spec(&[-1, -1]));
        assert!((forward_regularity(&seq, &wrong).unwrap() - 1.0).abs() < 1e-10);
        let ws3 = spec(&[-3, -2, -1]);
        let pert = generate_sequence(&ws3, Mode::Perturbed, 0.1, 11, 2000).unwrap();
        assert!(forward_regularity(&pert, &LyapunovSpectrum::from_spec(&ws3)).unwrap() <= 0.02);
    }

    #[test]
    fn clustering() {
        let s = LyapunovSpectrum::from_estimates(&[-1.0, -2.01, -1.99, 0.0], 0.05);
        assert_eq!(s.exponents.len(), 3);
        assert_eq!(s.exponents[0].multiplicity, 2);
        assert_eq!(s.dimension(), 4);
    }

    #[test]
    fn combinations() {
        let r = resonant_combinations(&spec(&[-2, -1])).unwrap();
        assert_eq!(r, vec![Rational::from_integer(-2), Rational::from_integer(-1), Rational::zero()]);
        let r = resonant_combinations(&spec(&[-3, -2])).unwrap();
        assert_eq!(r, vec![Rational::from_integer(-3), Rational::from_integer(-2), Rational::zero()]);
    }
}
