use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{renormalize, CocycleSequence};
use crate::error::{Error, Result};
use crate::weighted_algebra::{flag_of, ratio_to_f64};

/// Series terms below this fraction of the running sum end the summation.
const NEGLIGIBLE: f64 = 1e-18;

/// One-sided metric `<v, v>'_k = sum_m e^{-m(2 eps + 2 w(v))} |A_k^(m) v|^2`.
///
/// For each weight level `i` the quadratic form is stored as a Gram matrix on
/// the prefix `V_{<= lambda_i}`; a vector is measured with the Gram matrix of
/// its a-priori weight (the top level of its support).
#[derive(Debug, Clone)]
pub struct LyapunovMetric {
    pub eps: f64,
    pub level_weights: Vec<f64>,
    pub prefix: Vec<usize>,
    /// `grams[k][i]`, for `k = 0..N`.
    pub grams: Vec<Vec<DMatrix<f64>>>,
    /// Number of summed terms for each `k`.
    pub terms: Vec<usize>,
    /// Largest estimated relative remainder of a truncated series. Dominated
    /// by the last few steps, where only a handful of terms are available.
    pub max_rel_remainder: f64,
}

impl LyapunovMetric {
    pub fn steps(&self) -> usize {
        self.grams.len()
    }

    /// Level of the top nonzero coordinate of `v`.
    pub fn level_of(&self, v: &[f64]) -> Option<usize> {
        let top = v.iter().rposition(|&x| x != 0.0)?;
        self.prefix.iter().position(|&p| top < p)
    }

    /// `|v|'_k`, or `None` for `v = 0`.
    pub fn norm(&self, k: usize, v: &[f64]) -> Option<f64> {
        let i = self.level_of(v)?;
        Some(quad(&self.grams[k][i], &v[..self.prefix[i]]).sqrt())
    }
}

fn quad(g: &DMatrix<f64>, v: &[f64]) -> f64 {
    let x = DVector::from_row_slice(v);
    (x.transpose() * g * &x)[(0, 0)]
}

/// Builds the metric for `k = 0..N` from the stored sequence.
///
/// Each series is summed until its terms are negligible or the data runs
/// out; the tail beyond the data is estimated geometrically from the
/// per-level decay rate measured at `k = 0`.
pub fn lyapunov_metric(seq: &CocycleSequence, eps: f64) -> Result<LyapunovMetric> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if seq.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !seq.preserves_flag(1e-12) {
        return Err(Error::Hypothesis(
            "the sequence does not preserve the coordinate flag, so coordinate weights are not its Lyapunov weights".into(),
        ));
    }
    let flag = flag_of(seq.spec());
    let level_weights: Vec<f64> = flag.levels.iter().map(|l| ratio_to_f64(l.weight)).collect();
    let prefix: Vec<usize> = flag.levels.iter().map(|l| l.prefix_len).collect();
    let mats: Vec<DMatrix<f64>> = seq.matrices().collect();
    let n = mats.len();
    let d = seq.spec().dim();

    let series = |k: usize, i: usize| -> (DMatrix<f64>, usize, f64, f64) {
        let p = prefix[i];
        let shrink = (-level_weights[i] - eps).exp();
        let mut m = DMatrix::<f64>::identity(d, p);
        let mut g = DMatrix::<f64>::identity(p, p);
        let mut count = 1;
        let mut last = p as f64;
        while k + count <= n {
            m = &mats[k + count - 1] * m * shrink;
            let t = m.transpose() * &m;
            last = t.trace();
            g += t;
            count += 1;
            if last <= NEGLIGIBLE * g.trace() {
                break;
            }
        }
        // Per-step decay of the term size, from the span of the summed terms.
        let rate = if count > 1 { (last / p as f64).ln() / (count - 1) as f64 } else { f64::NAN };
        (g, count, last, rate)
    };

    let mut rates = Vec::with_capacity(prefix.len());
    for (i, w) in level_weights.iter().enumerate() {
        let (_, count, last, rate) = series(0, i);
        if count > 1 && rate >= 0.0 && last > NEGLIGIBLE {
            return Err(Error::Hypothesis(format!(
                "metric series for level {w} does not converge (term ratio e^{rate:.3} per step)"
            )));
        }
        rates.push(rate);
    }

    let mut grams = Vec::with_capacity(n);
    let mut terms = Vec::with_capacity(n);
    let mut max_rel_remainder: f64 = 0.0;
    for k in 0..n {
        let mut per_level = Vec::with_capacity(prefix.len());
        let mut used = 0;
        for (i, &rate) in rates.iter().enumerate() {
            let (g, count, last, _) = series(k, i);
            if k + count > n && rate.is_finite() && rate < 0.0 {
                let q = rate.exp();
                let rem = last * q / (1.0 - q);
                max_rel_remainder = max_rel_remainder.max(rem / g.trace());
            }
            used = used.max(count);
            per_level.push(g);
        }
        grams.push(per_level);
        terms.push(used);
    }
    Ok(LyapunovMetric {
        eps,
        level_weights,
        prefix,
        grams,
        terms,
        max_rel_remainder,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub steps: usize,
    pub samples: usize,
    /// `max(0, max |A^(n) v|'_n / (e^{n(w(v)+eps)} |v|'_0) - 1)` over samples and `n >= 1`.
    pub contraction_violation: f64,
    /// `min (1 - ratio)` over the same range; positive when every check has room.
    pub contraction_margin: f64,
    /// `max(0, 1 - lambda_min(G))` over all Gram matrices: failure of `|v| <= |v|'`.
    pub lower_bound_violation: f64,
    /// Smallest `L` with `|v|'_n <= L e^{eps n / 2} |v|` on the stored steps.
    pub l_eps: f64,
    /// Latest `n` at which `|A^(n) v|'_n >= e^{n(w(v)-eps)} |v|'_0` failed, per worst sample.
    pub last_lower_growth_failure: Option<usize>,
    pub max_rel_remainder: f64,
}

impl MetricReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.contraction_violation <= tol && self.lower_bound_violation <= tol
    }
}

/// Checks the metric's three conclusions on basis vectors of every level and
/// `samples` random vectors per level.
pub fn check_metric(seq: &CocycleSequence, metric: &LyapunovMetric, samples: usize, seed: u64) -> Result<MetricReport> {
    let n = metric.steps();
    let d = seq.spec().dim();
    let mats: Vec<DMatrix<f64>> = seq.matrices().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut vectors: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut lo = 0;
    for (i, &p) in metric.prefix.iter().enumerate() {
        for c in lo..p {
            let mut v = vec![0.0; d];
            v[c] = 1.0;
            vectors.push((i, v));
        }
        for _ in 0..samples {
            let mut v = vec![0.0; d];
            for x in v.iter_mut().take(p) {
                *x = rng.random_range(-1.0..=1.0);
            }
            // Keep the top level populated so the a-priori weight is exact.
            v[p - 1] = if v[p - 1] >= 0.0 { v[p - 1] + 0.1 } else { v[p - 1] - 0.1 };
            vectors.push((i, v));
        }
        lo = p;
    }

    let mut violation: f64 = 0.0;
    let mut margin = f64::INFINITY;
    let mut last_fail: Option<usize> = None;
    for (i, v) in &vectors {
        let w = metric.level_weights[*i];
        let log_r0 = metric.norm(0, v).unwrap().ln();
        let mut x = DVector::from_row_slice(v);
        let mut log_s = renormalize(&mut x);
        let p = metric.prefix[*i];
        for step in 1..n {
            x = &mats[step - 1] * x;
            log_s += renormalize(&mut x);
            let lhs = log_s + 0.5 * quad(&metric.grams[step][*i], &x.as_slice()[..p]).ln();
            let upper = step as f64 * (w + metric.eps) + log_r0;
            let ratio = (lhs - upper).exp();
            violation = violation.max(ratio - 1.0);
            margin = margin.min(1.0 - ratio);
            let lower = step as f64 * (w - metric.eps) + log_r0;
            if lhs < lower {
                last_fail = Some(last_fail.map_or(step, |s| s.max(step)));
            }
        }
    }

    let mut lower_violation: f64 = 0.0;
    let mut l_eps: f64 = 0.0;
    for (k, per_level) in metric.grams.iter().enumerate() {
        for g in per_level {
            let eig = SymmetricEigen::new(g.clone()).eigenvalues;
            lower_violation = lower_violation.max(1.0 - eig.min());
            l_eps = l_eps.max(eig.max().sqrt() * (-metric.eps * k as f64 / 2.0).exp());
        }
    }

    Ok(MetricReport {
        steps: n,
        samples: vectors.len(),
        contraction_violation: violation.max(0.0),
        contraction_margin: margin,
        lower_bound_violation: lower_violation.max(0.0),
        l_eps,
        last_lower_growth_failure: last_fail,
        max_rel_remainder: metric.max_rel_remainder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{generate_sequence, Mode};
    use crate::weighted_algebra::WeightSpec;

    #[test]
    fn diagonal_model_closed_form() {
        // Isometric blocks: coordinate c of level i contributes
        // sum_m e^{-2m(lambda_i - lambda_c + eps)}.
        let ws = WeightSpec::from_ints(&[-2, -2, -1]).unwrap();
        let seq = generate_sequence(&ws, Mode::DiagonalModel, 0.0, 5, 300).unwrap();
        let eps = 0.1;
        let m = lyapunov_metric(&seq, eps).unwrap();
        let geo = |gap: f64| 1.0 / (1.0 - (-2.0 * (gap + eps)).exp());
        let low = DMatrix::<f64>::identity(2, 2) * geo(0.0);
        assert!((&m.grams[0][0] - low).amax() < 1e-9);
        let top = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![geo(1.0), geo(1.0), geo(0.0)]));
        assert!((&m.grams[0][1] - top).amax() < 1e-9);
        let r = check_metric(&seq, &m, 4, 1).unwrap();
        assert!(r.contraction_violation <= 1e-9, "{r:?}");
        assert_eq!(r.lower_bound_violation, 0.0);
        assert!(r.passed(1e-9));
    }

    #[test]
    fn rejects_flag_breaking_data() {
        let ws = WeightSpec::from_ints(&[-2, -1]).unwrap();
        let a = DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.05, 0.3]);
        let seq = CocycleSequence::linear(ws, vec![a; 10]).unwrap();
        assert!(matches!(lyapunov_metric(&seq, 0.1), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn perturbed_model_has_positive_margin() {
        let ws = WeightSpec::from_ints(&[-3, -2, -1]).unwrap();
        let seq = generate_sequence(&ws, Mode::Perturbed, 0.1, 2, 400).unwrap();
        let m = lyapunov_metric(&seq, 0.1).unwrap();
        let r = check_metric(&seq, &m, 3, 2).unwrap();
        assert!(r.contraction_margin > 0.0, "{r:?}");
        assert_eq!(r.contraction_violation, 0.0);
        assert!(r.lower_bound_violation <= 1e-12);
    }
}
