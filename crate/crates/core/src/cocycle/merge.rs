use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::lyapunov::{log_abs_det, qr_exponents};
use super::{renormalize, CocycleSequence, LyapunovSpectrum, Scaled};
use crate::error::{Error, Result};
use crate::weighted_algebra::WeightSpec;

/// Largest allowed `max_{n >= N/2} log+ |U_n| / n`.
const U_GROWTH_TOL: f64 = 0.05;

/// Exponent tolerance used to group the merged spectrum.
const CLUSTER_TOL: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct MergeReport {
    pub steps: usize,
    pub exponents_a: Vec<f64>,
    pub exponents_b: Vec<f64>,
    /// Union of the two block spectra, ascending.
    pub union: Vec<f64>,
    /// QR estimates for the block-triangular product.
    pub exponents_l: Vec<f64>,
    pub spectrum: LyapunovSpectrum,
    /// `coefficients[j][i]`: the `e_i` component removed from `f_j` (zero when not corrected).
    pub coefficients: Vec<Vec<f64>>,
    /// Geometric estimate of the part of each coefficient beyond the data.
    pub remainders: Vec<Vec<f64>>,
    /// `corrected[j][i]`: whether the series for `(i, j)` converges.
    pub corrected: Vec<Vec<bool>>,
    /// `(1/N) log |L^(N) f~_j|` for the corrected vectors.
    pub corrected_exponents: Vec<f64>,
    /// `(1/N) log |L^(N) f_j|` for the plain basis vectors.
    pub uncorrected_exponents: Vec<f64>,
    pub u_growth: f64,
    /// `max_n |log|det L^(n)| - log|det A^(n)| - log|det B^(n)||`.
    pub det_defect: f64,
}

/// `ln sqrt(sum x_r^2)` for scaled entries.
fn ln_norm(entries: &[Scaled]) -> f64 {
    let top = entries.iter().map(|s| s.ln_abs()).fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    let sum: f64 = entries.iter().map(|s| (2.0 * (s.ln_abs() - top)).exp()).sum();
    top + 0.5 * sum.ln()
}

/// Slope of `ys` against their index by least squares.
fn slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (k, y) in ys.iter().enumerate() {
        let dx = k as f64 - mx;
        sxy += dx * (y - my);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// Merges the exponents of `L_n = [[A_n, U_n], [0, B_n]]` and corrects each
/// `f_j` of the lower block so its exponent is the one of `B`.
///
/// The correction along `e_i` is `c_{i,j} = sum_k e_i^T (A^(k+1))^{-1} U_k B^(k) f_j`.
/// It is applied only where the terms decay, i.e. where `e_i` grows faster
/// than `f_j`; elsewhere the uncorrected component already has the right
/// rate.
pub fn triangular_merge(a: &CocycleSequence, b: &CocycleSequence, u: &[DMatrix<f64>]) -> Result<MergeReport> {
    let n = a.len();
    if b.len() != n || u.len() != n {
        return Err(Error::InvalidParameter(format!(
            "sequence lengths differ: A {}, B {}, U {}",
            n,
            b.len(),
            u.len()
        )));
    }
    if n < 2 {
        return Err(Error::EmptySeries);
    }
    let p = a.spec().dim();
    let q = b.spec().dim();
    for (k, m) in u.iter().enumerate() {
        if m.nrows() != p || m.ncols() != q {
            return Err(Error::InvalidParameter(format!(
                "U_{k} is {}x{}, expected {p}x{q}",
                m.nrows(),
                m.ncols()
            )));
        }
    }

    let u_growth = (n / 2..n)
        .map(|k| u[k].norm().ln().max(0.0) / k.max(1) as f64)
        .fold(0.0, f64::max);
    if u_growth > U_GROWTH_TOL {
        return Err(Error::Hypothesis(format!(
            "log+ |U_n| / n reaches {u_growth:.4} on the second half of the data"
        )));
    }

    let am: Vec<DMatrix<f64>> = a.matrices().collect();
    let bm: Vec<DMatrix<f64>> = b.matrices().collect();

    // Rows of (A^(k+1))^{-1} and columns of A^(k), each with its own log scale.
    let mut rows = unit_vectors(p);
    let mut cols = unit_vectors(p);
    // B^(k) f_j.
    let mut ys = unit_vectors(q);
    // beta[j][i][k].
    let mut beta = vec![vec![Vec::with_capacity(n); p]; q];
    let mut det_defect: f64 = 0.0;
    let mut det_run = 0.0;
    for k in 0..n {
        let inv = am[k]
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::SingularLinearPart(am[k].determinant()))?;
        for (r, lr) in rows.iter_mut() {
            let next = (r.transpose() * &inv).transpose();
            *r = next;
            *lr += renormalize(r);
        }
        for (j, (y, ly)) in ys.iter().enumerate() {
            let uy = &u[k] * y;
            for (i, (r, lr)) in rows.iter().enumerate() {
                beta[j][i].push(Scaled::new(r.dot(&uy), lr + ly));
            }
        }
        for (c, lc) in cols.iter_mut() {
            *c = &am[k] * &*c;
            *lc += renormalize(c);
        }
        for (y, ly) in ys.iter_mut() {
            *y = &bm[k] * &*y;
            *ly += renormalize(y);
        }

        let mut l = DMatrix::zeros(p + q, p + q);
        l.view_mut((0, 0), (p, p)).copy_from(&am[k]);
        l.view_mut((0, p), (p, q)).copy_from(&u[k]);
        l.view_mut((p, p), (q, q)).copy_from(&bm[k]);
        det_run += log_abs_det(&l) - log_abs_det(&am[k]) - log_abs_det(&bm[k]);
        det_defect = det_defect.max(det_run.abs());
    }

    let mut coefficients = vec![vec![0.0; p]; q];
    let mut remainders = vec![vec![0.0; p]; q];
    let mut corrected = vec![vec![false; p]; q];
    let mut corrected_exponents = Vec::with_capacity(q);
    let mut uncorrected_exponents = Vec::with_capacity(q);
    for j in 0..q {
        // Coefficient of A^(n) e_i in the x-part at time n, per i.
        let mut coef_at_end = vec![Scaled::ZERO; p];
        let mut coef_plain = vec![Scaled::ZERO; p];
        let mut c0 = vec![Scaled::ZERO; p];
        for i in 0..p {
            let bs = &beta[j][i];
            let prefix = bs.iter().fold(Scaled::ZERO, |acc, s| acc.add(*s));
            coef_plain[i] = prefix;
            let logs: Vec<f64> = bs[n / 2..].iter().map(|s| s.ln_abs()).filter(|x| x.is_finite()).collect();
            let rate = if logs.len() >= 2 { slope(&logs) } else { f64::NAN };
            if rate < 0.0 {
                let ratio = rate.exp();
                let rem = Scaled::new(bs[n - 1].m * ratio / (1.0 - ratio), bs[n - 1].e);
                let total = prefix.add(rem);
                coefficients[j][i] = total.to_f64();
                remainders[j][i] = rem.to_f64();
                corrected[j][i] = true;
                // x_N component: -(tail beyond the data).
                coef_at_end[i] = rem.neg();
                c0[i] = total;
            } else {
                coef_at_end[i] = prefix;
            }
        }
        let x_end = combine(&cols, &coef_at_end, p);
        let x_plain = combine(&cols, &coef_plain, p);
        let (y, ly) = &ys[j];
        let y_end: Vec<Scaled> = y.iter().map(|&v| Scaled::new(v, *ly)).collect();

        let mut start: Vec<Scaled> = c0.iter().map(|c| c.neg()).collect();
        start.extend((0..q).map(|r| Scaled::new((r == j) as u8 as f64, 0.0)));
        let ln0 = ln_norm(&start);
        let full: Vec<Scaled> = x_end.iter().chain(y_end.iter()).copied().collect();
        corrected_exponents.push((ln_norm(&full) - ln0) / n as f64);
        let plain: Vec<Scaled> = x_plain.iter().chain(y_end.iter()).copied().collect();
        uncorrected_exponents.push(ln_norm(&plain) / n as f64);
    }

    let exponents_a = qr_exponents(am.iter().cloned())?;
    let exponents_b = qr_exponents(bm.iter().cloned())?;
    let mut union: Vec<f64> = exponents_a.iter().chain(exponents_b.iter()).copied().collect();
    union.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let ls = (0..n).map(|k| {
        let mut l = DMatrix::zeros(p + q, p + q);
        l.view_mut((0, 0), (p, p)).copy_from(&am[k]);
        l.view_mut((0, p), (p, q)).copy_from(&u[k]);
        l.view_mut((p, p), (q, q)).copy_from(&bm[k]);
        l
    });
    let exponents_l = qr_exponents(ls)?;
    let mut spectrum = LyapunovSpectrum::from_estimates(&exponents_l, CLUSTER_TOL);
    let log_det: f64 = am.iter().map(log_abs_det).sum::<f64>() + bm.iter().map(log_abs_det).sum::<f64>();
    spectrum.regularity_defect = Some((log_det / n as f64 - spectrum.weighted_sum()).abs());

    Ok(MergeReport {
        steps: n,
        exponents_a,
        exponents_b,
        union,
        exponents_l,
        spectrum,
        coefficients,
        remainders,
        corrected,
        corrected_exponents,
        uncorrected_exponents,
        u_growth,
        det_defect,
    })
}

fn unit_vectors(d: usize) -> Vec<(DVector<f64>, f64)> {
    (0..d).map(|i| (DVector::from_fn(d, |r, _| (r == i) as u8 as f64), 0.0)).collect()
}

/// `sum_i coef_i * col_i` with scaled columns.
fn combine(cols: &[(DVector<f64>, f64)], coef: &[Scaled], p: usize) -> Vec<Scaled> {
    (0..p)
        .map(|r| {
            cols.iter()
                .zip(coef)
                .fold(Scaled::ZERO, |acc, ((c, lc), k)| acc.add(Scaled::new(k.m * c[r], k.e + lc)))
        })
        .collect()
}

/// 1x1 blocks `A_n = e^lambda`, `B_n = e^eta`, `U_n = u`.
pub fn constant_instance(
    lambda: i64,
    eta: i64,
    u: f64,
    n: usize,
) -> Result<(CocycleSequence, CocycleSequence, Vec<DMatrix<f64>>)> {
    let a = CocycleSequence::linear(
        WeightSpec::from_ints(&[lambda])?,
        vec![DMatrix::from_element(1, 1, (lambda as f64).exp()); n],
    )?;
    let b = CocycleSequence::linear(
        WeightSpec::from_ints(&[eta])?,
        vec![DMatrix::from_element(1, 1, (eta as f64).exp()); n],
    )?;
    Ok((a, b, vec![DMatrix::from_element(1, 1, u); n]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{generate_sequence, Mode};

    #[test]
    fn constant_instance_matches_geometric_series() {
        let (a, b, u) = constant_instance(-1, -2, 1.0, 500).unwrap();
        let r = triangular_merge(&a, &b, &u).unwrap();
        let e = std::f64::consts::E;
        let want = e * e / (e - 1.0);
        assert!((r.coefficients[0][0] - want).abs() < 1e-9 * want, "{}", r.coefficients[0][0]);
        assert!(r.corrected[0][0]);
        assert!((r.corrected_exponents[0] + 2.0).abs() <= 0.02, "{:?}", r.corrected_exponents);
        assert!((r.uncorrected_exponents[0] + 1.0).abs() <= 0.02, "{:?}", r.uncorrected_exponents);
        assert!(r.det_defect < 1e-9);
        assert_eq!(r.spectrum.exponents.len(), 2);
    }

    #[test]
    fn zero_coupling_gives_union() {
        let ws_a = WeightSpec::from_ints(&[-3, -1]).unwrap();
        let ws_b = WeightSpec::from_ints(&[-2]).unwrap();
        let a = generate_sequence(&ws_a, Mode::DiagonalModel, 0.0, 1, 100).unwrap();
        let b = generate_sequence(&ws_b, Mode::DiagonalModel, 0.0, 2, 100).unwrap();
        let u = vec![DMatrix::zeros(2, 1); 100];
        let r = triangular_merge(&a, &b, &u).unwrap();
        assert!(r.coefficients.iter().flatten().all(|&c| c == 0.0));
        for (x, y) in r.exponents_l.iter().zip([-3.0, -2.0, -1.0]) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!((r.corrected_exponents[0] + 2.0).abs() < 1e-9);
    }

    #[test]
    fn growing_coupling_is_rejected() {
        let (a, b, _) = constant_instance(-1, -2, 1.0, 100).unwrap();
        let u: Vec<DMatrix<f64>> = (0..100).map(|k| DMatrix::from_element(1, 1, (0.2 * k as f64).exp())).collect();
        assert!(matches!(triangular_merge(&a, &b, &u), Err(Error::Hypothesis(_))));
    }
}
