use num_traits::Zero;
use serde::Serialize;

use super::CocycleSequence;
use crate::error::{Error, Result};
use crate::srpoly::{classify, compose_truncated, invert, max_degree, poly_norm, Classification, PolyMap};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Serialize)]
pub struct TransportResult {
    pub h_n: PolyMap,
    pub class: Classification,
    /// `|h_k|_P` for `k = 0..=n`.
    pub norms: Vec<f64>,
    /// `(ln |h_n|_P - ln |h_{n/2}|_P) / (n - n/2)`.
    pub rate: f64,
    /// `max_k |h_k|_P / |h_0|_P`.
    pub sup_ratio: f64,
}

/// `h_n = f^(n) o h_0 o (g^(n))^{-1}`, built one step at a time as
/// `h_{k+1} = f_k o h_k o g_k^{-1}`.
///
/// Every step is truncated at `max(d, deg h_0)`; the maps fix the origin so
/// this is the exact jet of that degree.
pub fn equivariance_transport(
    f_seq: &CocycleSequence,
    g_seq: &CocycleSequence,
    h0: &PolyMap,
    n: usize,
) -> Result<TransportResult> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if f_seq.len() < n || g_seq.len() < n {
        return Err(Error::InvalidParameter(format!(
            "need {n} steps, sequences have {} and {}",
            f_seq.len(),
            g_seq.len()
        )));
    }
    if h0.src() != g_seq.spec() || h0.tgt() != f_seq.spec() {
        return Err(Error::SpecMismatch(format!(
            "h_0 is {} -> {}, expected {} -> {}",
            h0.src(),
            h0.tgt(),
            g_seq.spec(),
            f_seq.spec()
        )));
    }
    let deg = max_degree(g_seq.spec(), f_seq.spec(), Zero::zero())?.max(h0.degree());
    let tol = Tolerances {
        drop: 0.0,
        ..Tolerances::default()
    };
    let mut h = h0.clone();
    let mut norms = vec![poly_norm(&h)];
    for k in 0..n {
        let g_inv = invert(&g_seq.map(k))?;
        let inner = compose_truncated(&h, &g_inv, deg, &tol)?;
        h = compose_truncated(&f_seq.map(k), &inner, deg, &tol)?;
        norms.push(poly_norm(&h));
    }
    let mid = n / 2;
    let rate = (norms[n].ln() - norms[mid].ln()) / (n - mid) as f64;
    let sup_ratio = norms.iter().copied().fold(0.0, f64::max) / norms[0];
    Ok(TransportResult {
        class: classify(&h),
        h_n: h,
        norms,
        rate,
        sup_ratio,
    })
}
