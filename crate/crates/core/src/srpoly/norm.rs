use nalgebra::{DMatrix, SymmetricEigen};

use super::{factorial, PolyMap};

/// Coefficients of the symmetric `k`-linear map whose diagonal is the
/// degree-`k` component of `f`.
///
/// Row-major with shape `dim_tgt x dim_src^k`; the entry for
/// `(j; i_1, ..., i_k)` is `c_{j,alpha} * alpha! / k!` where `alpha` counts the
/// occurrences of each index.
pub fn polarize(f: &PolyMap, k: u32) -> Vec<f64> {
    let n = f.src().dim();
    let cols = n.pow(k);
    let mut out = vec![0.0; f.tgt().dim() * cols];
    let kf = factorial(k);
    for col in 0..cols {
        let mut alpha = vec![0u32; n];
        let mut rest = col;
        for _ in 0..k {
            alpha[rest % n] += 1;
            rest /= n;
        }
        let alpha = super::MultiIndex(alpha);
        let w = alpha.factorial() / kf;
        for j in 0..f.tgt().dim() {
            let c = f.coeff(j, &alpha.0);
            if c != 0.0 {
                out[j * cols + col] = c * w;
            }
        }
    }
    out
}

/// Operator norm of the degree-`k` polarization, viewed as a linear map
/// `V^{(x)k} -> W` with the tensor inner product.
///
/// `M M^T[j, j'] = sum_alpha c_{j,alpha} c_{j',alpha} alpha!/k!`, which avoids
/// forming the `n^k` columns.
pub fn degree_norm(f: &PolyMap, k: u32) -> f64 {
    let m = f.tgt().dim();
    let kf = factorial(k);
    let hk = f.homogeneous(k);
    if hk.is_zero() {
        return 0.0;
    }
    // Scaled by the largest coefficient so the Gram entries cannot overflow.
    let s = hk.max_abs_coeff();
    let mut gram = DMatrix::<f64>::zeros(m, m);
    let terms: Vec<_> = hk.terms().collect();
    for &(j, a, c) in &terms {
        for &(j2, a2, c2) in &terms {
            if a == a2 {
                gram[(j, j2)] += (c / s) * (c2 / s) * a.factorial() / kf;
            }
        }
    }
    let eig = SymmetricEigen::new(gram);
    s * eig.eigenvalues.max().max(0.0).sqrt()
}

/// `sum_k ||D^k f||` over all degrees present.
pub fn poly_norm(f: &PolyMap) -> f64 {
    (0..=f.degree()).map(|k| degree_norm(f, k)).sum()
}
