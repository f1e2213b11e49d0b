//! The general subresonant self-map of the space with weights `(-3, -2, -1)`
//! and the closed form of its pullback matrix.
//!
//! ```text
//! f(x, y, z) = (a0 + a1 x + a2 y + a3 z + a4 yz + a5 z^2 + a6 z^3,
//!               b0 + b1 y + b2 z + b3 z^2,
//!               c0 + c1 z)
//! ```

use nalgebra::DMatrix;
use serde::Serialize;

use super::{check_structure, linearize, monomial_basis, pullback_matrix};
use crate::error::{Error, Result};
use crate::srpoly::PolyMap;
use crate::weighted_algebra::WeightSpec;

pub fn spec() -> WeightSpec {
    WeightSpec::from_ints(&[-3, -2, -1]).expect("valid")
}

const A_TERMS: [[u32; 3]; 7] = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 1, 1], [0, 0, 2], [0, 0, 3]];
const B_TERMS: [[u32; 3]; 4] = [[0, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 2]];
const C_TERMS: [[u32; 3]; 2] = [[0, 0, 0], [0, 0, 1]];

pub fn general_form(a: &[f64; 7], b: &[f64; 4], c: &[f64; 2]) -> PolyMap {
    let ws = spec();
    let terms = A_TERMS
        .iter()
        .zip(a)
        .map(|(t, &v)| (0, t.to_vec(), v))
        .chain(B_TERMS.iter().zip(b).map(|(t, &v)| (1, t.to_vec(), v)))
        .chain(C_TERMS.iter().zip(c).map(|(t, &v)| (2, t.to_vec(), v)));
    PolyMap::from_terms(&ws, &ws, terms).expect("shapes match")
}

/// Reads `(a, b, c)` back from a map of the general form.
pub fn coefficients(f: &PolyMap) -> Result<([f64; 7], [f64; 4], [f64; 2])> {
    if f.src() != &spec() || f.tgt() != &spec() {
        return Err(Error::SpecMismatch(format!("expected weights {} on both sides", spec())));
    }
    let allowed = |j: usize, t: &[u32]| match j {
        0 => A_TERMS.iter().any(|x| x == t),
        1 => B_TERMS.iter().any(|x| x == t),
        _ => C_TERMS.iter().any(|x| x == t),
    };
    if let Some((j, alpha, _)) = f.terms().find(|(j, a, _)| !allowed(*j, &a.0)) {
        return Err(Error::InvalidParameter(format!(
            "term x^{alpha} in coordinate {} is not part of the general form",
            j + 1
        )));
    }
    let a = A_TERMS.map(|t| f.coeff(0, &t));
    let b = B_TERMS.map(|t| f.coeff(1, &t));
    let c = C_TERMS.map(|t| f.coeff(2, &t));
    Ok((a, b, c))
}

/// Closed-form `f*` in the basis `{x, yz, z^3, y, z^2, z, 1}`.
pub fn golden_pullback(a: &[f64; 7], b: &[f64; 4], c: &[f64; 2]) -> DMatrix<f64> {
    let [a0, a1, a2, a3, a4, a5, a6] = *a;
    let [b0, b1, b2, b3] = *b;
    let [c0, c1] = *c;
    #[rustfmt::skip]
    let rows = [
        a1, 0.0,             0.0,                0.0, 0.0,         0.0, 0.0,
        a4, b1 * c1,         0.0,                0.0, 0.0,         0.0, 0.0,
        a6, b3 * c1,         c1 * c1 * c1,       0.0, 0.0,         0.0, 0.0,
        a2, b1 * c0,         0.0,                b1,  0.0,         0.0, 0.0,
        a5, b2 * c1 + b3 * c0, 3.0 * c0 * c1 * c1, b3,  c1 * c1,     0.0, 0.0,
        a3, b0 * c1 + b2 * c0, 3.0 * c0 * c0 * c1, b2,  2.0 * c0 * c1, c1,  0.0,
        a0, b0 * c0,         c0 * c0 * c0,       b0,  c0 * c0,     c0,  1.0,
    ];
    DMatrix::from_row_slice(7, 7, &rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldenReport {
    pub passed: bool,
    /// Max entrywise `|computed - expected| / max(1, |expected|)`.
    pub max_rel_error: f64,
    /// Entries above the staircase are exactly zero.
    pub staircase_exact: bool,
    /// `linearize(f)` equals the transpose of the pullback exactly.
    pub transpose_consistent: bool,
    pub basis_order_ok: bool,
}

pub fn check(f: &PolyMap, tol: f64) -> Result<GoldenReport> {
    let (a, b, c) = coefficients(f)?;
    let expected = golden_pullback(&a, &b, &c);
    let got = pullback_matrix(f)?;
    let max_rel_error = got
        .iter()
        .zip(expected.iter())
        .map(|(g, e)| (g - e).abs() / e.abs().max(1.0))
        .fold(0.0, f64::max);
    let lin = linearize(f)?;
    let transpose_consistent = lin.matrix == got.transpose();
    let staircase_exact = check_structure(&lin).is_block_triangular();
    let basis = monomial_basis(&spec())?;
    let want: [[u32; 3]; 7] = [[1, 0, 0], [0, 1, 1], [0, 0, 3], [0, 1, 0], [0, 0, 2], [0, 0, 1], [0, 0, 0]];
    let basis_order_ok = basis.entries().iter().map(|m| m.0.as_slice()).eq(want.iter().map(|w| w.as_slice()));
    Ok(GoldenReport {
        passed: max_rel_error <= tol && staircase_exact && transpose_consistent && basis_order_ok,
        max_rel_error,
        staircase_exact,
        transpose_consistent,
        basis_order_ok,
    })
}
