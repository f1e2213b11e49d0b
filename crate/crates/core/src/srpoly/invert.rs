use nalgebra::DMatrix;

use super::classify::{classify, max_degree, SrClass};
use super::compose::{compose_truncated, compose_with, translate};
use super::PolyMap;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;
use crate::weighted_algebra::compatible;

/// Inverse of a subresonant map with invertible linear part.
pub fn invert(f: &PolyMap) -> Result<PolyMap> {
    invert_with(f, &Tolerances::default())
}

/// Solves `A g + N(g) = y` degree by degree, then undoes the constant term.
///
/// With `f = f_0 + A x + N(x)`, the map `g = A^{-1}(y - N(g))` is a fixed
/// point that stabilises one degree per iteration; truncating at the degree
/// bound is exact for subresonant input. The inverse of `f` is then
/// `y |-> g(y - f_0)`. Both round trips are verified before returning.
pub fn invert_with(f: &PolyMap, tol: &Tolerances) -> Result<PolyMap> {
    let (src, tgt) = (f.src(), f.tgt());
    if !compatible(src, tgt) {
        return Err(Error::SpecMismatch(format!("{src} and {tgt} are not compatible")));
    }
    let class = classify(f);
    if class.class == SrClass::NotSubresonant {
        let (j, alpha, _) = f
            .terms()
            .max_by_key(|(j, a, _)| f.term_weight(*j, a))
            .expect("nonzero map");
        return Err(Error::NotSubresonant {
            out: j + 1,
            alpha: alpha.0.clone(),
            weight: class.weight,
        });
    }
    let a = f.linear_part();
    let det = a.determinant();
    if det.abs() < tol.singular {
        return Err(Error::SingularLinearPart(det.abs()));
    }
    let a_inv: DMatrix<f64> = a.clone().try_inverse().ok_or(Error::SingularLinearPart(det.abs()))?;

    let d = max_degree(tgt, src, num_traits::Zero::zero())?.max(1);
    let nonlinear = f.filter(|_, al| al.degree() >= 2);
    let inv_linear = PolyMap::linear(tgt, src, &a_inv)?;
    let id_tgt = PolyMap::identity(tgt);
    let mut g = inv_linear.clone();
    for _ in 0..d {
        let n_of_g = compose_truncated(&nonlinear, &g, d, tol)?;
        let rhs = id_tgt.sub(&n_of_g)?;
        g = compose_truncated(&inv_linear, &rhs, d, tol)?;
    }
    let f0 = f.constant();
    let shifted: Vec<f64> = f0.iter().map(|c| -c).collect();
    let g_hat = translate(&g, &shifted)?.prune(tol.drop);

    let left = compose_with(&g_hat, f, tol)?.max_abs_diff(&PolyMap::identity(src))?;
    let right = compose_with(f, &g_hat, tol)?.max_abs_diff(&id_tgt)?;
    let residual = left.max(right);
    if residual > tol.round_trip {
        return Err(Error::RoundTrip {
            residual,
            tolerance: tol.round_trip,
        });
    }
    Ok(g_hat)
}
