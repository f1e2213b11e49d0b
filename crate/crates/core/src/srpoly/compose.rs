use std::collections::{BTreeMap, HashMap};

use super::{MultiIndex, PolyMap};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

type Scalar = BTreeMap<MultiIndex, f64>;

fn mul(a: &Scalar, b: &Scalar, max_deg: Option<u32>) -> Scalar {
    let mut out = Scalar::new();
    for (ia, &ca) in a {
        for (ib, &cb) in b {
            let m = ia.add(ib);
            if max_deg.is_some_and(|d| m.degree() > d) {
                continue;
            }
            *out.entry(m).or_insert(0.0) += ca * cb;
        }
    }
    out
}

fn compose_impl(g: &PolyMap, f: &PolyMap, max_deg: Option<u32>, drop: f64) -> Result<PolyMap> {
    if g.src() != f.tgt() {
        return Err(Error::SpecMismatch(format!(
            "cannot compose: inner map lands in {} but outer map starts at {}",
            f.tgt(),
            g.src()
        )));
    }
    let n = f.src().dim();
    let m = f.tgt().dim();
    let mut comps: Vec<Scalar> = vec![Scalar::new(); m];
    for (j, a, c) in f.terms() {
        if max_deg.is_some_and(|d| a.degree() > d) {
            continue;
        }
        *comps[j].entry(a.clone()).or_insert(0.0) += c;
    }
    let one: Scalar = [(MultiIndex::zero(n), 1.0)].into_iter().collect();
    // powers[i][k] = (f_i)^k, built lazily.
    let mut powers: Vec<Vec<Scalar>> = vec![vec![one.clone()]; m];
    let mut monomials: HashMap<MultiIndex, Scalar> = HashMap::new();
    let mut out: BTreeMap<(usize, MultiIndex), f64> = BTreeMap::new();
    for (j, beta, c) in g.terms() {
        if !monomials.contains_key(beta) {
            let mut prod = one.clone();
            for (i, &e) in beta.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = mul(powers[i].last().unwrap(), &comps[i], max_deg);
                    powers[i].push(next);
                }
                if e > 0 {
                    prod = mul(&prod, &powers[i][e as usize], max_deg);
                }
            }
            monomials.insert(beta.clone(), prod);
        }
        for (alpha, &v) in &monomials[beta] {
            *out.entry((j, alpha.clone())).or_insert(0.0) += c * v;
        }
    }
    let mut h = PolyMap::zero(f.src().clone(), g.tgt().clone());
    for ((j, alpha), c) in out {
        if c.abs() > drop {
            h.add_term(j, alpha, c)?;
        }
    }
    Ok(h)
}

/// `g o f`, dropping coefficients at or below the default drop tolerance.
pub fn compose(g: &PolyMap, f: &PolyMap) -> Result<PolyMap> {
    compose_with(g, f, &Tolerances::default())
}

pub fn compose_with(g: &PolyMap, f: &PolyMap, tol: &Tolerances) -> Result<PolyMap> {
    compose_impl(g, f, None, tol.drop)
}

/// Degree-`max_deg` jet of `g o f`.
///
/// Terms of `f` above `max_deg` are ignored, so the result is exact whenever
/// the discarded terms could only contribute in degrees above `max_deg`
/// (always true when `f(0) = 0`).
pub fn compose_truncated(g: &PolyMap, f: &PolyMap, max_deg: u32, tol: &Tolerances) -> Result<PolyMap> {
    compose_impl(g, f, Some(max_deg), tol.drop)
}

/// `x |-> f(x + v)`.
pub fn translate(f: &PolyMap, v: &[f64]) -> Result<PolyMap> {
    let t = PolyMap::translation(f.src(), v)?;
    compose(f, &t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighted_algebra::WeightSpec;

    fn spec(ws: &[i64]) -> WeightSpec {
        WeightSpec::from_ints(ws).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let ws = spec(&[-3, -2, -1]);
        let f = PolyMap::from_terms(&ws, &ws, [(0, vec![0, 1, 1], 2.0), (1, vec![0, 0, 2], -1.0), (2, vec![0, 0, 1], 3.0)])
            .unwrap();
        let id = PolyMap::identity(&ws);
        assert_eq!(compose(&id, &f).unwrap(), f);
        assert_eq!(compose(&f, &id).unwrap(), f);
    }

    #[test]
    fn self_composition_hand_expansion() {
        let ws = spec(&[-2, -1]);
        let f = PolyMap::from_terms(&ws, &ws, [(0, vec![1, 0], 1.0), (0, vec![0, 2], 1.0), (1, vec![0, 1], 1.0)]).unwrap();
        let expected =
            PolyMap::from_terms(&ws, &ws, [(0, vec![1, 0], 1.0), (0, vec![0, 2], 2.0), (1, vec![0, 1], 1.0)]).unwrap();
        assert_eq!(compose(&f, &f).unwrap(), expected);
    }

    #[test]
    fn composition_matches_pointwise_evaluation() {
        let ws = spec(&[-3, -2, -1]);
        let f = PolyMap::from_terms(
            &ws,
            &ws,
            [(0, vec![0, 0, 0], 0.3), (0, vec![0, 1, 1], 2.0), (1, vec![0, 0, 2], -1.0), (1, vec![0, 1, 0], 0.5), (2, vec![0, 0, 1], 3.0)],
        )
        .unwrap();
        let g = PolyMap::from_terms(&ws, &ws, [(0, vec![0, 0, 3], 1.5), (0, vec![1, 0, 0], 1.0), (1, vec![0, 1, 0], 2.0), (2, vec![0, 0, 1], -1.0)])
            .unwrap();
        let h = compose(&g, &f).unwrap();
        let x = [0.3, -0.7, 1.1];
        let direct = g.evaluate(&f.evaluate(&x).unwrap()).unwrap();
        for (a, b) in h.evaluate(&x).unwrap().iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spec_mismatch_is_an_error() {
        let f = PolyMap::identity(&spec(&[-2, -1]));
        let g = PolyMap::identity(&spec(&[-3, -1]));
        assert!(matches!(compose(&g, &f), Err(Error::SpecMismatch(_))));
    }

    #[test]
    fn translate_examples() {
        let ws = spec(&[-2, -1]);
        let f = PolyMap::from_terms(&ws, &ws, [(0, vec![0, 2], 1.0)]).unwrap();
        assert_eq!(translate(&f, &[0.0, 0.0]).unwrap(), f);
        let expected =
            PolyMap::from_terms(&ws, &ws, [(0, vec![0, 2], 1.0), (0, vec![0, 1], 2.0), (0, vec![0, 0], 1.0)]).unwrap();
        assert_eq!(translate(&f, &[0.0, 1.0]).unwrap(), expected);
    }

    #[test]
    fn truncated_composition_keeps_low_jet() {
        let ws = spec(&[-3, -2, -1]);
        let f = PolyMap::from_terms(&ws, &ws, [(0, vec![1, 0, 0], 1.0), (0, vec![0, 0, 3], 1.0), (1, vec![0, 1, 0], 1.0), (2, vec![0, 0, 1], 1.0)])
            .unwrap();
        let full = compose(&f, &f).unwrap();
        let jet = compose_truncated(&f, &f, 2, &Tolerances::default()).unwrap();
        assert_eq!(jet, full.truncate(2));
    }
}
