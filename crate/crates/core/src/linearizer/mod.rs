//! Linearization of subresonant maps.
//!
//! Monomials `x^alpha` with `sum_i alpha_i lambda_i >= lambda_1` span the
//! polynomials of weight at most `-lambda_1`. Precomposition with `f` acts on
//! that span by a matrix `f*`; its transpose `Lf` satisfies
//! `embed(f(v)) = Lf * embed(v)`, where `embed` evaluates every monomial.

pub mod golden;

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::srpoly::{classify, compose_with, MultiIndex, PolyMap, SrClass};
use crate::tolerance::Tolerances;
use crate::weighted_algebra::{Rational, WeightSpec};

/// Ordered monomial basis.
///
/// Order: `sum alpha_i lambda_i` ascending (heaviest dual weight first), then
/// degree ascending, then `alpha` lexicographically descending. The constant
/// monomial is last.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialBasis {
    spec: WeightSpec,
    entries: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
}

impl MonomialBasis {
    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn entries(&self) -> &[MultiIndex] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.index.get(alpha).copied()
    }

    pub fn constant_index(&self) -> usize {
        self.entries.len() - 1
    }

    /// Position of the degree-one monomial `x_i`.
    pub fn linear_index(&self, i: usize) -> usize {
        self.index[&MultiIndex::unit(self.spec.dim(), i)]
    }

    /// `(sum alpha_i lambda_i, degree)`; the basis is sorted ascending by it.
    pub fn group_key(&self, i: usize) -> (Rational, u32) {
        let a = &self.entries[i];
        (a.weight(&self.spec), a.degree())
    }
}

fn enumerate(ws: &WeightSpec, i: usize, budget: Rational, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if i == ws.dim() {
        out.push(MultiIndex(cur.clone()));
        return;
    }
    let l = ws.weight(i);
    let mut e = 0u32;
    let mut used = Rational::from_integer(0);
    // budget and l are negative: keep adding while used >= budget.
    while used >= budget {
        cur.push(e);
        enumerate(ws, i + 1, budget - used, cur, out);
        cur.pop();
        e += 1;
        used += l;
    }
}

pub fn monomial_basis(ws: &WeightSpec) -> Result<MonomialBasis> {
    ws.require_negative()?;
    let mut entries = Vec::new();
    enumerate(ws, 0, ws.min(), &mut Vec::new(), &mut entries);
    entries.sort_by(|a, b| {
        (a.weight(ws), a.degree())
            .cmp(&(b.weight(ws), b.degree()))
            .then_with(|| b.cmp(a))
    });
    let index = entries.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
    Ok(MonomialBasis {
        spec: ws.clone(),
        entries,
        index,
    })
}

/// Matrix of `h |-> h o f`: column `c` holds the monomial coefficients of
/// `phi_c o f` in the source basis.
pub fn pullback_matrix(f: &PolyMap) -> Result<DMatrix<f64>> {
    let (bs, bt) = bases(f)?;
    pullback_in(f, &bs, &bt)
}

fn bases(f: &PolyMap) -> Result<(MonomialBasis, MonomialBasis)> {
    let c = classify(f);
    if c.class == SrClass::NotSubresonant {
        let (j, a, _) = f.terms().max_by_key(|(j, a, _)| f.term_weight(*j, a)).unwrap();
        return Err(Error::NotSubresonant {
            out: j + 1,
            alpha: a.0.clone(),
            weight: c.weight,
        });
    }
    if !crate::weighted_algebra::compatible(f.src(), f.tgt()) {
        return Err(Error::SpecMismatch(format!("{} and {} are not compatible", f.src(), f.tgt())));
    }
    Ok((monomial_basis(f.src())?, monomial_basis(f.tgt())?))
}

fn pullback_in(f: &PolyMap, bs: &MonomialBasis, bt: &MonomialBasis) -> Result<DMatrix<f64>> {
    // One scalar output per target monomial; composing with f expands all
    // columns at once.
    let cols = bt.len();
    let out_spec = WeightSpec::new(vec![Rational::from_integer(0); cols])?;
    let mut phis = PolyMap::zero(f.tgt().clone(), out_spec);
    for (c, beta) in bt.entries().iter().enumerate() {
        phis.add_term(c, beta.clone(), 1.0)?;
    }
    let exact = Tolerances {
        drop: 0.0,
        ..Tolerances::default()
    };
    let pulled = compose_with(&phis, f, &exact)?;
    let mut m = DMatrix::zeros(bs.len(), cols);
    for (c, alpha, v) in pulled.terms() {
        match bs.position(alpha) {
            Some(r) => m[(r, c)] = v,
            None => {
                return Err(Error::NotSubresonant {
                    out: c + 1,
                    alpha: alpha.0.clone(),
                    weight: crate::weighted_algebra::Weight::Finite(-alpha.weight(f.src())),
                })
            }
        }
    }
    Ok(m)
}

/// `Lf` together with the bases it is expressed in.
#[derive(Debug, Clone)]
pub struct LinearizedMap {
    pub basis_src: MonomialBasis,
    pub basis_tgt: MonomialBasis,
    /// `dim W x dim V`, rows indexed by `basis_tgt`.
    pub matrix: DMatrix<f64>,
}

pub fn linearize(f: &PolyMap) -> Result<LinearizedMap> {
    let (bs, bt) = bases(f)?;
    let matrix = pullback_in(f, &bs, &bt)?.transpose();
    Ok(LinearizedMap {
        basis_src: bs,
        basis_tgt: bt,
        matrix,
    })
}

#[derive(Serialize)]
struct LinearizedRepr<'a> {
    basis: Vec<&'a [u32]>,
    matrix: Vec<Vec<f64>>,
}

impl Serialize for LinearizedMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LinearizedRepr {
            basis: self.basis_src.entries().iter().map(|a| a.0.as_slice()).collect(),
            matrix: self.matrix.row_iter().map(|r| r.iter().copied().collect()).collect(),
        }
        .serialize(s)
    }
}

/// Evaluates every basis monomial at `v`; the last coordinate is 1.
pub fn embed(basis: &MonomialBasis, v: &[f64]) -> Result<DVector<f64>> {
    if v.len() != basis.spec().dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.spec().dim(),
            got: v.len(),
        });
    }
    Ok(DVector::from_iterator(basis.len(), basis.entries().iter().map(|a| a.eval(v))))
}

/// Reads off the degree-one coordinates.
pub fn project(basis: &MonomialBasis, xi: &DVector<f64>) -> Result<Vec<f64>> {
    if xi.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: xi.len(),
        });
    }
    Ok((0..basis.spec().dim()).map(|i| xi[basis.linear_index(i)]).collect())
}

/// Structural checks on a linearized map.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    /// Nonzero entries below the (weight, degree) staircase.
    pub triangularity_violations: usize,
    pub max_violation: f64,
    /// `||(Lf - I)^dim||_max`; small exactly when `Lf` is unipotent.
    pub nilpotency_defect: Option<f64>,
    /// Max deviation of the constant row from `(0, ..., 0, 1)`.
    pub constant_row_defect: f64,
}

impl StructureReport {
    pub fn is_block_triangular(&self) -> bool {
        self.triangularity_violations == 0
    }
}

pub fn check_structure(l: &LinearizedMap) -> StructureReport {
    let m = &l.matrix;
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if m[(r, c)] != 0.0 && l.basis_src.group_key(c) < l.basis_tgt.group_key(r) {
                count += 1;
                worst = worst.max(m[(r, c)].abs());
            }
        }
    }
    let nilpotency_defect = m.is_square().then(|| {
        let n = m.nrows();
        let d = m - DMatrix::<f64>::identity(n, n);
        let mut p = DMatrix::<f64>::identity(n, n);
        for _ in 0..n {
            p = &p * &d;
        }
        p.amax()
    });
    let last = l.basis_tgt.constant_index();
    let src_last = l.basis_src.constant_index();
    let constant_row_defect = (0..m.ncols())
        .map(|c| (m[(last, c)] - if c == src_last { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    StructureReport {
        triangularity_violations: count,
        max_violation: worst,
        nilpotency_defect,
        constant_row_defect,
    }
}

#[cfg(test)]
mod tests;
