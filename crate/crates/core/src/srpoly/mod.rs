//! Polynomial maps between weighted spaces.
//!
//! A [`PolyMap`] is a sparse table `(target coordinate j, multi-index alpha)
//! -> coefficient`, so the map is `x |-> sum_j sum_alpha c_{j,alpha} x^alpha e_j`.
//! Term weights `eta_j - sum_i alpha_i lambda_i` are exact.

mod classify;
mod compose;
mod group;
mod invert;
mod norm;

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::weighted_algebra::{Rational, Weight, WeightSpec};

pub use classify::{classify, max_degree, Classification, SrClass};
pub use compose::{compose, compose_truncated, compose_with, translate};
pub use group::{check_membership, group_op, Group};
pub use invert::{invert, invert_with};
pub use norm::{poly_norm, polarize};

/// Exponent vector of a monomial `x^alpha`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut a = vec![0; n];
        a[i] = 1;
        MultiIndex(a)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `sum_i alpha_i lambda_i`.
    pub fn weight(&self, ws: &WeightSpec) -> Rational {
        self.0
            .iter()
            .zip(ws.weights())
            .fold(Rational::zero(), |acc, (&a, &l)| acc + l * Rational::from_integer(a as i64))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&a, &xi)| xi.powi(a as i32)).product()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `prod_i alpha_i!`.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a)).product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub(crate) fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Polynomial map `src -> tgt` in adapted coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMap {
    src: WeightSpec,
    tgt: WeightSpec,
    terms: BTreeMap<(usize, MultiIndex), f64>,
}

impl PolyMap {
    pub fn zero(src: WeightSpec, tgt: WeightSpec) -> Self {
        Self {
            src,
            tgt,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(ws: &WeightSpec) -> Self {
        let n = ws.dim();
        let mut f = Self::zero(ws.clone(), ws.clone());
        for i in 0..n {
            f.terms.insert((i, MultiIndex::unit(n, i)), 1.0);
        }
        f
    }

    /// Linear map with the given `dim_tgt x dim_src` matrix.
    pub fn linear(src: &WeightSpec, tgt: &WeightSpec, a: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() != tgt.dim() || a.ncols() != src.dim() {
            return Err(Error::DimensionMismatch {
                expected: tgt.dim() * src.dim(),
                got: a.nrows() * a.ncols(),
            });
        }
        let mut f = Self::zero(src.clone(), tgt.clone());
        for r in 0..a.nrows() {
            for c in 0..a.ncols() {
                f.add_term(r, MultiIndex::unit(src.dim(), c), a[(r, c)])?;
            }
        }
        Ok(f)
    }

    /// Translation `x |-> x + v`.
    pub fn translation(ws: &WeightSpec, v: &[f64]) -> Result<Self> {
        check_len(ws.dim(), v.len())?;
        let mut f = Self::identity(ws);
        for (j, &c) in v.iter().enumerate() {
            f.add_term(j, MultiIndex::zero(ws.dim()), c)?;
        }
        Ok(f)
    }

    /// Builds a map from `(out, alpha, coeff)` triples; duplicates are summed.
    pub fn from_terms<I>(src: &WeightSpec, tgt: &WeightSpec, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Vec<u32>, f64)>,
    {
        let mut f = Self::zero(src.clone(), tgt.clone());
        for (j, alpha, c) in terms {
            f.add_term(j, MultiIndex(alpha), c)?;
        }
        Ok(f)
    }

    /// Adds `c x^alpha` to coordinate `j`; exact zeros are not stored.
    pub fn add_term(&mut self, j: usize, alpha: MultiIndex, c: f64) -> Result<()> {
        if j >= self.tgt.dim() {
            return Err(Error::InvalidParameter(format!(
                "output coordinate {} out of range for dimension {}",
                j + 1,
                self.tgt.dim()
            )));
        }
        check_len(self.src.dim(), alpha.len())?;
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite coefficient {c}")));
        }
        let key = (j, alpha);
        let v = self.terms.get(&key).copied().unwrap_or(0.0) + c;
        if v == 0.0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
        Ok(())
    }

    pub fn src(&self) -> &WeightSpec {
        &self.src
    }

    pub fn tgt(&self) -> &WeightSpec {
        &self.tgt
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &MultiIndex, f64)> {
        self.terms.iter().map(|((j, a), &c)| (*j, a, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, j: usize, alpha: &[u32]) -> f64 {
        self.terms.get(&(j, MultiIndex(alpha.to_vec()))).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `eta_j - sum_i alpha_i lambda_i`.
    pub fn term_weight(&self, j: usize, alpha: &MultiIndex) -> Rational {
        self.tgt.weight(j) - alpha.weight(&self.src)
    }

    /// Max term weight, `-inf` for the zero map.
    pub fn weight(&self) -> Weight {
        self.terms
            .keys()
            .map(|(j, a)| Weight::Finite(self.term_weight(*j, a)))
            .max()
            .unwrap_or(Weight::NegInfinity)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(_, a)| a.degree()).max().unwrap_or(0)
    }

    /// Degree-`k` homogeneous component.
    pub fn homogeneous(&self, k: u32) -> Self {
        self.filter(|_, a| a.degree() == k)
    }

    /// Terms of degree at most `k`.
    pub fn truncate(&self, k: u32) -> Self {
        self.filter(|_, a| a.degree() <= k)
    }

    pub fn filter(&self, keep: impl Fn(usize, &MultiIndex) -> bool) -> Self {
        Self {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            terms: self.terms.iter().filter(|((j, a), _)| keep(*j, a)).map(|(k, &v)| (k.clone(), v)).collect(),
        }
    }

    /// `f(0)`.
    pub fn constant(&self) -> Vec<f64> {
        let zero = MultiIndex::zero(self.src.dim());
        (0..self.tgt.dim()).map(|j| self.terms.get(&(j, zero.clone())).copied().unwrap_or(0.0)).collect()
    }

    /// `D_0 f` as a `dim_tgt x dim_src` matrix.
    pub fn linear_part(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.tgt.dim(), self.src.dim());
        for ((j, alpha), &c) in &self.terms {
            if alpha.degree() == 1 {
                let i = alpha.0.iter().position(|&e| e == 1).unwrap();
                a[(*j, i)] += c;
            }
        }
        a
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.src.dim(), x.len())?;
        let mut out = vec![0.0; self.tgt.dim()];
        for ((j, alpha), &c) in &self.terms {
            out[*j] += c * alpha.eval(x);
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.src.clone(), self.tgt.clone());
        for ((j, a), &c) in &self.terms {
            if c * s != 0.0 {
                out.terms.insert((*j, a.clone()), c * s);
            }
        }
        out
    }

    pub fn add(&self, other: &PolyMap) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for ((j, a), &c) in &other.terms {
            out.add_term(*j, a.clone(), c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PolyMap) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Removes coefficients with `|c| <= tol`.
    pub fn prune(&self, tol: f64) -> Self {
        self.filter_coeffs(|c| c.abs() > tol)
    }

    fn filter_coeffs(&self, keep: impl Fn(f64) -> bool) -> Self {
        Self {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            terms: self.terms.iter().filter(|(_, &c)| keep(c)).map(|(k, &v)| (k.clone(), v)).collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Max-abs coefficient of `self - other`.
    pub fn max_abs_diff(&self, other: &PolyMap) -> Result<f64> {
        Ok(self.sub(other)?.max_abs_coeff())
    }

    fn check_same_shape(&self, other: &PolyMap) -> Result<()> {
        if self.src != other.src || self.tgt != other.tgt {
            return Err(Error::SpecMismatch(format!(
                "{} -> {} vs {} -> {}",
                self.src, self.tgt, other.src, other.tgt
            )));
        }
        Ok(())
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    out: usize,
    alpha: Vec<u32>,
    coeff: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    src: WeightSpec,
    tgt: WeightSpec,
    terms: Vec<TermRepr>,
}

impl Serialize for PolyMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            terms: self
                .terms
                .iter()
                .map(|((j, a), &c)| TermRepr {
                    out: j + 1,
                    alpha: a.0.clone(),
                    coeff: c,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PolyRepr::deserialize(d)?;
        let mut f = PolyMap::zero(repr.src, repr.tgt);
        for (i, t) in repr.terms.into_iter().enumerate() {
            if t.out == 0 {
                return Err(D::Error::custom(format!("terms[{i}].out is 1-based; got 0")));
            }
            f.add_term(t.out - 1, MultiIndex(t.alpha), t.coeff)
                .map_err(|e| D::Error::custom(format!("terms[{i}]: {e}")))?;
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(ws: &[i64]) -> WeightSpec {
        WeightSpec::from_ints(ws).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let ws = spec(&[-3, -2, -1]);
        assert_eq!(PolyMap::identity(&ws).evaluate(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let ws2 = spec(&[-2, -1]);
        let f = PolyMap::from_terms(&ws2, &ws2, [(0, vec![0, 2], 1.0)]).unwrap();
        assert_eq!(f.evaluate(&[0.0, 3.0]).unwrap(), vec![9.0, 0.0]);
        assert!(matches!(f.evaluate(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn general_cubic_form_at_zero_is_constant_part() {
        let f = crate::linearizer::golden::general_form(&[1.0, 2.0, 0.5, -1.0, 3.0, 0.0, 1.0], &[2.0, -1.0, 1.0, 0.5], &[1.0, 2.0]);
        assert_eq!(f.evaluate(&[0.0; 3]).unwrap(), vec![1.0, 2.0, 1.0]);
        assert_eq!(f.constant(), vec![1.0, 2.0, 1.0]);
    }

    #[test]
    fn linear_part_and_homogeneous() {
        let ws = spec(&[-2, -1]);
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.0, 3.0]);
        let f = PolyMap::linear(&ws, &ws, &a).unwrap();
        assert_eq!(f.linear_part(), a);
        assert_eq!(f.num_terms(), 3);
        assert!(f.homogeneous(2).is_zero());
        assert_eq!(f.degree(), 1);
    }

    #[test]
    fn add_term_rejects_bad_input() {
        let ws = spec(&[-2, -1]);
        let mut f = PolyMap::zero(ws.clone(), ws);
        assert!(f.add_term(2, MultiIndex(vec![1, 0]), 1.0).is_err());
        assert!(f.add_term(0, MultiIndex(vec![1]), 1.0).is_err());
        assert!(f.add_term(0, MultiIndex(vec![1, 0]), f64::NAN).is_err());
        f.add_term(0, MultiIndex(vec![1, 0]), 1.0).unwrap();
        f.add_term(0, MultiIndex(vec![1, 0]), -1.0).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn json_round_trip() {
        let ws = spec(&[-2, -1]);
        let f = PolyMap::from_terms(&ws, &ws, [(0, vec![0, 2], 1.5), (1, vec![0, 1], -2.0)]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains(r#""out":1"#));
        let g: PolyMap = serde_json::from_str(&text).unwrap();
        assert_eq!(f, g);
        let bad = r#"{"src":{"weights":["-1"]},"tgt":{"weights":["-1"]},"terms":[{"out":0,"alpha":[1],"coeff":1}]}"#;
        assert!(serde_json::from_str::<PolyMap>(bad).is_err());
    }
}
