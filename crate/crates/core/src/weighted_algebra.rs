//! Weights on finite-dimensional spaces written in adapted coordinates.
//!
//! A [`WeightSpec`] assigns an exact rational weight to every coordinate of
//! `R^n`, in nondecreasing order, so every level `V_{<= lambda}` of the
//! associated flag is a coordinate prefix. The weight of a vector is the
//! largest weight among its nonzero coordinates. Induced weights on tensor
//! products, duals, quotients and multilinear maps are computed from the
//! coordinate weights alone.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::Rational64;

/// Value of a weight: an exact rational, or `-inf` for the zero vector.
///
/// The derived order puts `NegInfinity` below every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    NegInfinity,
    Finite(Rational),
}

impl Weight {
    pub fn int(v: i64) -> Self {
        Weight::Finite(Rational::from_integer(v))
    }

    pub fn finite(self) -> Option<Rational> {
        match self {
            Weight::Finite(r) => Some(r),
            Weight::NegInfinity => None,
        }
    }

    pub fn is_neg_infinity(self) -> bool {
        matches!(self, Weight::NegInfinity)
    }

    /// Tensor-product addition; `-inf` absorbs.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Weight) -> Weight {
        match (self, other) {
            (Weight::Finite(a), Weight::Finite(b)) => Weight::Finite(a + b),
            _ => Weight::NegInfinity,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Weight::Finite(r) => ratio_to_f64(r),
            Weight::NegInfinity => f64::NEG_INFINITY,
        }
    }
}

impl From<Rational> for Weight {
    fn from(r: Rational) -> Self {
        Weight::Finite(r)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(r) => write!(f, "{r}"),
            Weight::NegInfinity => write!(f, "-inf"),
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-inf" {
            return Ok(Weight::NegInfinity);
        }
        parse_rational(s).map(Weight::Finite)
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn ratio_to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::from_str(s.trim()).map_err(|_| Error::Parse(format!("not a rational: `{s}`")))
}

/// Per-coordinate weights of an adapted basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightSpec {
    weights: Vec<Rational>,
}

/// A spec produced by an induced construction together with the permutation
/// that restores adapted order: `perm[new] = old` coordinate index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Induced {
    pub spec: WeightSpec,
    pub perm: Vec<usize>,
}

impl WeightSpec {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySpec);
        }
        if let Some(i) = (1..weights.len()).find(|&i| weights[i] < weights[i - 1]) {
            return Err(Error::NotAdapted(i));
        }
        Ok(Self { weights })
    }

    /// Integer weights, e.g. `WeightSpec::from_ints(&[-3, -2, -1])`.
    pub fn from_ints(ws: &[i64]) -> Result<Self> {
        Self::new(ws.iter().map(|&w| Rational::from_integer(w)).collect())
    }

    /// Sorts arbitrary coordinate weights into adapted order.
    pub fn sorted(weights: Vec<Rational>) -> Result<Induced> {
        let mut perm: Vec<usize> = (0..weights.len()).collect();
        perm.sort_by(|&a, &b| weights[a].cmp(&weights[b]));
        let spec = Self::new(perm.iter().map(|&i| weights[i]).collect())?;
        Ok(Induced { spec, perm })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> Rational {
        self.weights[i]
    }

    /// Distinct values `lambda_1 < ... < lambda_l`.
    pub fn distinct(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::new();
        for &w in &self.weights {
            if out.last() != Some(&w) {
                out.push(w);
            }
        }
        out
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 && self.weights[i - 1] == *w {
                *out.last_mut().unwrap() += 1;
            } else {
                out.push(1);
            }
        }
        out
    }

    /// Index of the distinct level containing coordinate `i`.
    pub fn level_of(&self, i: usize) -> usize {
        self.weights[..=i].windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn min(&self) -> Rational {
        self.weights[0]
    }

    pub fn max(&self) -> Rational {
        *self.weights.last().unwrap()
    }

    pub fn is_negative(&self) -> bool {
        self.max() < Rational::zero()
    }

    pub fn require_negative(&self) -> Result<()> {
        if self.is_negative() {
            Ok(())
        } else {
            Err(Error::NonNegativeWeights)
        }
    }

    /// `d_0 = floor(lambda_1 / lambda_l)`, the degree bound of subresonant maps.
    pub fn degree_bound(&self) -> Result<u32> {
        self.require_negative()?;
        let d = (self.min() / self.max()).floor().to_integer();
        Ok(d as u32)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.weights.iter().map(|&r| ratio_to_f64(r)).collect()
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, w) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, ")")
    }
}

// JSON form: {"weights": ["-3", "-2", "1/2"]}; integers may be bare numbers,
// and a bare array is accepted on input.
#[derive(Serialize, Deserialize)]
struct SpecRepr {
    weights: Vec<RationalRepr>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpecInput {
    Object(SpecRepr),
    Bare(Vec<RationalRepr>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RationalRepr {
    Int(i64),
    Text(String),
}

impl RationalRepr {
    fn to_rational(&self) -> Result<Rational> {
        match self {
            RationalRepr::Int(i) => Ok(Rational::from_integer(*i)),
            RationalRepr::Text(s) => parse_rational(s),
        }
    }
}

impl Serialize for WeightSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecRepr {
            weights: self.weights.iter().map(|w| RationalRepr::Text(w.to_string())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let weights = match SpecInput::deserialize(d)? {
            SpecInput::Object(r) => r.weights,
            SpecInput::Bare(w) => w,
        };
        let ws = weights
            .iter()
            .map(RationalRepr::to_rational)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        WeightSpec::new(ws).map_err(serde::de::Error::custom)
    }
}

/// One level of the flag: coordinates `0..prefix_len` span `V_{<= weight}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagLevel {
    pub weight: Rational,
    pub prefix_len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flag {
    pub levels: Vec<FlagLevel>,
}

impl Flag {
    pub fn indices(&self, level: usize) -> std::ops::Range<usize> {
        0..self.levels[level].prefix_len
    }

    /// Coordinates spanning `V_{< lambda_level}`.
    pub fn strict_indices(&self, level: usize) -> std::ops::Range<usize> {
        0..if level == 0 { 0 } else { self.levels[level - 1].prefix_len }
    }
}

pub fn flag_of(ws: &WeightSpec) -> Flag {
    let mut levels: Vec<FlagLevel> = Vec::new();
    for (i, &w) in ws.weights().iter().enumerate() {
        match levels.last_mut() {
            Some(l) if l.weight == w => l.prefix_len = i + 1,
            _ => levels.push(FlagLevel {
                weight: w,
                prefix_len: i + 1,
            }),
        }
    }
    Flag { levels }
}

/// Weight of a coordinate vector: the max weight over nonzero entries.
///
/// Entries with `|v_i| <= zero_tol * max_j |v_j|` are treated as zero.
pub fn weight_of_vector(ws: &WeightSpec, v: &[f64], zero_tol: f64) -> Result<Weight> {
    if v.len() != ws.dim() {
        return Err(Error::DimensionMismatch {
            expected: ws.dim(),
            got: v.len(),
        });
    }
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(Weight::NegInfinity);
    }
    let cut = zero_tol * scale;
    Ok(v
        .iter()
        .enumerate()
        .rev()
        .find(|(_, x)| x.abs() > cut)
        .map(|(i, _)| Weight::Finite(ws.weight(i)))
        .unwrap_or(Weight::NegInfinity))
}

/// Weights on `V (x) W` with basis `e_i (x) f_j` at old index `i * dim2 + j`.
pub fn tensor_weight(ws1: &WeightSpec, ws2: &WeightSpec) -> Induced {
    let mut raw = Vec::with_capacity(ws1.dim() * ws2.dim());
    for &a in ws1.weights() {
        for &b in ws2.weights() {
            raw.push(a + b);
        }
    }
    WeightSpec::sorted(raw).expect("nonempty")
}

/// Dual basis weights `-w_i`, re-sorted into adapted order.
pub fn dual_weight(ws: &WeightSpec) -> Induced {
    WeightSpec::sorted(ws.weights().iter().map(|w| -w).collect()).expect("nonempty")
}

/// Max-weight on `V (+) W`; old indices are `0..dim1` then `dim1..dim1+dim2`.
pub fn direct_sum_weight(ws1: &WeightSpec, ws2: &WeightSpec) -> Induced {
    let raw = ws1.weights().iter().chain(ws2.weights()).copied().collect();
    WeightSpec::sorted(raw).expect("nonempty")
}

/// Weight on `V / W` where `W` is spanned by the coordinates not in `kept`.
///
/// `kept` must list distinct in-range coordinates in increasing order; the
/// complementary coordinates then split every flag level, so the quotient is
/// identified with the span of `kept` carrying the restricted weights.
pub fn quotient_weight(ws: &WeightSpec, kept: &[usize]) -> Result<WeightSpec> {
    if kept.is_empty() {
        return Err(Error::IncompatibleSplitting("empty quotient".into()));
    }
    if let Some(&bad) = kept.iter().find(|&&i| i >= ws.dim()) {
        return Err(Error::IncompatibleSplitting(format!(
            "coordinate {bad} out of range for dimension {}",
            ws.dim()
        )));
    }
    if kept.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::IncompatibleSplitting(
            "kept coordinates must be strictly increasing".into(),
        ));
    }
    // Per level, dim V_{<=lambda} = |kept in prefix| + |complement in prefix|.
    let flag = flag_of(ws);
    let complement: Vec<usize> = (0..ws.dim()).filter(|i| !kept.contains(i)).collect();
    for level in &flag.levels {
        let a = kept.iter().filter(|&&i| i < level.prefix_len).count();
        let b = complement.iter().filter(|&&i| i < level.prefix_len).count();
        if a + b != level.prefix_len {
            return Err(Error::IncompatibleSplitting(format!(
                "level {} has dimension {} but the splitting gives {}",
                level.weight,
                level.prefix_len,
                a + b
            )));
        }
    }
    WeightSpec::new(kept.iter().map(|&i| ws.weight(i)).collect())
}

/// Weight of a `k`-linear map `T: V^{(x)k} -> W` given by its coefficients.
///
/// `coeffs` is row-major with shape `dim_tgt x dim_src^k`: entry
/// `a_{i, j_1..j_k}` sits at `i * n^k + j_1 * n^{k-1} + ... + j_k`. The result
/// is `max { eta_i - (lambda_{j_1} + ... + lambda_{j_k}) }` over entries above
/// the zero tolerance (relative to the largest entry), or `-inf` for `T = 0`.
pub fn multilinear_weight(
    src: &WeightSpec,
    tgt: &WeightSpec,
    k: usize,
    coeffs: &[f64],
    zero_tol: f64,
) -> Result<Weight> {
    let n = src.dim();
    let cols = n.checked_pow(k as u32).ok_or_else(|| Error::InvalidParameter("arity too large".into()))?;
    if coeffs.len() != tgt.dim() * cols {
        return Err(Error::DimensionMismatch {
            expected: tgt.dim() * cols,
            got: coeffs.len(),
        });
    }
    let scale = coeffs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(Weight::NegInfinity);
    }
    let cut = zero_tol * scale;
    let mut best = Weight::NegInfinity;
    for (flat, a) in coeffs.iter().enumerate() {
        if a.abs() <= cut {
            continue;
        }
        let i = flat / cols;
        let mut rest = flat % cols;
        let mut src_sum = Rational::zero();
        for _ in 0..k {
            src_sum += src.weight(rest % n);
            rest /= n;
        }
        best = best.max(Weight::Finite(tgt.weight(i) - src_sum));
    }
    Ok(best)
}

/// Weight of a linear map given as a `dim_tgt x dim_src` matrix.
pub fn linear_map_weight(src: &WeightSpec, tgt: &WeightSpec, t: &DMatrix<f64>, zero_tol: f64) -> Result<Weight> {
    if t.nrows() != tgt.dim() || t.ncols() != src.dim() {
        return Err(Error::DimensionMismatch {
            expected: tgt.dim() * src.dim(),
            got: t.nrows() * t.ncols(),
        });
    }
    let row_major: Vec<f64> = t.transpose().iter().copied().collect();
    multilinear_weight(src, tgt, 1, &row_major, zero_tol)
}

/// True iff the weight values and their multiplicities coincide.
pub fn compatible(ws1: &WeightSpec, ws2: &WeightSpec) -> bool {
    ws1.distinct() == ws2.distinct() && ws1.multiplicities() == ws2.multiplicities()
}

/// Whether a linear map with `weight(T) <= 0` satisfies `weight(Tv) = weight(v)`
/// for every `v`.
///
/// For `v` with top level `i`, the level-`i` component of `Tv` is `T_ii v_i`
/// (higher levels are not reached because `weight(T) <= 0`), so the property
/// holds for all `v` exactly when every diagonal level block `T_ii` is
/// injective. Rank is decided by singular values relative to `zero_tol`.
pub fn preserves_all_weights(src: &WeightSpec, tgt: &WeightSpec, t: &DMatrix<f64>, zero_tol: f64) -> Result<bool> {
    if !compatible(src, tgt) {
        return Err(Error::SpecMismatch(format!("{src} and {tgt} are not compatible")));
    }
    if linear_map_weight(src, tgt, t, zero_tol)? > Weight::int(0) {
        return Err(Error::InvalidParameter("map is not subresonant".into()));
    }
    let scale = t.amax().max(f64::MIN_POSITIVE);
    let fs = flag_of(src);
    for lvl in 0..fs.levels.len() {
        let lo = fs.strict_indices(lvl).end;
        let hi = fs.levels[lvl].prefix_len;
        let block = t.view((lo, lo), (hi - lo, hi - lo)).clone_owned();
        let sv = block.singular_values();
        if sv.min() <= zero_tol.max(1e-12) * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Weight of the trivial weight on `R`: `0` for nonzero reals, `-inf` at zero.
pub fn scalar_weight(t: f64) -> Weight {
    if t == 0.0 {
        Weight::NegInfinity
    } else {
        Weight::int(0)
    }
}

/// Convenience: `|r|` as f64.
pub fn abs_f64(r: Rational) -> f64 {
    ratio_to_f64(r.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(ws: &[i64]) -> WeightSpec {
        WeightSpec::from_ints(ws).unwrap()
    }

    fn ints(s: &WeightSpec) -> Vec<i64> {
        s.weights().iter().map(|r| r.to_integer()).collect()
    }

    #[test]
    fn weight_of_vector_examples() {
        let ws = spec(&[-3, -2, -1]);
        assert_eq!(weight_of_vector(&ws, &[0.0, 1.0, 1.0], 1e-12).unwrap(), Weight::int(-1));
        assert_eq!(weight_of_vector(&ws, &[0.0, 0.0, 0.0], 1e-12).unwrap(), Weight::NegInfinity);
        assert_eq!(weight_of_vector(&spec(&[-2, -1]), &[5.0, 0.0], 1e-12).unwrap(), Weight::int(-2));
    }

    #[test]
    fn weight_of_vector_tolerance_and_errors() {
        let ws = spec(&[-3, -2, -1]);
        assert_eq!(weight_of_vector(&ws, &[1.0, 0.0, 1e-14], 1e-12).unwrap(), Weight::int(-3));
        assert_eq!(weight_of_vector(&ws, &[1.0, 0.0, 1e-14], 0.0).unwrap(), Weight::int(-1));
        assert!(matches!(
            weight_of_vector(&ws, &[1.0], 1e-12),
            Err(Error::DimensionMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn spec_rejects_unsorted_and_empty() {
        assert_eq!(WeightSpec::from_ints(&[-1, -2]), Err(Error::NotAdapted(1)));
        assert_eq!(WeightSpec::from_ints(&[]), Err(Error::EmptySpec));
    }

    #[test]
    fn derived_quantities() {
        let ws = spec(&[-3, -3, -2, -1, -1]);
        assert_eq!(ws.distinct().len(), 3);
        assert_eq!(ws.multiplicities(), vec![2, 1, 2]);
        assert_eq!(ws.degree_bound().unwrap(), 3);
        assert_eq!(ws.level_of(0), 0);
        assert_eq!(ws.level_of(2), 1);
        assert_eq!(ws.level_of(4), 2);
        assert!(spec(&[-1, 0]).degree_bound().is_err());
        let half = WeightSpec::new(vec![Rational::new(-5, 2), Rational::new(-1, 1)]).unwrap();
        assert_eq!(half.degree_bound().unwrap(), 2);
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(ints(&tensor_weight(&spec(&[-2, -1]), &spec(&[-1])).spec), vec![-3, -2]);
        let one = spec(&[-1]);
        let t2 = tensor_weight(&one, &one).spec;
        assert_eq!(ints(&tensor_weight(&t2, &one).spec), vec![-3]);
        let big = tensor_weight(&spec(&[-3, -2, -1]), &spec(&[-3, -2, -1]));
        assert_eq!(ints(&big.spec), vec![-6, -5, -5, -4, -4, -4, -3, -3, -2]);
        // e_3 (x) e_3 (old index 8) is the heaviest and lands last.
        assert_eq!(*big.perm.last().unwrap(), 8);
        assert_eq!(big.perm[0], 0);
    }

    #[test]
    fn tensor_brute_force_enumeration() {
        // Independent enumeration of pair sums for the 3x3 case.
        let w = [-3i64, -2, -1];
        let mut sums: Vec<i64> = w.iter().flat_map(|a| w.iter().map(move |b| a + b)).collect();
        sums.sort();
        let got = tensor_weight(&spec(&w), &spec(&w));
        assert_eq!(ints(&got.spec), sums);
        for (new, &old) in got.perm.iter().enumerate() {
            assert_eq!(w[old / 3] + w[old % 3], ints(&got.spec)[new]);
        }
    }

    #[test]
    fn dual_examples() {
        let d = dual_weight(&spec(&[-3, -2, -1]));
        assert_eq!(ints(&d.spec), vec![1, 2, 3]);
        assert_eq!(d.perm, vec![2, 1, 0]);
        assert_eq!(ints(&dual_weight(&spec(&[-1, -1])).spec), vec![1, 1]);
        let ws = spec(&[-2, -2, -1]);
        assert_eq!(dual_weight(&dual_weight(&ws).spec).spec, ws);
    }

    #[test]
    fn direct_sum_sorts() {
        let s = direct_sum_weight(&spec(&[-3, -1]), &spec(&[-2]));
        assert_eq!(ints(&s.spec), vec![-3, -2, -1]);
        assert_eq!(s.perm, vec![0, 2, 1]);
    }

    #[test]
    fn quotient_examples() {
        let ws = spec(&[-3, -2, -1]);
        assert_eq!(ints(&quotient_weight(&ws, &[0, 2]).unwrap()), vec![-3, -1]);
        assert_eq!(ints(&quotient_weight(&spec(&[-2, -2]), &[1]).unwrap()), vec![-2]);
        assert_eq!(quotient_weight(&ws, &[0, 1, 2]).unwrap(), ws);
        assert!(matches!(quotient_weight(&ws, &[0, 0]), Err(Error::IncompatibleSplitting(_))));
        assert!(matches!(quotient_weight(&ws, &[3]), Err(Error::IncompatibleSplitting(_))));
    }

    #[test]
    fn multilinear_examples() {
        let ws = spec(&[-3, -2, -1]);
        let mut t = vec![0.0; 9];
        t[2] = 1.0; // row 0, column 2
        assert_eq!(multilinear_weight(&ws, &ws, 1, &t, 1e-12).unwrap(), Weight::int(-2));
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(linear_map_weight(&ws, &ws, &id, 1e-12).unwrap(), Weight::int(0));
        let ws2 = spec(&[-2, -1]);
        let mut q = vec![0.0; 2 * 4];
        q[3] = 1.0; // e_2 (x) e_2 -> e_1
        assert_eq!(multilinear_weight(&ws2, &ws2, 2, &q, 1e-12).unwrap(), Weight::int(0));
        assert_eq!(multilinear_weight(&ws2, &ws2, 2, &[0.0; 8], 1e-12).unwrap(), Weight::NegInfinity);
        assert!(multilinear_weight(&ws2, &ws2, 2, &[0.0; 7], 1e-12).is_err());
    }

    #[test]
    fn flag_examples() {
        let f = flag_of(&spec(&[-3, -2, -1]));
        assert_eq!(
            f.levels.iter().map(|l| (l.prefix_len, l.weight.to_integer())).collect::<Vec<_>>(),
            vec![(1, -3), (2, -2), (3, -1)]
        );
        let f = flag_of(&spec(&[-1, -1]));
        assert_eq!(f.levels.len(), 1);
        assert_eq!(f.indices(0), 0..2);
        let f = flag_of(&spec(&[-2, -2, -1]));
        assert_eq!(f.levels.iter().map(|l| l.prefix_len).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(f.strict_indices(1), 0..2);
    }

    #[test]
    fn compatible_examples() {
        assert!(compatible(&spec(&[-2, -1]), &spec(&[-2, -1])));
        assert!(!compatible(&spec(&[-2, -1]), &spec(&[-2, -2])));
        assert!(!compatible(&spec(&[-3, -2, -1]), &spec(&[-3, -2, -2])));
    }

    #[test]
    fn weight_preservation_needs_block_rank_not_just_basis_vectors() {
        // Every basis vector keeps its weight, yet T is singular.
        let ws = spec(&[-1, -1]);
        let t = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        for j in 0..2 {
            let col: Vec<f64> = t.column(j).iter().copied().collect();
            assert_eq!(weight_of_vector(&ws, &col, 1e-12).unwrap(), Weight::int(-1));
        }
        assert!(!preserves_all_weights(&ws, &ws, &t, 1e-12).unwrap());
        let v = [1.0, -1.0];
        let tv: Vec<f64> = (&t * nalgebra::DVector::from_row_slice(&v)).iter().copied().collect();
        assert_eq!(weight_of_vector(&ws, &tv, 1e-12).unwrap(), Weight::NegInfinity);
    }

    #[test]
    fn json_form() {
        let ws: WeightSpec = serde_json::from_str(r#"{"weights": ["-3", -2, "-1/2"]}"#).unwrap();
        assert_eq!(ws.weight(2), Rational::new(-1, 2));
        assert_eq!(serde_json::to_string(&ws).unwrap(), r#"{"weights":["-3","-2","-1/2"]}"#);
        assert!(serde_json::from_str::<WeightSpec>(r#"{"weights": ["-1", "-2"]}"#).is_err());
        assert!(serde_json::from_str::<WeightSpec>(r#"{"weights": ["x"]}"#).is_err());
        let bare: WeightSpec = serde_json::from_str("[-2, \"-1\"]").unwrap();
        assert_eq!(bare, WeightSpec::from_ints(&[-2, -1]).unwrap());
    }
}
