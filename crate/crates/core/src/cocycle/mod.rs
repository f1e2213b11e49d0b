//! Sequences of invertible linear maps and centred subresonant maps between
//! copies of one weighted space.
//!
//! Long products are never formed directly: vectors and matrices are
//! renormalized every step and their scales accumulated as logarithms.

mod generate;
mod growth;
mod lyapunov;
mod merge;
mod metric;
mod transport;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::srpoly::PolyMap;
use crate::weighted_algebra::{flag_of, WeightSpec};

pub use generate::{generate_sequence, inject_term, Generator};
pub use growth::{growth_check, BoundReport, DegreeBound, GrowthOptions, GrowthReport, Verdict};
pub use lyapunov::{
    forward_regularity, linearized_spectrum, lyapunov_weight, qr_exponents, qr_history, resonant_combinations,
    LinearizedSpectrumReport, LyapunovEstimate, LyapunovSpectrum, SpectrumEntry,
};
pub use merge::{constant_instance, triangular_merge, MergeReport};
pub use metric::{check_metric, lyapunov_metric, LyapunovMetric, MetricReport};
pub use transport::{equivariance_transport, TransportResult};

/// Which built-in generator produced a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `exp(lambda + eps*xi)` times a random orthogonal matrix on each weight block.
    DiagonalModel,
    /// Diagonal model plus strictly weight-decreasing off-diagonal terms.
    Perturbed,
    /// Perturbed linear part plus subresonant terms of degree `2..=d0`.
    Polynomial,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::DiagonalModel => "diagonal_model",
            Mode::Perturbed => "perturbed",
            Mode::Polynomial => "polynomial",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diagonal_model" => Ok(Mode::DiagonalModel),
            "perturbed" => Ok(Mode::Perturbed),
            "polynomial" => Ok(Mode::Polynomial),
            other => Err(Error::Parse(format!(
                "unknown mode `{other}` (expected diagonal_model, perturbed or polynomial)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
enum Items {
    Linear(Vec<DMatrix<f64>>),
    Poly(Vec<PolyMap>),
}

/// A finite sequence `A_0, A_1, ...` (or `f_0, f_1, ...`) on one weighted space.
#[derive(Debug, Clone)]
pub struct CocycleSequence {
    spec: WeightSpec,
    items: Items,
}

const DET_TOL: f64 = 1e-300;

impl CocycleSequence {
    /// Stored invertible matrices.
    pub fn linear(spec: WeightSpec, mats: Vec<DMatrix<f64>>) -> Result<Self> {
        let d = spec.dim();
        for (i, a) in mats.iter().enumerate() {
            if a.nrows() != d || a.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d * d,
                    got: a.nrows() * a.ncols(),
                });
            }
            let det = a.determinant();
            if det.is_nan() || det.abs() <= DET_TOL {
                return Err(Error::InvalidParameter(format!("A_{i} is singular (det = {det:e})")));
            }
        }
        Ok(Self {
            spec,
            items: Items::Linear(mats),
        })
    }

    /// Stored polynomial maps with `f_i(0) = 0` and invertible linear part.
    pub fn poly(spec: WeightSpec, maps: Vec<PolyMap>) -> Result<Self> {
        for (i, f) in maps.iter().enumerate() {
            if f.src() != &spec || f.tgt() != &spec {
                return Err(Error::SpecMismatch(format!("f_{i} is {} -> {}, expected {spec}", f.src(), f.tgt())));
            }
            if f.constant().iter().any(|&c| c != 0.0) {
                return Err(Error::InvalidParameter(format!("f_{i} does not fix the origin")));
            }
            let det = f.linear_part().determinant();
            if det.is_nan() || det.abs() <= DET_TOL {
                return Err(Error::InvalidParameter(format!("D_0 f_{i} is singular (det = {det:e})")));
            }
        }
        Ok(Self {
            spec,
            items: Items::Poly(maps),
        })
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        match &self.items {
            Items::Linear(v) => v.len(),
            Items::Poly(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.items, Items::Poly(_))
    }

    /// `A_i`, or `D_0 f_i` for polynomial sequences.
    pub fn matrix(&self, i: usize) -> DMatrix<f64> {
        match &self.items {
            Items::Linear(v) => v[i].clone(),
            Items::Poly(v) => v[i].linear_part(),
        }
    }

    pub fn matrices(&self) -> impl Iterator<Item = DMatrix<f64>> + '_ {
        (0..self.len()).map(|i| self.matrix(i))
    }

    /// `f_i`; linear items are converted.
    pub fn map(&self, i: usize) -> PolyMap {
        match &self.items {
            Items::Linear(v) => PolyMap::linear(&self.spec, &self.spec, &v[i]).expect("square"),
            Items::Poly(v) => v[i].clone(),
        }
    }

    pub fn maps(&self) -> impl Iterator<Item = PolyMap> + '_ {
        (0..self.len()).map(|i| self.map(i))
    }

    /// First `n` items.
    pub fn prefix(&self, n: usize) -> Self {
        let items = match &self.items {
            Items::Linear(v) => Items::Linear(v[..n.min(v.len())].to_vec()),
            Items::Poly(v) => Items::Poly(v[..n.min(v.len())].to_vec()),
        };
        Self {
            spec: self.spec.clone(),
            items,
        }
    }

    /// Whether every matrix is block upper triangular for the coordinate flag,
    /// i.e. preserves each prefix `V_{<= lambda_i}`.
    pub fn preserves_flag(&self, tol: f64) -> bool {
        let flag = flag_of(&self.spec);
        self.matrices().all(|a| {
            let scale = a.amax();
            flag.levels.iter().all(|l| {
                let p = l.prefix_len;
                (p..a.nrows()).all(|r| (0..p).all(|c| a[(r, c)].abs() <= tol * scale))
            })
        })
    }
}

impl Serialize for CocycleSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CocycleSequence", 2)?;
        st.serialize_field("spec", &self.spec)?;
        match &self.items {
            Items::Linear(v) => {
                let rows: Vec<Vec<Vec<f64>>> =
                    v.iter().map(|a| a.row_iter().map(|r| r.iter().copied().collect()).collect()).collect();
                st.serialize_field("matrices", &rows)?;
            }
            Items::Poly(v) => st.serialize_field("maps", v)?,
        }
        st.end()
    }
}

/// A real number `m * exp(e)` with `|m|` kept near 1, for values far outside
/// the `f64` range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Scaled {
    pub m: f64,
    pub e: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { m: 0.0, e: 0.0 };

    pub fn new(m: f64, e: f64) -> Self {
        if m == 0.0 {
            return Self::ZERO;
        }
        Scaled {
            m: m.signum(),
            e: e + m.abs().ln(),
        }
    }

    pub fn add(self, o: Scaled) -> Scaled {
        if self.m == 0.0 {
            return o;
        }
        if o.m == 0.0 {
            return self;
        }
        let e = self.e.max(o.e);
        Scaled::new(self.m * (self.e - e).exp() + o.m * (o.e - e).exp(), e)
    }

    pub fn neg(self) -> Scaled {
        Scaled { m: -self.m, e: self.e }
    }

    pub fn ln_abs(self) -> f64 {
        if self.m == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.e
        }
    }

    pub fn to_f64(self) -> f64 {
        self.m * self.e.exp()
    }
}

/// Renormalizes `v` in place and returns `ln ||v||` of the input.
pub(crate) fn renormalize(v: &mut nalgebra::DVector<f64>) -> f64 {
    let n = v.norm();
    if n > 0.0 {
        *v /= n;
    }
    n.ln()
}
