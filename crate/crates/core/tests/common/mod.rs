#![allow(dead_code)]

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subresonant::linearizer::monomial_basis;
use subresonant::srpoly::{MultiIndex, PolyMap};
use subresonant::WeightSpec;

pub fn spec(ws: &[i64]) -> WeightSpec {
    WeightSpec::from_ints(ws).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    /// Any subresonant map with invertible linear part.
    Sr,
    /// `f - id` strictly subresonant.
    Ssr,
    /// `f - id` subresonant with weight-decreasing linear part.
    Star,
}

/// Random map on `ws` of the given kind; `constant` controls `f(0) != 0`.
pub fn random_map(ws: &WeightSpec, kind: Kind, constant: bool, rng: &mut ChaCha8Rng) -> PolyMap {
    let basis = monomial_basis(ws).unwrap();
    let n = ws.dim();
    let mut f = PolyMap::identity(ws);
    if kind == Kind::Sr {
        // Diagonal level blocks: identity plus a small perturbation, kept invertible.
        f = PolyMap::zero(ws.clone(), ws.clone());
        for j in 0..n {
            for i in 0..n {
                if ws.weight(i) == ws.weight(j) {
                    let base = if i == j { 1.0 + rng.random_range(0.0..1.0) } else { 0.0 };
                    let c = base + rng.random_range(-0.3..0.3);
                    f.add_term(j, MultiIndex::unit(n, i), c).unwrap();
                }
            }
        }
    }
    for j in 0..n {
        for alpha in basis.entries() {
            let w = ws.weight(j) - alpha.weight(ws);
            let deg = alpha.degree();
            let allowed = match deg {
                0 => constant,
                1 => w < Zero::zero(),
                _ => match kind {
                    Kind::Ssr => w < Zero::zero(),
                    _ => w <= Zero::zero(),
                },
            };
            if allowed && rng.random_bool(0.7) {
                f.add_term(j, alpha.clone(), rng.random_range(-1.0..1.0)).unwrap();
            }
        }
    }
    f
}

/// Random subresonant map with `f(0) = 0` and invertible linear part.
pub fn random_centred(ws: &WeightSpec, rng: &mut ChaCha8Rng) -> PolyMap {
    random_map(ws, Kind::Sr, false, rng)
}

pub fn random_vector(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

pub fn random_matrix(r: usize, c: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}
