use nalgebra::DMatrix;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{CocycleSequence, Mode};
use crate::error::{Error, Result};
use crate::linearizer::monomial_basis;
use crate::srpoly::{MultiIndex, PolyMap};
use crate::weighted_algebra::{flag_of, ratio_to_f64, WeightSpec};

/// Deterministic per-index generator: item `i` depends only on `(seed, i)`.
#[derive(Debug, Clone)]
pub struct Generator {
    pub spec: WeightSpec,
    pub mode: Mode,
    pub eps: f64,
    pub seed: u64,
    /// Base size of the nonlinear coefficients in polynomial mode.
    pub poly_scale: f64,
}

impl Generator {
    pub fn new(spec: WeightSpec, mode: Mode, eps: f64, seed: u64) -> Result<Self> {
        spec.require_negative()?;
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("eps must be finite and >= 0, got {eps}")));
        }
        Ok(Self {
            spec,
            mode,
            eps,
            seed,
            poly_scale: 0.5,
        })
    }

    fn rng(&self, i: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i as u64);
        rng
    }

    /// Linear part of item `i`.
    pub fn linear(&self, i: usize) -> DMatrix<f64> {
        self.linear_with(&mut self.rng(i))
    }

    fn linear_with(&self, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let d = self.spec.dim();
        let flag = flag_of(&self.spec);
        let fluct = match self.mode {
            Mode::DiagonalModel => self.eps,
            Mode::Perturbed | Mode::Polynomial => self.eps / 2.0,
        };
        let mut a = DMatrix::zeros(d, d);
        let mut lo = 0;
        for level in &flag.levels {
            let hi = level.prefix_len;
            let m = hi - lo;
            let xi: f64 = rng.random_range(-1.0..=1.0);
            let s = (ratio_to_f64(level.weight) + fluct * xi).exp();
            let q = random_orthogonal(m, rng);
            a.view_mut((lo, lo), (m, m)).copy_from(&(q * s));
            lo = hi;
        }
        if self.mode != Mode::DiagonalModel && flag.levels.len() > 1 {
            // Entries mapping a level into a strictly lower one. Their
            // Frobenius norm stays below exp(lambda_1) (e^eps - e^{eps/2}), so
            // every v of weight lambda satisfies |A v| <= e^{lambda + eps}|v|.
            let budget = ratio_to_f64(self.spec.min()).exp() * (self.eps.exp() - (self.eps / 2.0).exp());
            let mut off = DMatrix::zeros(d, d);
            for c in 0..d {
                let lc = self.spec.level_of(c);
                for r in 0..d {
                    if self.spec.level_of(r) < lc {
                        off[(r, c)] = rng.sample::<f64, _>(StandardNormal);
                    }
                }
            }
            let norm = off.norm();
            if norm > 0.0 && budget > 0.0 {
                let frac: f64 = rng.random_range(0.5..=1.0);
                a += off * (budget * frac / norm);
            }
        }
        a
    }

    /// Item `i` as a polynomial map with `f(0) = 0`.
    pub fn poly(&self, i: usize) -> PolyMap {
        let mut rng = self.rng(i);
        let a = self.linear_with(&mut rng);
        let mut f = PolyMap::linear(&self.spec, &self.spec, &a).expect("square");
        if self.mode == Mode::Polynomial {
            let size = self.poly_scale * (self.eps * i as f64).exp();
            for (j, alpha) in higher_subresonant_terms(&self.spec) {
                let c: f64 = rng.random_range(-1.0..=1.0);
                f.add_term(j, alpha, size * c).expect("in range");
            }
        }
        f
    }
}

/// `(j, alpha)` with `2 <= |alpha|` and term weight `<= 0`, in a fixed order.
pub(crate) fn higher_subresonant_terms(ws: &WeightSpec) -> Vec<(usize, MultiIndex)> {
    let basis = monomial_basis(ws).expect("negative spec");
    let mut out = Vec::new();
    for j in 0..ws.dim() {
        for alpha in basis.entries() {
            if alpha.degree() >= 2 && ws.weight(j) - alpha.weight(ws) <= Zero::zero() {
                out.push((j, alpha.clone()));
            }
        }
    }
    out
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, signs fixed).
fn random_orthogonal(m: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for c in 0..m {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    q
}

/// Materializes `n` items of the generator.
pub fn generate_sequence(spec: &WeightSpec, mode: Mode, eps: f64, seed: u64, n: usize) -> Result<CocycleSequence> {
    let g = Generator::new(spec.clone(), mode, eps, seed)?;
    match mode {
        Mode::Polynomial => CocycleSequence::poly(spec.clone(), (0..n).map(|i| g.poly(i)).collect()),
        _ => CocycleSequence::linear(spec.clone(), (0..n).map(|i| g.linear(i)).collect()),
    }
}

/// Adds `coeff * x^alpha` to coordinate `j` of every map in the sequence.
pub fn inject_term(seq: &CocycleSequence, j: usize, alpha: &[u32], coeff: f64) -> Result<CocycleSequence> {
    let maps = seq
        .maps()
        .map(|mut f| {
            f.add_term(j, MultiIndex(alpha.to_vec()), coeff)?;
            Ok(f)
        })
        .collect::<Result<Vec<_>>>()?;
    CocycleSequence::poly(seq.spec().clone(), maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::srpoly::{classify, SrClass};

    fn spec(ws: &[i64]) -> WeightSpec {
        WeightSpec::from_ints(ws).unwrap()
    }

    #[test]
    fn deterministic_per_index() {
        let g = Generator::new(spec(&[-3, -2, -2, -1]), Mode::Perturbed, 0.1, 9).unwrap();
        assert_eq!(g.linear(17), g.linear(17));
        assert_ne!(g.linear(17), g.linear(18));
        let seq = generate_sequence(&spec(&[-3, -2, -2, -1]), Mode::Perturbed, 0.1, 9, 20).unwrap();
        assert_eq!(seq.matrix(17), g.linear(17));
    }

    #[test]
    fn orthogonal_blocks_and_flag() {
        let ws = spec(&[-2, -2, -1]);
        let g = Generator::new(ws.clone(), Mode::DiagonalModel, 0.0, 3).unwrap();
        let a = g.linear(0);
        let block = a.view((0, 0), (2, 2)) / (-2.0f64).exp();
        assert!((block.transpose() * &block - DMatrix::<f64>::identity(2, 2)).amax() < 1e-12);
        assert!((a[(2, 2)].abs() - (-1.0f64).exp()).abs() < 1e-15);
        let seq = generate_sequence(&ws, Mode::Perturbed, 0.2, 3, 10).unwrap();
        assert!(seq.preserves_flag(0.0));
    }

    #[test]
    fn perturbed_linear_part_respects_level_bounds() {
        let ws = spec(&[-3, -2, -1]);
        let eps = 0.3;
        let g = Generator::new(ws.clone(), Mode::Perturbed, eps, 5).unwrap();
        for i in 0..50 {
            let a = g.linear(i);
            for (p, lam) in [(1, -3.0), (2, -2.0), (3, -1.0f64)] {
                let op = a.columns(0, p).into_owned().singular_values().max();
                assert!(op <= (lam + eps).exp() * (1.0 + 1e-12), "step {i}, prefix {p}: {op}");
            }
        }
    }

    #[test]
    fn perturbed_with_zero_eps_is_block_diagonal() {
        let ws = spec(&[-2, -1]);
        let seq = generate_sequence(&ws, Mode::Perturbed, 0.0, 1, 5).unwrap();
        for a in seq.matrices() {
            assert_eq!(a[(0, 1)], 0.0);
            assert!((a[(0, 0)].abs() - (-2.0f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn polynomial_mode_items_are_centred_and_subresonant() {
        let ws = spec(&[-3, -2, -1]);
        let seq = generate_sequence(&ws, Mode::Polynomial, 0.05, 2, 30).unwrap();
        for f in seq.maps() {
            assert!(classify(&f).class.is_within(SrClass::Subresonant));
            assert!(f.constant().iter().all(|&c| c == 0.0));
            assert!(f.degree() >= 2);
        }
        assert_eq!(higher_subresonant_terms(&spec(&[-2, -1])), vec![(0, MultiIndex(vec![0, 2]))]);
    }

    #[test]
    fn diagonal_product_growth() {
        let ws = spec(&[-2, -1]);
        let eps = 0.01;
        let seq = generate_sequence(&ws, Mode::DiagonalModel, eps, 1, 100).unwrap();
        let log_norm: f64 = seq.matrices().map(|a| a[(0, 0)].abs().ln()).sum();
        assert!((log_norm + 200.0).abs() <= 100.0 * eps + 1e-9);
    }
}
