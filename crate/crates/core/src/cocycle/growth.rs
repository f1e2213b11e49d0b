use std::fmt;

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::CocycleSequence;
use crate::error::{Error, Result};
use crate::srpoly::{compose_truncated, max_degree, poly_norm, polarize, PolyMap};
use crate::tolerance::Tolerances;
use crate::weighted_algebra::{flag_of, ratio_to_f64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Finite,
    Diverging,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Finite => "FINITE",
            Verdict::Diverging => "DIVERGING",
        })
    }
}

#[derive(Debug, Clone)]
pub struct GrowthOptions {
    pub eps: f64,
    /// Random unit pure tensors per degree, on top of the basis tensors.
    pub tensor_samples: usize,
    /// Random points per weight level for the pointwise bounds.
    pub point_samples: usize,
    pub seed: u64,
    /// Largest `C(N) / C(N/2)` still counted as stable.
    pub stability_ratio: f64,
}

impl GrowthOptions {
    pub fn new(eps: f64, seed: u64) -> Self {
        Self {
            eps,
            tensor_samples: 8,
            point_samples: 8,
            seed,
            stability_ratio: 1.5,
        }
    }
}

/// Empirical constant for one bound, over `n <= N` and over `n <= N/2`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub c_hat: f64,
    pub c_hat_half: f64,
    pub verdict: Verdict,
}

impl BoundReport {
    fn new(c_hat: f64, c_hat_half: f64, stability: f64) -> Self {
        let stable = c_hat.is_finite() && (c_hat == 0.0 || (c_hat_half > 0.0 && c_hat <= stability * c_hat_half));
        Self {
            c_hat,
            c_hat_half,
            verdict: if stable { Verdict::Finite } else { Verdict::Diverging },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeBound {
    pub k: u32,
    #[serde(flatten)]
    pub bound: BoundReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub eps: f64,
    pub steps: usize,
    /// Degree bound `d = floor(lambda_1 / lambda_l)`.
    pub d: u32,
    /// `|D~^k f^(n) v| <= C e^{n(w(v) + 3 k eps)} |v|` for pure tensors `v`.
    pub degrees: Vec<DegreeBound>,
    /// `|f^(n)(x)| <= C e^{n(w(x) + eps)} |x|` on the unit ball.
    pub upper: BoundReport,
    /// `|f^(n)(x)| >= C^{-1} e^{n(w(x) - eps)} |x|` on the unit ball.
    pub lower: BoundReport,
    /// Per-point constants of the upper bound, in sampling order.
    pub point_constants: Vec<f64>,
    /// `max(0, |D_0 f_j v| / (e^{w(v)+eps}|v|) - 1)` over `j` and weight levels.
    pub level_bound_violation: f64,
    /// Whether every diagonal level block of `D_0 f_j` expands by at least `e^{lambda_i - eps}`.
    pub lower_hypothesis: bool,
    /// `max_j |f_j|_P e^{-eps j}`.
    pub c_p: f64,
    /// `eps < -lambda_l / (10 d)`.
    pub eps_condition: bool,
}

impl GrowthReport {
    pub fn all_finite(&self) -> bool {
        self.degrees.iter().all(|d| d.bound.verdict == Verdict::Finite) && self.upper.verdict == Verdict::Finite
    }

    pub fn hypotheses_hold(&self, tol: f64) -> bool {
        self.level_bound_violation <= tol && self.eps_condition
    }
}

/// A pure tensor `v_1 (x) ... (x) v_k` of unit factors, with the factor weights.
struct Tensor {
    factors: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

/// `H(diag(e^{-lambda}) x)`: multiplies every coefficient by `e^{-alpha.lambda}`.
fn rescale(h: &PolyMap, lambda: &[f64]) -> Result<PolyMap> {
    let mut out = PolyMap::zero(h.src().clone(), h.tgt().clone());
    for (j, alpha, c) in h.terms() {
        let s: f64 = alpha.0.iter().zip(lambda).map(|(&a, l)| a as f64 * l).sum();
        out.add_term(j, alpha.clone(), c * (-s).exp())?;
    }
    Ok(out)
}

fn contract(polar: &[f64], dim_tgt: usize, n: usize, vs: &[Vec<f64>]) -> Vec<f64> {
    let k = vs.len();
    let cols = n.pow(k as u32);
    let mut out = vec![0.0; dim_tgt];
    for col in 0..cols {
        let mut prod = 1.0;
        let mut rest = col;
        for v in vs {
            prod *= v[rest % n];
            rest /= n;
            if prod == 0.0 {
                break;
            }
        }
        if prod == 0.0 {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o += polar[j * cols + col] * prod;
        }
    }
    out
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn random_unit(dim: usize, support: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut v = vec![0.0; dim];
        for x in v.iter_mut().take(support) {
            *x = rng.sample(StandardNormal);
        }
        let r = norm(&v);
        if r > 1e-3 && v[support - 1].abs() > 1e-3 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// Checks the derivative and pointwise growth bounds along `f^(n) = f_{n-1} o ... o f_0`.
///
/// The composition is tracked as `H_n(x) = f^(n)(diag(e^{n lambda}) x)`,
/// truncated at degree `d`, which keeps every coefficient of order one; the
/// truncation is exact for the jet since every `f_j` fixes the origin.
pub fn growth_check(seq: &CocycleSequence, opts: &GrowthOptions) -> Result<GrowthReport> {
    let eps = opts.eps;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if seq.len() < 2 {
        return Err(Error::EmptySeries);
    }
    let ws = seq.spec();
    ws.require_negative()?;
    let dim = ws.dim();
    let n_steps = seq.len();
    let d = max_degree(ws, ws, Zero::zero())?.max(1);
    let lambda = ws.to_f64();
    let top = ratio_to_f64(ws.max());
    let flag = flag_of(ws);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    // Pure tensors per degree: basis multisets, then random unit factors.
    let mut tensors: Vec<Vec<Tensor>> = Vec::new();
    for k in 1..=d {
        let mut list = Vec::new();
        let mut idx = vec![0usize; k as usize];
        loop {
            let factors: Vec<Vec<f64>> = idx
                .iter()
                .map(|&c| (0..dim).map(|r| (r == c) as u8 as f64).collect())
                .collect();
            list.push(Tensor {
                factors,
                weights: idx.iter().map(|&c| lambda[c]).collect(),
            });
            // Next nondecreasing index tuple.
            let mut p = k as usize;
            while p > 0 && idx[p - 1] == dim - 1 {
                p -= 1;
            }
            if p == 0 {
                break;
            }
            idx[p - 1] += 1;
            let v = idx[p - 1];
            for x in idx.iter_mut().skip(p) {
                *x = v;
            }
        }
        for _ in 0..opts.tensor_samples {
            list.push(Tensor {
                factors: (0..k).map(|_| random_unit(dim, dim, &mut rng)).collect(),
                weights: vec![top; k as usize],
            });
        }
        tensors.push(list);
    }

    // Points in the unit ball, with their weight.
    let mut points: Vec<(Vec<f64>, f64)> = Vec::new();
    for level in &flag.levels {
        for _ in 0..opts.point_samples {
            let r: f64 = rng.random_range(0.1..=1.0);
            let v = random_unit(dim, level.prefix_len, &mut rng);
            points.push((v.into_iter().map(|x| x * r).collect(), ratio_to_f64(level.weight)));
        }
    }

    let half = n_steps / 2;
    let mut deg_max = vec![0.0f64; d as usize];
    let mut deg_max_half = vec![0.0f64; d as usize];
    let mut up_max = 0.0f64;
    let mut up_max_half = 0.0f64;
    let mut low_max = 0.0f64;
    let mut low_max_half = 0.0f64;
    let mut point_constants = vec![0.0f64; points.len()];

    let tol = Tolerances {
        drop: 0.0,
        ..Tolerances::default()
    };
    let mut h = PolyMap::identity(ws);
    for n in 0..=n_steps {
        let nf = n as f64;
        for k in 1..=d {
            let polar = polarize(&h, k);
            let decay = (-3.0 * k as f64 * eps * nf).exp();
            let mut worst = 0.0f64;
            for t in &tensors[k as usize - 1] {
                let scaled: Vec<Vec<f64>> = t
                    .factors
                    .iter()
                    .zip(&t.weights)
                    .map(|(v, w)| v.iter().zip(&lambda).map(|(x, l)| x * (nf * (l - w)).exp()).collect())
                    .collect();
                let val = contract(&polar, dim, dim, &scaled);
                worst = worst.max(norm(&val) * decay);
            }
            deg_max[k as usize - 1] = deg_max[k as usize - 1].max(worst);
            if n <= half {
                deg_max_half[k as usize - 1] = deg_max[k as usize - 1];
            }
        }
        for (p, (x, w)) in points.iter().enumerate() {
            let xt: Vec<f64> = x.iter().zip(&lambda).map(|(x, l)| x * (nf * (l - w)).exp()).collect();
            let mut val = vec![0.0; dim];
            for (j, alpha, c) in h.terms() {
                let deg = alpha.degree() as f64;
                val[j] += c * alpha.eval(&xt) * (nf * w * (deg - 1.0)).exp();
            }
            let r = norm(&val) / norm(x);
            let up = r * (-eps * nf).exp();
            point_constants[p] = point_constants[p].max(up);
            up_max = up_max.max(up);
            low_max = low_max.max((-eps * nf).exp() / r);
        }
        if n <= half {
            up_max_half = up_max;
            low_max_half = low_max;
        }
        if n < n_steps {
            let inner = rescale(&h, &lambda)?;
            h = compose_truncated(&seq.map(n), &inner, d, &tol)?;
        }
    }

    // Hypotheses on the data.
    let mut level_bound_violation = 0.0f64;
    let mut lower_hypothesis = true;
    let mut c_p = 0.0f64;
    for (j, f) in seq.maps().enumerate() {
        let a = f.linear_part();
        let mut lo = 0;
        for level in &flag.levels {
            let lw = ratio_to_f64(level.weight);
            let p = level.prefix_len;
            let op = a.columns(0, p).into_owned().singular_values().max();
            level_bound_violation = level_bound_violation.max(op / (lw + eps).exp() - 1.0);
            let block: DMatrix<f64> = a.view((lo, lo), (p - lo, p - lo)).into_owned();
            if block.singular_values().min() < (lw - eps).exp() * (1.0 - 1e-12) {
                lower_hypothesis = false;
            }
            lo = p;
        }
        c_p = c_p.max(poly_norm(&f) * (-eps * j as f64).exp());
    }

    let s = opts.stability_ratio;
    Ok(GrowthReport {
        eps,
        steps: n_steps,
        d,
        degrees: (1..=d)
            .map(|k| DegreeBound {
                k,
                bound: BoundReport::new(deg_max[k as usize - 1], deg_max_half[k as usize - 1], s),
            })
            .collect(),
        upper: BoundReport::new(up_max, up_max_half, s),
        lower: BoundReport::new(low_max, low_max_half, s),
        point_constants,
        level_bound_violation: level_bound_violation.max(0.0),
        lower_hypothesis,
        c_p,
        eps_condition: eps < -top / (10.0 * d as f64),
    })
}
