//! Command-line front end for the `subres` binary.
//!
//! Every command writes one JSON document (to stdout or `--out`). Exit codes:
//! 0 on success, 1 on invalid input, 2 when a check ran and failed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::json;

use crate::cocycle::{
    check_metric, constant_instance, equivariance_transport, forward_regularity, generate_sequence, growth_check,
    inject_term, lyapunov_metric, lyapunov_weight, qr_history, triangular_merge, GrowthOptions, LyapunovSpectrum,
    Mode, Verdict,
};
use crate::error::{Error, Result};
use crate::linearizer::{embed, golden, linearize, monomial_basis};
use crate::srpoly::{classify, compose_with, invert_with, translate, PolyMap};
use crate::tempered::{exp_growth_check, log_c_epsilon, temper_rate, OrbitSeries};
use crate::tolerance::Tolerances;
use crate::weighted_algebra::WeightSpec;

#[derive(Debug, Parser)]
#[command(name = "subres", version, about = "Subresonant polynomial maps, their linearization, and cocycle diagnostics")]
pub struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weight of a polynomial map and its class (strictly subresonant, star, subresonant or not).
    Classify {
        #[arg(long)]
        poly: PathBuf,
    },
    /// Composition g o f of polynomial maps; weights are subadditive under composition.
    Compose {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        f: PathBuf,
    },
    /// Inverse of a subresonant map with invertible linear part; the inverse is again subresonant.
    Invert {
        #[arg(long)]
        poly: PathBuf,
    },
    /// The translated map x -> f(x + v); translation preserves subresonance.
    Translate {
        #[arg(long)]
        poly: PathBuf,
        /// JSON array of coordinates.
        #[arg(long)]
        v: String,
    },
    /// Matrix of the linearization Lf on the monomial basis (functorial, block triangular).
    Linearize {
        #[arg(long)]
        poly: PathBuf,
        /// Compare against the closed-form 7x7 matrix for the general subresonant map on weights (-3,-2,-1).
        #[arg(long = "golden-334")]
        golden_334: bool,
    },
    /// Embedding of a vector into the monomial coordinates; projection recovers it.
    Embed {
        #[arg(long, value_parser = parse_spec)]
        spec: WeightSpec,
        #[arg(long)]
        v: String,
    },
    /// Generate a sequence from one of the built-in models.
    CocycleSim(SimArgs),
    /// Lyapunov weights of basis vectors, QR exponent estimates and forwards regularity.
    Lyapunov {
        #[command(flatten)]
        sim: SimArgs,
        /// Per-step QR estimates as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// One-sided Lyapunov metric: contraction from the first step and comparison with the norm.
    Metric {
        #[command(flatten)]
        sim: SimArgs,
        /// Slack of the metric (defaults to --eps).
        #[arg(long)]
        metric_eps: Option<f64>,
        #[arg(long, default_value_t = 4)]
        samples: usize,
    },
    /// Exponents of a block upper triangular cocycle are the union of the block exponents.
    Merge(MergeArgs),
    /// Growth bounds for derivatives and orbits of a sequence of subresonant maps.
    GrowthCheck {
        #[command(flatten)]
        sim: SimArgs,
        /// Independent runs with seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Add a super-resonant term; the check is then expected to diverge.
        #[arg(long)]
        control: bool,
    },
    /// Push h0 along the sequences: h_n = f^(n) o h0 o (g^(n))^-1. Equivariance forces subresonance.
    Transport {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        h0: PathBuf,
        /// Seed of the g sequence (defaults to --seed, i.e. g = f).
        #[arg(long)]
        g_seed: Option<u64>,
    },
    /// Temperedness of a scalar series: C_eps, growth rate and the M^n criterion.
    Tempered {
        /// CSV file with a `phi` column.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long = "M", default_value_t = 2.0)]
        m: f64,
    },
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Weights as a JSON array, a JSON object or a path to either.
    #[arg(long, value_parser = parse_spec)]
    pub spec: WeightSpec,
    #[arg(long, default_value = "diagonal_model")]
    pub mode: Mode,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    /// Upper block weights; without it the 1x1 constant instance is used.
    #[arg(long, value_parser = parse_spec, requires = "spec_b")]
    pub spec_a: Option<WeightSpec>,
    #[arg(long, value_parser = parse_spec)]
    pub spec_b: Option<WeightSpec>,
    #[arg(long, default_value = "diagonal_model")]
    pub mode: Mode,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    /// Constant instance: A_n = e^lambda.
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    pub lambda: i64,
    /// Constant instance: B_n = e^eta.
    #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
    pub eta: i64,
    /// Size of the coupling U_n.
    #[arg(long, default_value_t = 1.0)]
    pub u: f64,
}

fn parse_spec(s: &str) -> std::result::Result<WeightSpec, String> {
    let t = s.trim_start();
    let text = if t.starts_with('[') || t.starts_with('{') {
        s.to_string()
    } else {
        fs::read_to_string(s).map_err(|e| format!("{s}: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn read_poly(path: &Path) -> Result<PolyMap> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse_vector(s: &str) -> Result<Vec<f64>> {
    serde_json::from_str(s).map_err(|e| Error::Parse(format!("--v: {e}")))
}

fn check_sim(sim: &SimArgs) -> Result<()> {
    if !(sim.eps >= 0.0 && sim.eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("--eps must be >= 0, got {}", sim.eps)));
    }
    if sim.steps == 0 {
        return Err(Error::InvalidParameter("--steps must be positive".into()));
    }
    Ok(())
}

/// Output of one command: the JSON document and whether its checks passed.
struct Outcome {
    value: serde_json::Value,
    passed: bool,
}

impl Outcome {
    fn ok<T: Serialize>(v: &T) -> Result<Self> {
        Self::check(v, true)
    }

    fn check<T: Serialize>(v: &T, passed: bool) -> Result<Self> {
        let value = serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Self { value, passed })
    }
}

fn dispatch(cmd: &Command, tol: &Tolerances) -> Result<Outcome> {
    match cmd {
        Command::Classify { poly } => Outcome::ok(&classify(&read_poly(poly)?)),
        Command::Compose { g, f } => Outcome::ok(&compose_with(&read_poly(g)?, &read_poly(f)?, tol)?),
        Command::Invert { poly } => Outcome::ok(&invert_with(&read_poly(poly)?, tol)?),
        Command::Translate { poly, v } => Outcome::ok(&translate(&read_poly(poly)?, &parse_vector(v)?)?),
        Command::Linearize { poly, golden_334 } => {
            let f = read_poly(poly)?;
            if *golden_334 {
                let report = golden::check(&f, 1e-12)?;
                Outcome::check(&report, report.passed)
            } else {
                Outcome::ok(&linearize(&f)?)
            }
        }
        Command::Embed { spec, v } => {
            let basis = monomial_basis(spec)?;
            let xi = embed(&basis, &parse_vector(v)?)?;
            let entries: Vec<&[u32]> = basis.entries().iter().map(|a| a.0.as_slice()).collect();
            Outcome::ok(&json!({ "basis": entries, "vector": xi.as_slice() }))
        }
        Command::CocycleSim(sim) => {
            check_sim(sim)?;
            Outcome::ok(&generate_sequence(&sim.spec, sim.mode, sim.eps, sim.seed, sim.steps)?)
        }
        Command::Lyapunov { sim, csv } => {
            check_sim(sim)?;
            let seq = generate_sequence(&sim.spec, sim.mode, sim.eps, sim.seed, sim.steps)?;
            let (exponents, history) = qr_history(seq.matrices())?;
            if let Some(path) = csv {
                write_history(path, &history)?;
            }
            let d = sim.spec.dim();
            let weights = (0..d)
                .map(|i| {
                    let mut v = vec![0.0; d];
                    v[i] = 1.0;
                    lyapunov_weight(&seq, &v).map(|e| e.rate)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut spectrum = LyapunovSpectrum::from_estimates(&exponents, 2.0 * sim.eps + 0.05);
            spectrum.regularity_defect = Some(forward_regularity(&seq, &LyapunovSpectrum::from_spec(&sim.spec))?);
            Outcome::ok(&json!({
                "spec": sim.spec,
                "steps": sim.steps,
                "exponents": exponents,
                "basis_weights": weights,
                "spectrum": spectrum,
            }))
        }
        Command::Metric {
            sim,
            metric_eps,
            samples,
        } => {
            check_sim(sim)?;
            let seq = generate_sequence(&sim.spec, sim.mode, sim.eps, sim.seed, sim.steps)?;
            let metric = lyapunov_metric(&seq, metric_eps.unwrap_or(sim.eps))?;
            let report = check_metric(&seq, &metric, *samples, sim.seed)?;
            Outcome::check(&report, report.passed(1e-9))
        }
        Command::Merge(m) => {
            let (a, b, u) = match (&m.spec_a, &m.spec_b) {
                (Some(sa), Some(sb)) => {
                    let a = generate_sequence(sa, m.mode, m.eps, m.seed, m.steps)?;
                    let b = generate_sequence(sb, m.mode, m.eps, m.seed.wrapping_add(1), m.steps)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(m.seed.wrapping_add(2));
                    let u = (0..m.steps)
                        .map(|_| DMatrix::from_fn(sa.dim(), sb.dim(), |_, _| m.u * Distribution::<f64>::sample(&StandardNormal, &mut rng)))
                        .collect();
                    (a, b, u)
                }
                _ => constant_instance(m.lambda, m.eta, m.u, m.steps)?,
            };
            let report = triangular_merge(&a, &b, &u)?;
            Outcome::ok(&report)
        }
        Command::GrowthCheck { sim, trials, control } => {
            check_sim(sim)?;
            let mut reports = Vec::new();
            let mut passed = true;
            for t in 0..*trials {
                let seed = sim.seed.wrapping_add(t);
                let mut seq = generate_sequence(&sim.spec, sim.mode, sim.eps, seed, sim.steps)?;
                if *control {
                    let j = sim.spec.dim() - 1;
                    let mut alpha = vec![0; sim.spec.dim()];
                    alpha[j] = 2;
                    seq = inject_term(&seq, j, &alpha, 1.0)?;
                }
                let r = growth_check(&seq, &GrowthOptions::new(sim.eps, seed))?;
                let diverging = r.degrees.iter().any(|d| d.bound.verdict == Verdict::Diverging);
                passed &= if *control { diverging } else { r.all_finite() };
                reports.push(json!({ "seed": seed, "report": r }));
            }
            Outcome::check(&json!({ "control": control, "trials": reports }), passed)
        }
        Command::Transport { sim, h0, g_seed } => {
            check_sim(sim)?;
            let f = generate_sequence(&sim.spec, sim.mode, sim.eps, sim.seed, sim.steps)?;
            let g = match g_seed {
                Some(s) if *s != sim.seed => generate_sequence(&sim.spec, sim.mode, sim.eps, *s, sim.steps)?,
                _ => f.clone(),
            };
            Outcome::ok(&equivariance_transport(&f, &g, &read_poly(h0)?, sim.steps)?)
        }
        Command::Tempered { input, eps, m } => {
            let s = OrbitSeries::from_csv(input)?;
            let log_c = log_c_epsilon(&s, *eps)?;
            let growth = exp_growth_check(&s, *m)?;
            Outcome::ok(&json!({
                "steps": s.len() - 1,
                "log_c_epsilon": log_c,
                "c_epsilon": log_c.exp(),
                "rate": temper_rate(&s)?,
                "exp_growth": growth,
            }))
        }
    }
}

fn write_history(path: &Path, history: &[Vec<f64>]) -> Result<()> {
    let io = |e: csv::Error| Error::Parse(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    let d = history.first().map_or(0, Vec::len);
    let mut header = vec!["n".to_string()];
    header.extend((1..=d).map(|i| format!("exponent_{i}")));
    w.write_record(&header).map_err(io)?;
    for (n, row) in history.iter().enumerate() {
        let mut rec = vec![(n + 1).to_string()];
        rec.extend(row.iter().map(|x| x.to_string()));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = Tolerances::from_env().and_then(|tol| dispatch(&cli.command, &tol));
    match result {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.value).expect("JSON values serialize");
            let written = match &cli.out {
                Some(p) => fs::write(p, text + "\n").map_err(|e| format!("{}: {e}", p.display())),
                None => match writeln!(std::io::stdout().lock(), "{text}") {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(format!("stdout: {e}")),
                    _ => Ok(()),
                },
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return 1;
            }
            if outcome.passed {
                0
            } else {
                eprintln!("check failed");
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Parses `std::env::args` and runs; clap usage errors exit with code 1.
pub fn main() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn spec_argument_forms() {
        assert_eq!(parse_spec("[-2,-1]").unwrap(), WeightSpec::from_ints(&[-2, -1]).unwrap());
        assert_eq!(
            parse_spec(r#"{"weights":["-3","-1"]}"#).unwrap(),
            WeightSpec::from_ints(&[-3, -1]).unwrap()
        );
        assert!(parse_spec("[-1,-2]").is_err());
        assert!(parse_spec("/nonexistent/spec.json").is_err());
    }

    #[test]
    fn parses_subcommands() {
        let cli = Cli::try_parse_from(["subres", "lyapunov", "--spec", "[-2,-1]", "--steps", "10", "--seed", "7"]).unwrap();
        assert!(matches!(cli.command, Command::Lyapunov { .. }));
        let cli = Cli::try_parse_from(["subres", "tempered", "--input", "s.csv", "--M", "3"]).unwrap();
        assert!(matches!(cli.command, Command::Tempered { m, .. } if m == 3.0));
        assert!(Cli::try_parse_from(["subres", "merge", "--lambda", "-1", "--eta", "-3"]).is_ok());
    }

    #[test]
    fn failed_check_exits_two() {
        let cli = Cli::try_parse_from([
            "subres", "growth-check", "--spec", "[-2,-1]", "--mode", "polynomial", "--eps", "0.04", "--steps", "60",
            "--out", "/dev/null",
        ])
        .unwrap();
        assert_eq!(run(&cli), 0);
        let cli = Cli::try_parse_from([
            "subres", "metric", "--spec", "[-2,-1]", "--eps", "0", "--steps", "20", "--out", "/dev/null",
        ])
        .unwrap();
        assert_eq!(run(&cli), 1);
    }
}
