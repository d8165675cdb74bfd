//! Command-line front end. Every command reads one JSON file and writes one
//! JSON document to stdout.
//!
//! Exit codes: 0 success, 1 when the input is valid JSON but describes a
//! dependent, infeasible or otherwise unusable problem, 2 when the input
//! cannot be read or parsed.

pub mod schema;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use usd_core::concentration::apply_concentration;
use usd_core::ensemble::{StateEnsemble, DEFAULT_INDEPENDENCE_TOL};
use usd_core::measurement::build_measurement;
use usd_core::optimizer::{
    equal_p_solution, error_tradeoff, grid_oracle, helstrom_bound, idp_bound, jaeger_shimony,
    optimize_with_reciprocals, GRID_MAX_STATES,
};
use usd_core::simulator::{simulate, simulate_concentration};
use usd_core::Error;

use schema::*;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SHOTS: u64 = 100_000;
const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "usd", version, about = "Unambiguous state discrimination and entanglement concentration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gram spectrum and linear-independence verdict (exit 1 when dependent).
    Check {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_INDEPENDENCE_TOL)]
        tol: f64,
    },
    /// Optimal conditional discrimination probabilities.
    Optimize(OptimizeArgs),
    /// Simulate the optimal measurement (or the one fixed by `cond_probs` in the input).
    Measure {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SHOTS)]
        shots: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Worker threads for sharded sampling; results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_INDEPENDENCE_TOL)]
        tol: f64,
    },
    /// Local concentration of a Schmidt state to a maximally entangled one.
    Concentrate {
        input: PathBuf,
        /// Also simulate this many filter runs.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Two-state reference values and the error/inconclusive tradeoff curve.
    Bounds {
        input: PathBuf,
        #[arg(long, default_value_t = 11)]
        tradeoff_samples: usize,
    },
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    pub input: PathBuf,
    /// Best measurement with all conditional probabilities equal.
    #[arg(long, conflicts_with = "oracle")]
    pub equal_p: bool,
    /// Exhaustive grid search (at most 4 states).
    #[arg(long)]
    pub oracle: bool,
    /// Grid spacing for `--oracle`; defaults to 1e-3, or 2e-2 for four states.
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_INDEPENDENCE_TOL)]
    pub tol: f64,
}

/// Exit code and the document to print.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub output: Value,
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Parse(String),
    Core(Error),
    /// Report produced, but the verdict is negative.
    Rejected(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn error_value(kind: &str, detail: String) -> Value {
    serde_json::to_value(ErrorReport { error: ErrorBody { kind: kind.to_string(), detail } }).expect("plain struct")
}

/// Malformed input is a parse-class failure; everything else the library
/// rejects is a property of a well-formed problem.
fn core_exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::DimensionMismatch { .. } => 2,
        _ => 1,
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Check { input, tol } => check(input, *tol),
        Command::Optimize(args) => optimize(args),
        Command::Measure { input, shots, seed, threads, tol } => measure(input, *shots, *seed, *threads, *tol),
        Command::Concentrate { input, shots, seed } => concentrate(input, *shots, *seed),
        Command::Bounds { input, tradeoff_samples } => bounds(input, *tradeoff_samples),
    };
    match result {
        Ok(v) => Outcome { code: 0, output: round_numbers(v) },
        Err(Failure::Rejected(v)) => Outcome { code: 1, output: round_numbers(v) },
        Err(Failure::Io(detail)) => Outcome { code: 2, output: error_value("io", detail) },
        Err(Failure::Parse(detail)) => Outcome { code: 2, output: error_value("parse", detail) },
        Err(Failure::Core(e)) => Outcome { code: core_exit_code(&e), output: error_value(e.kind(), e.to_string()) },
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(report: &T) -> Value {
    serde_json::to_value(report).expect("reports contain only finite numbers and strings")
}

fn load_ensemble(path: &Path) -> Result<(EnsembleFile, StateEnsemble), Failure> {
    let file: EnsembleFile = read_json(path)?;
    let ensemble = file.to_ensemble()?;
    Ok((file, ensemble))
}

fn validate_tol(tol: f64) -> Result<(), Failure> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain(format!("tolerance {tol} outside (0, 1)")).into());
    }
    Ok(())
}

fn check(input: &Path, tol: f64) -> Result<Value, Failure> {
    validate_tol(tol)?;
    let (_, ensemble) = load_ensemble(input)?;
    let r = ensemble.check_independence(tol);
    let report = to_value(&CheckReport {
        n: ensemble.n(),
        dim: ensemble.dim(),
        independent: r.independent,
        smallest_gram_eigenvalue: r.smallest_eigenvalue,
        largest_gram_eigenvalue: r.largest_eigenvalue,
        gram_eigenvalues: r.eigenvalues,
        tolerance: tol,
    });
    if r.independent {
        Ok(report)
    } else {
        Err(Failure::Rejected(report))
    }
}

fn optimize(args: &OptimizeArgs) -> Result<Value, Failure> {
    validate_tol(args.tol)?;
    let (_, ensemble) = load_ensemble(&args.input)?;
    let recip = ensemble.reciprocal_states_with_tol(args.tol)?;
    let result = if args.oracle {
        let default = if ensemble.n() >= GRID_MAX_STATES { 2e-2 } else { 1e-3 };
        grid_oracle(&ensemble, args.resolution.unwrap_or(default))?
    } else if args.equal_p {
        equal_p_solution(&recip)?
    } else if ensemble.n() == 2 {
        jaeger_shimony(&ensemble)?
    } else {
        optimize_with_reciprocals(&ensemble, &recip)?
    };
    Ok(to_value(&result))
}

fn measure(input: &Path, shots: u64, seed: u64, threads: Option<usize>, tol: f64) -> Result<Value, Failure> {
    validate_tol(tol)?;
    let (file, ensemble) = load_ensemble(input)?;
    let recip = ensemble.reciprocal_states_with_tol(tol)?;
    let cond_probs = match file.cond_probs {
        Some(p) => p,
        None if ensemble.n() == 2 => jaeger_shimony(&ensemble)?.cond_probs,
        None => optimize_with_reciprocals(&ensemble, &recip)?.cond_probs,
    };
    let m = build_measurement(&ensemble, &recip, &cond_probs)?;
    let simulation = with_threads(threads, || simulate(&m, &ensemble, shots, seed))??;
    let discrimination_prob = cond_probs.iter().zip(ensemble.priors()).map(|(p, e)| p * e).sum();
    Ok(to_value(&MeasureReport {
        simulation,
        cond_probs,
        discrimination_prob,
        completeness_residual: m.completeness_residual(),
    }))
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::Domain("--threads must be at least 1".into()).into()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Failure::Io(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    if threads.is_some_and(|t| t > 1) {
        eprintln!("usd: built without the `parallel` feature; --threads ignored");
    }
    Ok(f())
}

fn concentrate(input: &Path, shots: Option<u64>, seed: u64) -> Result<Value, Failure> {
    let file: SchmidtFile = read_json(input)?;
    let s = file.to_schmidt()?;
    let r = apply_concentration(&s)?;
    let simulation = shots.map(|n| simulate_concentration(&s, n, seed)).transpose()?;
    Ok(to_value(&ConcentrateReport {
        success_prob: r.success_prob,
        seed,
        success_schmidt_coeffs: r.success_state.coeffs().iter().map(|&z| z.into()).collect(),
        orthogonalisation_op: matrix_rows(&r.orthogonalisation_op),
        failure: FailureReport {
            probability: r.failure_prob,
            schmidt_weights: r.failure_state.schmidt_weights,
            branch_weights: r.failure_state.branch_weights,
            schmidt_rank: r.failure_state.schmidt_rank,
        },
        simulation,
    }))
}

fn bounds(input: &Path, samples: usize) -> Result<Value, Failure> {
    let (_, ensemble) = load_ensemble(input)?;
    let overlap = idp_bound(&ensemble)?;
    let helstrom = helstrom_bound(overlap)?;
    let tradeoff = match samples {
        0 => Vec::new(),
        1 => vec![TradeoffPoint { inconclusive: 0.0, error: helstrom }],
        k => (0..k)
            .map(|i| {
                // Last sample pinned to the overlap itself, where P_E vanishes.
                let pi = if i == k - 1 { overlap } else { overlap * i as f64 / (k - 1) as f64 };
                Ok(TradeoffPoint { inconclusive: pi, error: error_tradeoff(pi, overlap)? })
            })
            .collect::<Result<Vec<_>, Error>>()?,
    };
    Ok(to_value(&BoundsReport { overlap, idp: overlap, helstrom, tradeoff }))
}

/// Rounds every floating-point number to 12 significant digits.
pub fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float");
            serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_numbers).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_numbers(v))).collect()),
        other => other,
    }
}
