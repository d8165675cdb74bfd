//! Seeded Monte-Carlo sampling of preparation followed by measurement.
//!
//! Shots are split into fixed-size shards; shard `s` draws from
//! `substream(seed, s)` and the tallies are summed. The shard size does not
//! depend on the thread count, so a report is a function of
//! `(inputs, shots, seed)` only.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::concentration::{concentration_probability, SchmidtState};
use crate::ensemble::StateEnsemble;
use crate::error::{Error, Result};
use crate::measurement::{outcome_distribution, UsdMeasurement};
use crate::par::{map_indexed, substream, Execution, GENERATOR};

pub const SHARD_SHOTS: u64 = 1 << 14;
/// Outcome probabilities below this are sampled as exactly zero.
pub const PROBABILITY_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub shots: u64,
    pub seed: u64,
    pub generator: String,
    /// `tallies[j][k]`: prepared `j`, outcome `k`; the last column is the
    /// inconclusive (or, for concentration, failure) outcome.
    pub tallies: Vec<Vec<u64>>,
    pub error_count: u64,
    #[serde(rename = "empirical_P_D")]
    pub empirical_p_d: f64,
    pub inconclusive_rate: f64,
}

impl SimulationReport {
    fn from_tallies(shots: u64, seed: u64, tallies: Vec<Vec<u64>>) -> Self {
        let mut correct = 0;
        let mut inconclusive = 0;
        let mut error_count = 0;
        for (j, row) in tallies.iter().enumerate() {
            let last = row.len() - 1;
            for (k, &count) in row.iter().enumerate() {
                if k == last {
                    inconclusive += count;
                } else if k == j {
                    correct += count;
                } else {
                    error_count += count;
                }
            }
        }
        Self {
            shots,
            seed,
            generator: GENERATOR.to_string(),
            tallies,
            error_count,
            empirical_p_d: correct as f64 / shots as f64,
            inconclusive_rate: inconclusive as f64 / shots as f64,
        }
    }

    pub fn total(&self) -> u64 {
        self.tallies.iter().flatten().sum()
    }
}

/// Row probabilities with values below the floor set to zero and the rest renormalized.
fn sampling_row(row: &[f64]) -> Vec<f64> {
    let clamped: Vec<f64> = row.iter().map(|&p| if p < PROBABILITY_FLOOR { 0.0 } else { p }).collect();
    let total: f64 = clamped.iter().sum();
    clamped.into_iter().map(|p| p / total).collect()
}

fn shard_sizes(shots: u64) -> Vec<u64> {
    let full = shots / SHARD_SHOTS;
    let rest = shots % SHARD_SHOTS;
    let mut sizes = vec![SHARD_SHOTS; full as usize];
    if rest > 0 {
        sizes.push(rest);
    }
    sizes
}

fn merge(parts: Vec<Vec<Vec<u64>>>, rows: usize, cols: usize) -> Vec<Vec<u64>> {
    let mut total = vec![vec![0u64; cols]; rows];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part) {
            for (a, b) in t.iter_mut().zip(p) {
                *a += b;
            }
        }
    }
    total
}

pub fn simulate(m: &UsdMeasurement, ensemble: &StateEnsemble, shots: u64, seed: u64) -> Result<SimulationReport> {
    simulate_with(m, ensemble, shots, seed, Execution::default())
}

pub fn simulate_with(
    m: &UsdMeasurement,
    ensemble: &StateEnsemble,
    shots: u64,
    seed: u64,
    exec: Execution,
) -> Result<SimulationReport> {
    if shots == 0 {
        return Err(Error::Domain("shots must be at least 1".into()));
    }
    let dist = outcome_distribution(m, ensemble)?;
    let n = ensemble.n();
    let prepare = WeightedIndex::new(ensemble.priors())
        .map_err(|e| Error::InvalidInput(format!("priors cannot be sampled: {e}")))?;
    let outcomes = dist
        .rows
        .iter()
        .map(|row| {
            WeightedIndex::new(sampling_row(row))
                .map_err(|e| Error::InvalidInput(format!("outcome row cannot be sampled: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;

    let sizes = shard_sizes(shots);
    let parts = map_indexed(exec, sizes.len(), |s| {
        let mut rng = substream(seed, s as u64);
        let mut tally = vec![vec![0u64; n + 1]; n];
        for _ in 0..sizes[s] {
            let j = prepare.sample(&mut rng);
            let k = outcomes[j].sample(&mut rng);
            tally[j][k] += 1;
        }
        tally
    });
    Ok(SimulationReport::from_tallies(shots, seed, merge(parts, n, n + 1)))
}

/// Bernoulli trials at rate `P_C`; one row `[successes, failures]`.
pub fn simulate_concentration(s: &SchmidtState, shots: u64, seed: u64) -> Result<SimulationReport> {
    simulate_concentration_with(s, shots, seed, Execution::default())
}

pub fn simulate_concentration_with(
    s: &SchmidtState,
    shots: u64,
    seed: u64,
    exec: Execution,
) -> Result<SimulationReport> {
    if shots == 0 {
        return Err(Error::Domain("shots must be at least 1".into()));
    }
    let p = concentration_probability(s);
    let sizes = shard_sizes(shots);
    let parts = map_indexed(exec, sizes.len(), |k| {
        let mut rng = substream(seed, k as u64);
        let successes = (0..sizes[k]).filter(|_| rng.random::<f64>() < p).count() as u64;
        vec![vec![successes, sizes[k] - successes]]
    });
    Ok(SimulationReport::from_tallies(shots, seed, merge(parts, 1, 2)))
}
