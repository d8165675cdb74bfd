//! JSON input and output documents.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use usd_core::concentration::SchmidtState;
use usd_core::ensemble::{PureState, StateEnsemble};
use usd_core::{ComplexMatrix, Error, Result};

/// Accepted slack on the prior sum before renormalizing.
pub const PRIOR_SUM_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexNumber {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexNumber {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexNumber> for Complex64 {
    fn from(z: ComplexNumber) -> Self {
        Complex64::new(z.re, z.im)
    }
}

pub fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<ComplexNumber>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&z| z.into()).collect()).collect()
}

/// `{"states": [[{re, im}, ...], ...], "priors": [...]}`. Priors default to
/// uniform; `cond_probs` optionally fixes the measurement used by `measure`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub states: Vec<Vec<ComplexNumber>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cond_probs: Option<Vec<f64>>,
}

impl EnsembleFile {
    /// States are normalized; priors must sum to 1 within [`PRIOR_SUM_SLACK`].
    pub fn to_ensemble(&self) -> Result<StateEnsemble> {
        if self.states.is_empty() {
            return Err(Error::InvalidInput("ensemble has no states".into()));
        }
        let dim = self.states[0].len();
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(j, amps)| {
                if amps.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: amps.len() });
                }
                PureState::normalize(amps.iter().map(|&z| z.into()).collect())
                    .map_err(|e| Error::InvalidInput(format!("state {j}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match &self.priors {
            None => StateEnsemble::uniform(states),
            Some(priors) => {
                if priors.len() != states.len() {
                    return Err(Error::DimensionMismatch { expected: states.len(), found: priors.len() });
                }
                if priors.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(Error::InvalidInput("priors must be finite and non-negative".into()));
                }
                let total: f64 = priors.iter().sum();
                if (total - 1.0).abs() > PRIOR_SUM_SLACK {
                    return Err(Error::InvalidInput(format!("priors sum to {total}, expected 1")));
                }
                StateEnsemble::new(states, priors.iter().map(|p| p / total).collect())
            }
        }
    }
}

/// `{"coeffs": [{re, im}, ...]}`, normalized on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtFile {
    pub coeffs: Vec<ComplexNumber>,
}

impl SchmidtFile {
    pub fn to_schmidt(&self) -> Result<SchmidtState> {
        SchmidtState::normalize(self.coeffs.iter().map(|&z| z.into()).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub error: ErrorBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub n: usize,
    pub dim: usize,
    pub independent: bool,
    pub smallest_gram_eigenvalue: f64,
    pub largest_gram_eigenvalue: f64,
    pub gram_eigenvalues: Vec<f64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    #[serde(flatten)]
    pub simulation: usd_core::simulator::SimulationReport,
    pub cond_probs: Vec<f64>,
    #[serde(rename = "P_D")]
    pub discrimination_prob: f64,
    pub completeness_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureReport {
    pub probability: f64,
    pub schmidt_weights: Vec<f64>,
    pub branch_weights: Vec<f64>,
    pub schmidt_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrateReport {
    #[serde(rename = "P_C")]
    pub success_prob: f64,
    pub seed: u64,
    pub success_schmidt_coeffs: Vec<ComplexNumber>,
    pub orthogonalisation_op: Vec<Vec<ComplexNumber>>,
    pub failure: FailureReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<usd_core::simulator::SimulationReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    #[serde(rename = "P_I")]
    pub inconclusive: f64,
    #[serde(rename = "P_E")]
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub overlap: f64,
    #[serde(rename = "P_IDP")]
    pub idp: f64,
    #[serde(rename = "Helstrom")]
    pub helstrom: f64,
    pub tradeoff: Vec<TradeoffPoint>,
}
