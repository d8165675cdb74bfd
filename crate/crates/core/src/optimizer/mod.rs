//! Maximizing the average discrimination probability `P_D = sum_j eta_j P_j`
//! over conditional probabilities `P_j`, subject to the largest eigenvalue
//! of the probability operator staying at most 1.
//!
//! The feasible set is convex and the objective linear. Closed forms exist
//! for two states and for the equal-`P` family; the general case is solved
//! by an interior-point method and checked against an exhaustive grid.

mod bounds;
mod closed_form;
mod embedding;
mod grid;
pub(crate) mod interior;

use serde::{Deserialize, Serialize};

use crate::ensemble::{ReciprocalSet, StateEnsemble};
use crate::error::Result;
use crate::numcore::hermitian_eig;

pub use bounds::{error_tradeoff, helstrom_bound, idp_bound};
pub use closed_form::{jaeger_shimony, jaeger_shimony_inconclusive};
pub use embedding::{
    embedded_lambda, embedded_optimum, embedding_no_gain_check, embedding_no_gain_check_with, Embedding,
    EmbeddingReport,
};
pub use grid::{grid_oracle, grid_oracle_with, GRID_MAX_STATES};

use interior::DualSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    TwoStateClosedForm,
    EqualP,
    GeneralIterative,
    GridOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub cond_probs: Vec<f64>,
    #[serde(rename = "P_D")]
    pub discrimination_prob: f64,
    #[serde(rename = "P_I")]
    pub inconclusive_prob: f64,
    pub boundary_eigenvalue: f64,
    pub method: Method,
}

impl OptimizationResult {
    pub(crate) fn new(cond_probs: Vec<f64>, priors: &[f64], boundary_eigenvalue: f64, method: Method) -> Self {
        let discrimination_prob: f64 = cond_probs.iter().zip(priors).map(|(p, e)| p * e).sum::<f64>().clamp(0.0, 1.0);
        Self {
            cond_probs,
            discrimination_prob,
            inconclusive_prob: 1.0 - discrimination_prob,
            boundary_eigenvalue,
            method,
        }
    }
}

/// Restricted problem in span coordinates.
pub(crate) fn dual_system(recip: &ReciprocalSet) -> DualSystem {
    DualSystem { vectors: recip.span_coordinates(), weights: recip.weights().to_vec() }
}

/// Best measurement with all `P_j` equal: `P = 1 / lambda_max(sum_j q_j |perp_j><perp_j|)`.
pub fn equal_p_solution(recip: &ReciprocalSet) -> Result<OptimizationResult> {
    let n = recip.n();
    let system = dual_system(recip);
    let lambda = hermitian_eig(&system.operator(&vec![1.0; n]))?.max();
    let p = (1.0 / lambda).min(1.0);
    let cond_probs = vec![p; n];
    let boundary_eigenvalue = system.max_eigenvalue(&cond_probs)?;
    // With equal P the priors drop out: P_D = P.
    Ok(OptimizationResult {
        cond_probs,
        discrimination_prob: p,
        inconclusive_prob: 1.0 - p,
        boundary_eigenvalue,
        method: Method::EqualP,
    })
}

/// Optimum for arbitrary states and priors.
pub fn optimize_general(ensemble: &StateEnsemble) -> Result<OptimizationResult> {
    let recip = ensemble.reciprocal_states()?;
    optimize_with_reciprocals(ensemble, &recip)
}

pub fn optimize_with_reciprocals(ensemble: &StateEnsemble, recip: &ReciprocalSet) -> Result<OptimizationResult> {
    let system = dual_system(recip);
    let sol = interior::maximize(&system, ensemble.priors())?;
    Ok(OptimizationResult::new(sol.cond_probs, ensemble.priors(), sol.max_eigenvalue, Method::GeneralIterative))
}

/// Closed form for two states, interior point otherwise.
pub fn optimize(ensemble: &StateEnsemble) -> Result<OptimizationResult> {
    if ensemble.n() == 2 {
        jaeger_shimony(ensemble)
    } else {
        optimize_general(ensemble)
    }
}
