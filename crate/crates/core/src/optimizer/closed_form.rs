use crate::ensemble::StateEnsemble;
use crate::error::{Error, Result};
use crate::measurement::probability_operator;

use super::{Method, OptimizationResult};

/// Optimal two-state measurement for arbitrary priors.
///
/// With `eta_+ >= eta_-` and overlap `o`: if `sqrt(eta_-/eta_+) >= o` the
/// optimum lies on `(1 - P_+)(1 - P_-) = o^2` with `P_I = 2 sqrt(eta_+ eta_-) o`;
/// otherwise only the likelier state is ever detected, `P_+ = 1 - o^2`,
/// `P_- = 0`, `P_I = eta_+ o^2 + eta_-`.
pub fn jaeger_shimony(ensemble: &StateEnsemble) -> Result<OptimizationResult> {
    if ensemble.n() != 2 {
        return Err(Error::WrongArity { expected: 2, found: ensemble.n() });
    }
    let overlap = ensemble.state(0).overlap(ensemble.state(1)).norm().min(1.0);
    let eta = ensemble.priors();
    let (hi, lo) = if eta[0] >= eta[1] { (0, 1) } else { (1, 0) };
    let (eta_hi, eta_lo) = (eta[hi], eta[lo]);

    let (p_hi, p_lo) = if overlap == 0.0 {
        (1.0, 1.0)
    } else if eta_lo > 0.0 && (eta_lo / eta_hi).sqrt() >= overlap {
        let r = (eta_lo / eta_hi).sqrt();
        (1.0 - overlap * r, (1.0 - overlap / r).max(0.0))
    } else {
        (1.0 - overlap * overlap, 0.0)
    };

    let mut cond_probs = vec![0.0; 2];
    cond_probs[hi] = p_hi;
    cond_probs[lo] = p_lo;

    let boundary_eigenvalue = match ensemble.reciprocal_states() {
        Ok(recip) => probability_operator(&recip, &cond_probs)?.max_eigenvalue,
        // Identical states: nothing can be detected.
        Err(_) => 0.0,
    };
    Ok(OptimizationResult::new(cond_probs, eta, boundary_eigenvalue, Method::TwoStateClosedForm))
}

/// Minimum inconclusive probability from the closed form, without building
/// the measurement.
pub fn jaeger_shimony_inconclusive(overlap: f64, eta_plus: f64, eta_minus: f64) -> f64 {
    let (hi, lo) = if eta_plus >= eta_minus { (eta_plus, eta_minus) } else { (eta_minus, eta_plus) };
    if lo > 0.0 && (lo / hi).sqrt() >= overlap {
        2.0 * (hi * lo).sqrt() * overlap
    } else {
        hi * overlap * overlap + lo
    }
}
