//! Single-copy entanglement concentration by a local filter on the second
//! subsystem.
//!
//! Rewriting `|phi> = sum_j c_j |alpha_j>|beta_j>` in the conjugate basis of
//! the first subsystem gives equal coefficients `n^{-1/2}` on the derived
//! states `|psi_k>` of the second. Mapping those onto an orthonormal set
//! with the equal-`P` discrimination measurement leaves a maximally
//! entangled state with probability `P_C = n min_j |c_j|^2`.
//!
//! Bipartite states are stored as coefficient matrices `C[j][m]` over
//! `|alpha_j>|beta_m>`; applying `I (x) A` maps `C` to `C A^T`.

use std::f64::consts::TAU;

use crate::ensemble::{StateEnsemble, UNIT_NORM_TOL};
use crate::error::{Error, Result};
use crate::measurement::{build_measurement, UsdMeasurement};
use crate::numcore::{hermitian_eig, ComplexMatrix, C64};

/// Coefficients with `|c_j|^2` below this are treated as zero.
const ZERO_WEIGHT: f64 = 1e-14;
/// Schmidt weights above this count towards the Schmidt rank.
const RANK_WEIGHT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtState {
    coeffs: Vec<C64>,
}

impl SchmidtState {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("Schmidt state needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("Schmidt coefficients must be finite".into()));
        }
        let total: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
        if (total - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidInput(format!("Schmidt weights sum to {total}, expected 1")));
        }
        if let Some(index) = coeffs.iter().position(|z| z.norm_sqr() < ZERO_WEIGHT) {
            return Err(Error::ZeroCoefficient { index });
        }
        Ok(Self { coeffs })
    }

    /// Rescales to unit norm first.
    pub fn normalize(coeffs: Vec<C64>) -> Result<Self> {
        let total: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidInput("Schmidt coefficients have zero or non-finite norm".into()));
        }
        Self::new(coeffs.into_iter().map(|z| z / total).collect())
    }

    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidInput("Schmidt weights must be non-negative".into()));
        }
        Self::new(weights.iter().map(|w| C64::new(w.sqrt(), 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    /// `|c_j|^2`
    pub fn weights(&self) -> Vec<f64> {
        self.coeffs.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Coefficient matrix `diag(c)`.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        let n = self.n();
        ComplexMatrix::from_fn(n, n, |j, m| if j == m { self.coeffs[j] } else { C64::new(0.0, 0.0) })
    }
}

/// `gamma_jk = n^{-1/2} exp(-2 pi i j k / n)`; column `k` is `|gamma_k>`.
pub fn conjugate_basis(n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |j, k| C64::from_polar(scale, -TAU * ((j * k) % n) as f64 / n as f64))
}

/// `|psi_k> = sum_j c_j exp(2 pi i j k / n) |beta_j>` with equal priors.
pub fn derived_states(s: &SchmidtState) -> Result<StateEnsemble> {
    let n = s.n();
    let states = (0..n)
        .map(|k| {
            let amps = s
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * C64::from_polar(1.0, TAU * ((j * k) % n) as f64 / n as f64))
                .collect();
            crate::ensemble::PureState::normalize(amps)
        })
        .collect::<Result<Vec<_>>>()?;
    StateEnsemble::uniform(states)
}

/// `n min_j |c_j|^2`
pub fn concentration_probability(s: &SchmidtState) -> f64 {
    let min = s.weights().into_iter().fold(f64::INFINITY, f64::min);
    (s.n() as f64 * min).min(1.0)
}

/// Equal-`P` measurement on the derived states at `P = P_C`.
fn concentration_measurement(s: &SchmidtState) -> Result<UsdMeasurement> {
    let ensemble = derived_states(s)?;
    let recip = ensemble.reciprocal_states()?;
    let p = concentration_probability(s);
    build_measurement(&ensemble, &recip, &vec![p; s.n()])
}

/// `A_O = sum_k A_k`
pub fn orthogonalisation_operator(s: &SchmidtState) -> Result<ComplexMatrix> {
    Ok(concentration_measurement(s)?.orthogonalisation_op())
}

/// State left behind when the filter fails.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureState {
    /// Normalized coefficient matrix; all zero when failure is impossible.
    pub coefficients: ComplexMatrix,
    /// Descending.
    pub schmidt_weights: Vec<f64>,
    /// Probability of each `|alpha_j>` given failure.
    pub branch_weights: Vec<f64>,
    pub schmidt_rank: usize,
}

impl FailureState {
    /// Largest amplitude `|C[j][m]|` in branch `j`.
    pub fn max_amplitude(&self, j: usize) -> f64 {
        self.coefficients.row(j).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct ConcentrationResult {
    pub orthogonalisation_op: ComplexMatrix,
    pub inconclusive_op: ComplexMatrix,
    pub success_prob: f64,
    /// Schmidt coefficients after success, descending and real.
    pub success_state: SchmidtState,
    pub failure_state: FailureState,
    pub failure_prob: f64,
    /// `|C A_O^T|^2 + |C A_I^T|^2`, which should be 1.
    pub total_probability: f64,
}

pub fn apply_concentration(s: &SchmidtState) -> Result<ConcentrationResult> {
    let m = concentration_measurement(s)?;
    let a_o = m.orthogonalisation_op();
    let a_i = m.inconclusive_op.clone();
    let c = s.coefficient_matrix();

    let success = &c * &a_o.transpose();
    let failure = &c * &a_i.transpose();
    let success_norm_sq = frobenius_sq(&success);
    let failure_norm_sq = frobenius_sq(&failure);

    let success_weights = schmidt_weights(&success.scale_real(1.0 / success_norm_sq.sqrt()))?;
    let success_state =
        SchmidtState::normalize(success_weights.iter().map(|w| C64::new(w.max(0.0).sqrt(), 0.0)).collect())?;

    let n = s.n();
    let failure_state = if failure_norm_sq > ZERO_WEIGHT {
        let coefficients = failure.scale_real(1.0 / failure_norm_sq.sqrt());
        let schmidt_weights = schmidt_weights(&coefficients)?;
        let branch_weights = (0..n).map(|j| coefficients.row(j).iter().map(|z| z.norm_sqr()).sum()).collect();
        let schmidt_rank = schmidt_weights.iter().filter(|&&w| w > RANK_WEIGHT).count();
        FailureState { coefficients, schmidt_weights, branch_weights, schmidt_rank }
    } else {
        FailureState {
            coefficients: ComplexMatrix::zeros(n, n),
            schmidt_weights: vec![0.0; n],
            branch_weights: vec![0.0; n],
            schmidt_rank: 0,
        }
    };

    let success_prob = concentration_probability(s);
    Ok(ConcentrationResult {
        orthogonalisation_op: a_o,
        inconclusive_op: a_i,
        success_prob,
        success_state,
        failure_state,
        failure_prob: 1.0 - success_prob,
        total_probability: success_norm_sq + failure_norm_sq,
    })
}

fn frobenius_sq(m: &ComplexMatrix) -> f64 {
    m.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Eigenvalues of `C^dagger C`, descending, clamped at zero.
fn schmidt_weights(c: &ComplexMatrix) -> Result<Vec<f64>> {
    let eig = hermitian_eig(&(&c.adjoint() * c))?;
    Ok(eig.values.iter().rev().map(|v| v.max(0.0)).collect())
}
