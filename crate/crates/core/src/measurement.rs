//! Synthesis of the zero-error measurement operators from the reciprocal
//! states, and evaluation of outcome statistics.

use serde::{Deserialize, Serialize};

use crate::ensemble::{PureState, ReciprocalSet, StateEnsemble};
use crate::error::{Error, Result};
use crate::numcore::{hermitian_eig, inner, norm, numerical_rank, psd_sqrt_with_clamp, ComplexMatrix, C64};

/// Allowed excess of the largest eigenvalue of the probability operator over 1.
pub const FEASIBILITY_SLACK: f64 = 1e-9;
/// Default relative rank cut-off for the post-inconclusive states.
pub const POST_INCONCLUSIVE_RANK_TOL: f64 = 1e-8;

/// `Pi = sum_j q_j P_j |perp_j><perp_j|` and its largest eigenvalue.
#[derive(Debug, Clone)]
pub struct ProbabilityOperator {
    pub matrix: ComplexMatrix,
    pub max_eigenvalue: f64,
}

impl ProbabilityOperator {
    pub fn is_feasible(&self) -> bool {
        self.max_eigenvalue <= 1.0 + FEASIBILITY_SLACK
    }
}

fn check_probs(n: usize, cond_probs: &[f64]) -> Result<()> {
    if cond_probs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: cond_probs.len() });
    }
    if let Some(p) = cond_probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Domain(format!("conditional probability {p} outside [0, 1]")));
    }
    Ok(())
}

pub fn probability_operator(recip: &ReciprocalSet, cond_probs: &[f64]) -> Result<ProbabilityOperator> {
    check_probs(recip.n(), cond_probs)?;
    let mut matrix = ComplexMatrix::zeros(recip.dim(), recip.dim());
    for ((r, q), p) in recip.reciprocals().iter().zip(recip.weights()).zip(cond_probs) {
        if *p > 0.0 {
            matrix.add_projector(q * p, r.amplitudes());
        }
    }
    let max_eigenvalue = hermitian_eig(&matrix)?.max();
    Ok(ProbabilityOperator { matrix, max_eigenvalue })
}

/// Detection operators `A_k = sqrt(P_k)/s_k |phi_k><perp_k|` and the
/// inconclusive operator `A_I = (I - Pi)^{1/2}`.
#[derive(Debug, Clone)]
pub struct UsdMeasurement {
    pub detection_ops: Vec<ComplexMatrix>,
    pub inconclusive_op: ComplexMatrix,
    pub cond_probs: Vec<f64>,
    pub detection_basis: Vec<PureState>,
}

impl UsdMeasurement {
    pub fn n(&self) -> usize {
        self.detection_ops.len()
    }

    pub fn dim(&self) -> usize {
        self.inconclusive_op.rows()
    }

    /// `|A_I†A_I + sum_k A_k†A_k - I|_F`
    pub fn completeness_residual(&self) -> f64 {
        let mut total = &self.inconclusive_op.adjoint() * &self.inconclusive_op;
        for a in &self.detection_ops {
            total = &total + &(&a.adjoint() * a);
        }
        (&total - &ComplexMatrix::identity(self.dim())).frobenius_norm()
    }

    /// `sum_k A_k`, the map taking each `|psi_k>` to `sqrt(P_k) |phi_k>`.
    pub fn orthogonalisation_op(&self) -> ComplexMatrix {
        let mut total = ComplexMatrix::zeros(self.dim(), self.dim());
        for a in &self.detection_ops {
            total = &total + a;
        }
        total
    }
}

pub fn build_measurement(
    ensemble: &StateEnsemble,
    recip: &ReciprocalSet,
    cond_probs: &[f64],
) -> Result<UsdMeasurement> {
    if ensemble.n() != recip.n() || ensemble.dim() != recip.dim() {
        return Err(Error::DimensionMismatch { expected: recip.n(), found: ensemble.n() });
    }
    let pi = probability_operator(recip, cond_probs)?;
    if !pi.is_feasible() {
        return Err(Error::Infeasible { max_eigenvalue: pi.max_eigenvalue });
    }
    let d = recip.dim();
    let basis = recip.span_basis();
    let detection_basis: Vec<PureState> =
        (0..recip.n()).map(|k| PureState::new(basis.column(k)).expect("span basis columns are unit vectors")).collect();
    let detection_ops = (0..recip.n())
        .map(|k| {
            let amp = cond_probs[k].sqrt() / recip.overlaps()[k];
            ComplexMatrix::outer(detection_basis[k].amplitudes(), recip.reciprocal(k).amplitudes()).scale_real(amp)
        })
        .collect();
    let rest = &ComplexMatrix::identity(d) - &pi.matrix;
    let inconclusive_op = psd_sqrt_with_clamp(&rest, 2.0 * FEASIBILITY_SLACK)?;
    Ok(UsdMeasurement { detection_ops, inconclusive_op, cond_probs: cond_probs.to_vec(), detection_basis })
}

/// Row `j` holds `p_j(1..n)` followed by `p_j(inconclusive)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub rows: Vec<Vec<f64>>,
}

impl OutcomeDistribution {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn detection(&self, prepared: usize, outcome: usize) -> f64 {
        self.rows[prepared][outcome]
    }

    pub fn inconclusive(&self, prepared: usize) -> f64 {
        self.rows[prepared][self.n()]
    }

    /// Largest probability of announcing the wrong state.
    pub fn max_error(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    worst = worst.max(self.rows[j][k]);
                }
            }
        }
        worst
    }

    pub fn max_row_sum_residual(&self) -> f64 {
        self.rows.iter().map(|r| (r.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn expectation(op: &ComplexMatrix, psi: &[C64]) -> f64 {
    let v = op.mul_vec(psi);
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `p_j(k) = |A_k psi_j|^2`, `p_j(I) = |A_I psi_j|^2`.
pub fn outcome_distribution(m: &UsdMeasurement, ensemble: &StateEnsemble) -> Result<OutcomeDistribution> {
    if m.dim() != ensemble.dim() || m.n() != ensemble.n() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: ensemble.dim() });
    }
    let rows = ensemble
        .states()
        .iter()
        .map(|s| {
            let psi = s.amplitudes();
            let mut row: Vec<f64> = m.detection_ops.iter().map(|a| expectation(a, psi)).collect();
            row.push(expectation(&m.inconclusive_op, psi));
            row
        })
        .collect();
    Ok(OutcomeDistribution { rows })
}

/// The unnormalized states `A_I |psi_j>` left behind by an inconclusive result.
#[derive(Debug, Clone)]
pub struct PostInconclusive {
    pub vectors: Vec<Vec<C64>>,
    pub rank: usize,
    pub rel_tol: f64,
}

impl PostInconclusive {
    pub fn is_dependent(&self) -> bool {
        self.rank < self.vectors.len()
    }

    /// `|<a|b>| / (|a| |b|)`; 1 for parallel vectors.
    pub fn alignment(&self, j: usize, k: usize) -> f64 {
        let (a, b) = (&self.vectors[j], &self.vectors[k]);
        let denom = norm(a) * norm(b);
        if denom == 0.0 {
            return 1.0;
        }
        inner(a, b).norm() / denom
    }
}

pub fn post_inconclusive_states(m: &UsdMeasurement, ensemble: &StateEnsemble) -> Result<PostInconclusive> {
    post_inconclusive_states_with_tol(m, ensemble, POST_INCONCLUSIVE_RANK_TOL)
}

pub fn post_inconclusive_states_with_tol(
    m: &UsdMeasurement,
    ensemble: &StateEnsemble,
    rel_tol: f64,
) -> Result<PostInconclusive> {
    if m.dim() != ensemble.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: ensemble.dim() });
    }
    let vectors: Vec<Vec<C64>> = ensemble.states().iter().map(|s| m.inconclusive_op.mul_vec(s.amplitudes())).collect();
    let rank = numerical_rank(&ComplexMatrix::from_columns(&vectors), rel_tol);
    Ok(PostInconclusive { vectors, rank, rel_tol })
}
