//! Log-barrier interior-point solver for
//!
//! ```text
//!   maximize   sum_j eta_j P_j
//!   subject to I - sum_j q_j P_j |u_j><u_j|  >= 0,   P_j >= 0
//! ```
//!
//! The constraint `P_j <= 1` is implied: `<psi_j|Pi|psi_j> = P_j` and the
//! left side is bounded by the largest eigenvalue of `Pi`.
//!
//! The barrier `phi = eta.P / mu + log det(I - Pi) + sum log P_j` is
//! self-concordant, so damped Newton steps stay feasible and the decrement
//! certifies each centering. The duality gap on the central path is
//! `mu * (dim + n)`.

use crate::error::{Error, Result};
use crate::numcore::{cholesky, hermitian_eig, ComplexMatrix, C64};

const MU_START: f64 = 1.0;
const MU_FACTOR: f64 = 0.1;
const TARGET_GAP: f64 = 1e-12;
// Off-centre iterates with decrement below 1e-3 keep the gap within a few
// `mu * (dim + n)`, so tighter centering buys nothing.
const DECREMENT_TOL: f64 = 1e-6;
const NEWTON_BUDGET: usize = 200;
/// Squared decrement below which undamped Newton converges quadratically.
const QUADRATIC_REGION: f64 = 0.0625;

/// Vectors `u_j` with weights `q_j`, in coordinates where the ambient
/// operator is `I - Pi`.
#[derive(Debug, Clone)]
pub(crate) struct DualSystem {
    pub vectors: Vec<Vec<C64>>,
    pub weights: Vec<f64>,
}

impl DualSystem {
    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }

    /// `sum_j q_j P_j |u_j><u_j|`
    pub fn operator(&self, p: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim(), self.dim());
        for ((u, q), pj) in self.vectors.iter().zip(&self.weights).zip(p) {
            if *pj != 0.0 {
                m.add_projector(q * pj, u);
            }
        }
        m
    }

    pub fn max_eigenvalue(&self, p: &[f64]) -> Result<f64> {
        Ok(hermitian_eig(&self.operator(p))?.max())
    }

    fn slack(&self, p: &[f64]) -> ComplexMatrix {
        &ComplexMatrix::identity(self.dim()) - &self.operator(p)
    }
}

/// Solution on the boundary `lambda = 1`.
#[derive(Debug, Clone)]
pub(crate) struct BarrierSolution {
    pub cond_probs: Vec<f64>,
    pub max_eigenvalue: f64,
}

pub(crate) fn maximize(system: &DualSystem, priors: &[f64]) -> Result<BarrierSolution> {
    let n = system.n();
    assert_eq!(priors.len(), n);
    let nu = (system.dim() + n) as f64;

    // Strictly feasible start: equal P at half the boundary value.
    let unit = vec![1.0; n];
    let lambda0 = system.max_eigenvalue(&unit)?;
    let mut p = vec![0.5 / lambda0; n];

    let mut mu = MU_START;
    loop {
        center(system, priors, mu, &mut p)?;
        if nu * mu <= TARGET_GAP {
            break;
        }
        mu *= MU_FACTOR;
    }

    for x in &mut p {
        *x = x.max(0.0);
    }
    let lambda = system.max_eigenvalue(&p)?;
    if lambda > 0.0 {
        for x in &mut p {
            *x = (*x / lambda).min(1.0);
        }
    }
    let max_eigenvalue = system.max_eigenvalue(&p)?;
    Ok(BarrierSolution { cond_probs: p, max_eigenvalue })
}

/// Damped Newton on the barrier at fixed `mu`.
fn center(system: &DualSystem, priors: &[f64], mu: f64, p: &mut Vec<f64>) -> Result<()> {
    let n = system.n();
    let mut previous = f64::INFINITY;
    for step in 0..NEWTON_BUDGET {
        let (grad, factor) = newton_system(system, priors, mu, p)?;
        let dir = solve_gram(&factor, &grad, n)
            .ok_or(Error::NoConvergence { what: "barrier Newton system", iterations: step })?;
        let decrement_sq: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
        if !decrement_sq.is_finite() {
            return Err(Error::NoConvergence { what: "barrier Newton decrement", iterations: step });
        }
        if decrement_sq <= DECREMENT_TOL {
            return Ok(());
        }
        // Inside the quadratic region a full step shrinks the decrement far
        // more than this; failing to do so means round-off dominates.
        if previous < QUADRATIC_REGION && decrement_sq > 0.5 * previous {
            return Ok(());
        }
        previous = decrement_sq;
        let decrement = decrement_sq.sqrt();
        let mut t = if decrement_sq > QUADRATIC_REGION { 1.0 / (1.0 + decrement) } else { 1.0 };

        // The damped step is feasible in exact arithmetic; back off if round-off says otherwise.
        loop {
            let trial: Vec<f64> = p.iter().zip(&dir).map(|(x, d)| x + t * d).collect();
            if trial.iter().all(|&x| x > 0.0) && cholesky(&system.slack(&trial)).is_some() {
                if trial == *p {
                    // Step below working precision.
                    return Ok(());
                }
                *p = trial;
                break;
            }
            t *= 0.5;
            if t < 1e-30 {
                // No representable progress left at this mu.
                return Ok(());
            }
        }
    }
    Err(Error::NoConvergence { what: "barrier centering", iterations: NEWTON_BUDGET })
}

/// Gradient of the barrier and a factor `F` with Hessian `F^T F`.
///
/// With `w_j = S^{-1/2} V^dag u_j` from the slack `V S V^dag`, the Hessian is
/// `q_j q_k |<w_j|w_k>|^2 + delta_jk / P_j^2`. Its first term is the Gram
/// matrix of the Hermitian operators `q_j |w_j><w_j|`, so `F` stacks their
/// real coordinates on top of `diag(1/P)`. Near the boundary the Hessian is
/// dominated by one huge rank-one term and forming it explicitly loses the
/// remaining directions to round-off; the factor keeps them.
fn newton_system(system: &DualSystem, priors: &[f64], mu: f64, p: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = system.n();
    let d = system.dim();
    let eig = hermitian_eig(&system.slack(p))?;
    if !(eig.min() > 0.0) {
        return Err(Error::NoConvergence { what: "barrier slack", iterations: 0 });
    }
    let scale: Vec<f64> = eig.values.iter().map(|s| s.sqrt().recip()).collect();
    let rows = d * d + n;
    let mut factor = vec![0.0; rows * n];
    let mut grad = vec![0.0; n];
    for j in 0..n {
        let u = &system.vectors[j];
        let w: Vec<C64> =
            (0..d).map(|i| (0..d).map(|k| eig.vectors[(k, i)].conj() * u[k]).sum::<C64>() * scale[i]).collect();
        let qj = system.weights[j];
        let wnorm: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        grad[j] = priors[j] / mu - qj * wnorm + 1.0 / p[j];
        let mut r = 0;
        for a in 0..d {
            factor[r * n + j] = qj * w[a].norm_sqr();
            r += 1;
            for b in a + 1..d {
                let h = w[a] * w[b].conj() * (qj * std::f64::consts::SQRT_2);
                factor[r * n + j] = h.re;
                factor[(r + 1) * n + j] = h.im;
                r += 2;
            }
        }
        factor[(d * d + j) * n + j] = 1.0 / p[j];
    }
    Ok((grad, factor))
}

/// Solves `F^T F x = b` from a Householder QR of `F` (row-major, `n` columns).
fn solve_gram(f: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let rows = f.len() / n;
    let mut a = f.to_vec();
    for k in 0..n {
        let norm = (k..rows).map(|i| a[i * n + k].powi(2)).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return None;
        }
        let alpha = if a[k * n + k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|i| a[i * n + k]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv > 0.0 {
            for c in k..n {
                let dot: f64 = v.iter().enumerate().map(|(t, vi)| vi * a[(k + t) * n + c]).sum();
                let s = 2.0 * dot / vv;
                for (t, vi) in v.iter().enumerate() {
                    a[(k + t) * n + c] -= s * vi;
                }
            }
        }
    }
    // R^T y = b, then R x = y.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s = b[i] - (0..i).map(|k| a[k * n + i] * y[k]).sum::<f64>();
        y[i] = s / a[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s = y[i] - (i + 1..n).map(|k| a[i * n + k] * x[k]).sum::<f64>();
        x[i] = s / a[i * n + i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_solve() {
        // F^T F = [[4, 1], [1, 3]]
        let f = [2.0, 0.5, 0.0, 2.75f64.sqrt(), 0.0, 0.0];
        let x = solve_gram(&f, &[1.0, 2.0], 2).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14);
        assert!((x[0] + 3.0 * x[1] - 2.0).abs() < 1e-14);
        assert!(solve_gram(&[0.0, 0.0], &[1.0], 1).is_none());
    }

    #[test]
    fn orthonormal_system_reaches_one() {
        let system = DualSystem {
            vectors: (0..3).map(|k| (0..3).map(|i| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect()).collect(),
            weights: vec![1.0; 3],
        };
        let sol = maximize(&system, &[0.2, 0.3, 0.5]).unwrap();
        for p in &sol.cond_probs {
            assert!((p - 1.0).abs() < 1e-10, "{p}");
        }
    }
}
