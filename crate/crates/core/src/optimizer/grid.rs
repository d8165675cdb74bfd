//! Brute-force verifier: best feasible point of a regular grid on `[0,1]^n`.
//!
//! Feasibility is monotone (raising any `P_j` adds a PSD term to the
//! probability operator), so for each setting of the first `n - 2`
//! coordinates the maximal feasible points of the last two form a staircase
//! that is walked in `O(m)` checks instead of `O(m^2)`. Every candidate is
//! still checked individually.

use crate::ensemble::StateEnsemble;
use crate::error::{Error, Result};
use crate::measurement::FEASIBILITY_SLACK;
use crate::numcore::{ComplexMatrix, C64};
use crate::par::{map_indexed, Execution};

use super::{dual_system, Method, OptimizationResult};

pub const GRID_MAX_STATES: usize = 4;

pub fn grid_oracle(ensemble: &StateEnsemble, resolution: f64) -> Result<OptimizationResult> {
    grid_oracle_with(ensemble, resolution, Execution::default())
}

pub fn grid_oracle_with(ensemble: &StateEnsemble, resolution: f64, exec: Execution) -> Result<OptimizationResult> {
    let n = ensemble.n();
    if n > GRID_MAX_STATES {
        return Err(Error::TooLarge { n, max: GRID_MAX_STATES });
    }
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::Domain(format!("grid resolution {resolution} outside (0, 1]")));
    }
    let recip = ensemble.reciprocal_states()?;
    let system = dual_system(&recip);
    let steps = (1.0 / resolution).round().max(1.0) as usize;
    let checker = Checker::new(&system.vectors, &system.weights, steps);
    let eta = ensemble.priors();

    let best = if n == 1 {
        let mut buf = checker.buffer();
        let top = (0..=steps).rev().find(|&i| checker.feasible(&[i], &mut buf)).unwrap_or(0);
        Candidate { value: eta[0] * checker.level(top), indices: vec![top] }
    } else {
        let prefixes = (steps + 1).pow((n - 2) as u32);
        let per_prefix = map_indexed(exec, prefixes, |code| {
            let mut idx = vec![0usize; n];
            let mut c = code;
            for slot in idx.iter_mut().take(n - 2) {
                *slot = c % (steps + 1);
                c /= steps + 1;
            }
            staircase(&checker, eta, idx)
        });
        per_prefix
            .into_iter()
            .flatten()
            .fold(None::<Candidate>, |acc, c| match acc {
                Some(a) if a.value >= c.value => Some(a),
                _ => Some(c),
            })
            .unwrap_or(Candidate { value: 0.0, indices: vec![0; n] })
    };

    let cond_probs: Vec<f64> = best.indices.iter().map(|&i| checker.level(i)).collect();
    let boundary_eigenvalue = system.max_eigenvalue(&cond_probs)?;
    Ok(OptimizationResult::new(cond_probs, eta, boundary_eigenvalue, Method::GridOracle))
}

#[derive(Debug, Clone)]
struct Candidate {
    value: f64,
    indices: Vec<usize>,
}

/// Walks the boundary of the feasible region in the last two coordinates.
fn staircase(checker: &Checker, eta: &[f64], mut idx: Vec<usize>) -> Option<Candidate> {
    let n = idx.len();
    let (a_slot, b_slot) = (n - 2, n - 1);
    let steps = checker.steps;
    let mut buf = checker.buffer();
    let mut best: Option<Candidate> = None;
    let mut b = steps as isize;
    for a in 0..=steps {
        idx[a_slot] = a;
        while b >= 0 {
            idx[b_slot] = b as usize;
            if checker.feasible(&idx, &mut buf) {
                break;
            }
            b -= 1;
        }
        if b < 0 {
            break;
        }
        let value: f64 = idx.iter().zip(eta).map(|(&i, e)| e * checker.level(i)).sum();
        if best.as_ref().is_none_or(|c| value > c.value) {
            best = Some(Candidate { value, indices: idx.clone() });
        }
    }
    best
}

/// Cholesky-based test of `(1 + slack) I - sum_j P_j q_j |u_j><u_j| > 0`.
struct Checker {
    dim: usize,
    steps: usize,
    projectors: Vec<Vec<C64>>,
}

impl Checker {
    fn new(vectors: &[Vec<C64>], weights: &[f64], steps: usize) -> Self {
        let projectors = vectors
            .iter()
            .zip(weights)
            .map(|(u, q)| ComplexMatrix::outer(u, u).scale_real(*q).as_slice().to_vec())
            .collect();
        Self { dim: vectors[0].len(), steps, projectors }
    }

    fn level(&self, i: usize) -> f64 {
        i as f64 / self.steps as f64
    }

    fn buffer(&self) -> Vec<C64> {
        vec![C64::new(0.0, 0.0); self.dim * self.dim]
    }

    fn feasible(&self, idx: &[usize], a: &mut [C64]) -> bool {
        let d = self.dim;
        a.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for i in 0..d {
            a[i * d + i] = C64::new(1.0 + FEASIBILITY_SLACK, 0.0);
        }
        for (proj, &k) in self.projectors.iter().zip(idx) {
            if k == 0 {
                continue;
            }
            let p = self.level(k);
            for (x, y) in a.iter_mut().zip(proj) {
                *x -= y * p;
            }
        }
        // In-place Cholesky on the lower triangle.
        for j in 0..d {
            let mut diag = a[j * d + j].re;
            for k in 0..j {
                diag -= a[j * d + k].norm_sqr();
            }
            if !(diag > 0.0) {
                return false;
            }
            let l = diag.sqrt();
            a[j * d + j] = C64::new(l, 0.0);
            for i in j + 1..d {
                let mut s = a[i * d + j];
                for k in 0..j {
                    s -= a[i * d + k] * a[j * d + k].conj();
                }
                a[i * d + j] = s / l;
            }
        }
        true
    }
}
