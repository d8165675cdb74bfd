//! Numerical check that enlarging the Hilbert space never helps.
//!
//! The states stay in their span `H`; the reciprocal states are allowed to
//! leak into `extra_dims` orthogonal directions,
//! `|perp_Sj> = mu_j |perp_j> + nu_j |chi_j>` with `|mu_j|^2 + |nu_j|^2 = 1`.
//! Biorthogonality survives, the overlaps shrink to `mu_j s_j` and the
//! weights grow to `q_j / |mu_j|^2`. For every `P` the largest eigenvalue
//! of the enlarged operator is at least that of the restricted one, so the
//! enlarged optimum cannot exceed the restricted optimum.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::{ReciprocalSet, StateEnsemble};
use crate::error::{Error, Result};
use crate::numcore::C64;
use crate::par::{map_indexed, substream, Execution};
use crate::random;

use super::interior::{self, DualSystem};
use super::{dual_system, Method, OptimizationResult};

/// Keeps `q_j / |mu_j|^2` within a range the solver handles comfortably.
const MIN_MU_SQ: f64 = 1e-6;
const NO_GAIN_TOL: f64 = 1e-9;

/// Mixing weights and complement directions for one enlarged space.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub mu: Vec<C64>,
    pub nu: Vec<C64>,
    /// Unit vectors in the `extra_dims`-dimensional complement.
    pub chi: Vec<Vec<C64>>,
}

impl Embedding {
    /// `(mu_j, nu_j)` uniform on the unit sphere of `C^2`, `chi_j` Haar-random.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, extra_dims: usize) -> Self {
        let mut mu = Vec::with_capacity(n);
        let mut nu = Vec::with_capacity(n);
        let mut chi = Vec::with_capacity(n);
        for _ in 0..n {
            let pair = loop {
                let v = random::unit_vector(rng, 2);
                if v[0].norm_sqr() >= MIN_MU_SQ {
                    break v;
                }
            };
            mu.push(pair[0]);
            nu.push(pair[1]);
            chi.push(random::unit_vector(rng, extra_dims));
        }
        Self { mu, nu, chi }
    }

    /// `nu_j = 0`: the enlarged problem coincides with the restricted one.
    pub fn trivial(n: usize, extra_dims: usize) -> Self {
        let mut e0 = vec![C64::new(0.0, 0.0); extra_dims];
        e0[0] = C64::new(1.0, 0.0);
        Self { mu: vec![C64::new(1.0, 0.0); n], nu: vec![C64::new(0.0, 0.0); n], chi: vec![e0; n] }
    }

    pub fn extra_dims(&self) -> usize {
        self.chi.first().map_or(0, |c| c.len())
    }

    fn system(&self, recip: &ReciprocalSet) -> Result<DualSystem> {
        let n = recip.n();
        if self.mu.len() != n || self.nu.len() != n || self.chi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.mu.len() });
        }
        let base = dual_system(recip);
        let mut vectors = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for j in 0..n {
            let mu_sq = self.mu[j].norm_sqr();
            if mu_sq == 0.0 {
                return Err(Error::Domain(format!("embedding weight mu_{j} is zero")));
            }
            let mut v: Vec<C64> = base.vectors[j].iter().map(|z| z * self.mu[j]).collect();
            v.extend(self.chi[j].iter().map(|z| z * self.nu[j]));
            vectors.push(v);
            weights.push(base.weights[j] / mu_sq);
        }
        Ok(DualSystem { vectors, weights })
    }
}

/// Largest eigenvalue of the enlarged probability operator at `cond_probs`.
pub fn embedded_lambda(recip: &ReciprocalSet, embedding: &Embedding, cond_probs: &[f64]) -> Result<f64> {
    if cond_probs.len() != recip.n() {
        return Err(Error::DimensionMismatch { expected: recip.n(), found: cond_probs.len() });
    }
    embedding.system(recip)?.max_eigenvalue(cond_probs)
}

/// Optimal measurement in the enlarged space.
pub fn embedded_optimum(
    ensemble: &StateEnsemble,
    recip: &ReciprocalSet,
    embedding: &Embedding,
) -> Result<OptimizationResult> {
    let system = embedding.system(recip)?;
    let sol = interior::maximize(&system, ensemble.priors())?;
    Ok(OptimizationResult::new(sol.cond_probs, ensemble.priors(), sol.max_eigenvalue, Method::GeneralIterative))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub extra_dims: usize,
    pub trials: usize,
    pub seed: u64,
    pub restricted_p_d: f64,
    /// Best optimum found in any enlarged space.
    pub max_embedded_p_d: f64,
    /// Best value of the restricted optimum rescaled to `lambda_S = 1`.
    pub max_rescaled_p_d: f64,
    /// `max(embedded - restricted)`; never above the tolerance when the check passes.
    pub max_excess: f64,
    /// `min(lambda_S(P) - lambda(P))` at the restricted optimum.
    pub min_lambda_gap: f64,
    pub violations: usize,
    pub passed: bool,
}

pub fn embedding_no_gain_check(
    ensemble: &StateEnsemble,
    extra_dims: usize,
    trials: usize,
    seed: u64,
) -> Result<EmbeddingReport> {
    embedding_no_gain_check_with(ensemble, extra_dims, trials, seed, Execution::default())
}

struct Trial {
    embedded_p_d: f64,
    rescaled_p_d: f64,
    lambda_gap: f64,
}

pub fn embedding_no_gain_check_with(
    ensemble: &StateEnsemble,
    extra_dims: usize,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<EmbeddingReport> {
    if extra_dims == 0 {
        return Err(Error::Domain("extra_dims must be at least 1".into()));
    }
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    let recip = ensemble.reciprocal_states()?;
    let restricted = super::optimize_with_reciprocals(ensemble, &recip)?;
    let base = dual_system(&recip);
    let lambda = base.max_eigenvalue(&restricted.cond_probs)?;
    let eta = ensemble.priors();

    let outcomes = map_indexed(exec, trials, |t| -> Result<Trial> {
        let mut rng = substream(seed, t as u64);
        let embedding = Embedding::random(&mut rng, ensemble.n(), extra_dims);
        let system = embedding.system(&recip)?;
        let lambda_s = system.max_eigenvalue(&restricted.cond_probs)?;
        let rescaled_p_d: f64 = restricted.cond_probs.iter().zip(eta).map(|(p, e)| e * p / lambda_s.max(1.0)).sum();
        let sol = interior::maximize(&system, eta)?;
        let embedded_p_d: f64 = sol.cond_probs.iter().zip(eta).map(|(p, e)| e * p).sum();
        Ok(Trial { embedded_p_d, rescaled_p_d, lambda_gap: lambda_s - lambda })
    });

    let mut report = EmbeddingReport {
        extra_dims,
        trials,
        seed,
        restricted_p_d: restricted.discrimination_prob,
        max_embedded_p_d: f64::NEG_INFINITY,
        max_rescaled_p_d: f64::NEG_INFINITY,
        max_excess: f64::NEG_INFINITY,
        min_lambda_gap: f64::INFINITY,
        violations: 0,
        passed: true,
    };
    for outcome in outcomes {
        let t = outcome?;
        let excess = t.embedded_p_d.max(t.rescaled_p_d) - restricted.discrimination_prob;
        report.max_embedded_p_d = report.max_embedded_p_d.max(t.embedded_p_d);
        report.max_rescaled_p_d = report.max_rescaled_p_d.max(t.rescaled_p_d);
        report.max_excess = report.max_excess.max(excess);
        report.min_lambda_gap = report.min_lambda_gap.min(t.lambda_gap);
        if excess > NO_GAIN_TOL || t.lambda_gap < -NO_GAIN_TOL {
            report.violations += 1;
        }
    }
    report.passed = report.violations == 0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn trivial_embedding_changes_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 2..=4 {
            let e = random::well_conditioned_ensemble(&mut rng, n, n + 1, 1e-2);
            let recip = e.reciprocal_states().unwrap();
            let restricted = super::super::optimize_general(&e).unwrap();
            let emb = Embedding::trivial(n, 2);
            let lam = embedded_lambda(&recip, &emb, &restricted.cond_probs).unwrap();
            assert!((lam - restricted.boundary_eigenvalue).abs() < 1e-12);
            let opt = embedded_optimum(&e, &recip, &emb).unwrap();
            assert!((opt.discrimination_prob - restricted.discrimination_prob).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_pair_never_gains() {
        let e = StateEnsemble::symmetric_pair(PI / 8.0, 0.5).unwrap();
        let r = embedding_no_gain_check(&e, 2, 200, 11).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.max_embedded_p_d <= 0.29289 + 1e-5);
        assert!(r.min_lambda_gap >= -1e-9);
    }

    #[test]
    fn lambda_never_drops_for_arbitrary_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let e = random::well_conditioned_ensemble(&mut rng, 3, 3, 1e-2);
            let recip = e.reciprocal_states().unwrap();
            let base = dual_system(&recip);
            let emb = Embedding::random(&mut rng, 3, 2);
            let p: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
            let lam = base.max_eigenvalue(&p).unwrap();
            assert!(embedded_lambda(&recip, &emb, &p).unwrap() >= lam - 1e-9);
        }
    }

    #[test]
    fn report_is_deterministic_and_mode_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let e = random::well_conditioned_ensemble(&mut rng, 3, 3, 1e-2);
        let a = embedding_no_gain_check_with(&e, 2, 40, 9, Execution::Sequential).unwrap();
        let b = embedding_no_gain_check_with(&e, 2, 40, 9, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_zero_counts() {
        let e = StateEnsemble::symmetric_pair(0.3, 0.5).unwrap();
        assert!(matches!(embedding_no_gain_check(&e, 0, 10, 1), Err(Error::Domain(_))));
        assert!(matches!(embedding_no_gain_check(&e, 1, 0, 1), Err(Error::Domain(_))));
    }
}
