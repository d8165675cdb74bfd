//! Pure-state ensembles, their Gram matrices, the linear-independence gate
//! and the reciprocal (dual) states.

use crate::error::{Error, Result};
use crate::numcore::{hermitian_eig, inner, inverse, norm, normalized, ComplexMatrix, HermitianEig, C64, ONE, ZERO};

/// Tolerance on `|psi| = 1`.
pub const UNIT_NORM_TOL: f64 = 1e-9;
/// Tolerance on `sum(priors) = 1`.
pub const PRIOR_SUM_TOL: f64 = 1e-12;
/// Smallest Gram eigenvalue, relative to the largest, still counted as independent.
pub const DEFAULT_INDEPENDENCE_TOL: f64 = 1e-10;

/// Unit vector in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidInput("state has no amplitudes".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("amplitudes must be finite".into()));
        }
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidInput(format!("state norm is {n}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes any nonzero vector.
    pub fn normalize(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("amplitudes must be finite".into()));
        }
        match normalized(&amplitudes) {
            Some(a) if !a.is_empty() => Ok(Self { amplitudes: a }),
            _ => Err(Error::InvalidInput("cannot normalize the zero vector".into())),
        }
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `k`-th standard basis vector of `C^dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[k] = ONE;
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `<self|other>`
    pub fn overlap(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }
}

/// States `|psi_j>` with prior probabilities `eta_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEnsemble {
    states: Vec<PureState>,
    priors: Vec<f64>,
}

impl StateEnsemble {
    pub fn new(states: Vec<PureState>, priors: Vec<f64>) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::InvalidInput("ensemble has no states".into()));
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.dim() });
        }
        if priors.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: priors.len() });
        }
        if priors.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidInput("priors must be finite and non-negative".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > PRIOR_SUM_TOL {
            return Err(Error::InvalidInput(format!("priors sum to {total}, expected 1")));
        }
        Ok(Self { states, priors })
    }

    /// Equal priors `1/n`.
    pub fn uniform(states: Vec<PureState>) -> Result<Self> {
        let n = states.len();
        Self::new(states, vec![1.0 / n.max(1) as f64; n])
    }

    /// `cos(theta)|0> +- sin(theta)|1>` with priors `(eta_plus, 1 - eta_plus)`.
    pub fn symmetric_pair(theta: f64, eta_plus: f64) -> Result<Self> {
        let (s, c) = theta.sin_cos();
        let plus = PureState::from_real(&[c, s])?;
        let minus = PureState::from_real(&[c, -s])?;
        Self::new(vec![plus, minus], vec![eta_plus, 1.0 - eta_plus])
    }

    pub fn with_priors(&self, priors: Vec<f64>) -> Result<Self> {
        Self::new(self.states.clone(), priors)
    }

    /// Reorders states and priors: entry `i` of the result is entry `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: perm.len() });
        }
        Self::new(
            perm.iter().map(|&i| self.states[i].clone()).collect(),
            perm.iter().map(|&i| self.priors[i]).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn state(&self, j: usize) -> &PureState {
        &self.states[j]
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// `d x n` matrix with the states as columns.
    pub fn state_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), self.n(), |i, j| self.states[j].amplitudes[i])
    }

    /// `G_jk = <psi_j|psi_k>`.
    pub fn gram(&self) -> GramMatrix {
        let n = self.n();
        let mut g = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            g[(j, j)] = C64::new(norm(self.states[j].amplitudes()).powi(2), 0.0);
            for k in j + 1..n {
                let z = self.states[j].overlap(&self.states[k]);
                g[(j, k)] = z;
                g[(k, j)] = z.conj();
            }
        }
        GramMatrix(g)
    }

    /// Independent iff the smallest Gram eigenvalue exceeds `rel_tol` times the largest.
    pub fn check_independence(&self, rel_tol: f64) -> IndependenceReport {
        let eig = self.gram().eig();
        let smallest = eig.min();
        let largest = eig.max();
        IndependenceReport {
            independent: smallest > rel_tol * largest,
            smallest_eigenvalue: smallest,
            largest_eigenvalue: largest,
            eigenvalues: eig.values,
        }
    }

    /// Dual states `|psi_perp_j>`, orthogonal to every `|psi_k>`, `k != j`.
    pub fn reciprocal_states(&self) -> Result<ReciprocalSet> {
        self.reciprocal_states_with_tol(DEFAULT_INDEPENDENCE_TOL)
    }

    pub fn reciprocal_states_with_tol(&self, rel_tol: f64) -> Result<ReciprocalSet> {
        let n = self.n();
        let d = self.dim();
        let eig = self.gram().eig();
        let (smallest, largest) = (eig.min(), eig.max());
        if !(smallest > rel_tol * largest) {
            return Err(Error::DependentStates { smallest, largest });
        }

        let psi = self.state_matrix();
        // Orthonormal basis of the span. When the states already fill the
        // space the standard basis is used, so operators keep the caller's
        // coordinates.
        let span_basis = if d == n { ComplexMatrix::identity(n) } else { span_basis(&psi, &eig) };
        let coords = &span_basis.adjoint() * &psi;
        let coords_inv = inverse(&coords).map_err(|_| Error::DependentStates { smallest, largest })?;

        let mut reciprocals = Vec::with_capacity(n);
        let mut overlaps = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for j in 0..n {
            // Row j of coords^-1 pairs with column k of coords to give delta_jk,
            // so its conjugate is the unnormalized dual in span coordinates.
            let dual: Vec<C64> = coords_inv.row(j).iter().map(|z| z.conj()).collect();
            let len = norm(&dual);
            let unit: Vec<C64> = dual.iter().map(|z| z / len).collect();
            let ambient = span_basis.mul_vec(&unit);
            // <perp_j|psi_j> = 1/|dual| > 0 by construction.
            let s = 1.0 / len;
            reciprocals.push(PureState { amplitudes: ambient });
            overlaps.push(s);
            weights.push(1.0 / (s * s));
        }
        Ok(ReciprocalSet { reciprocals, overlaps, weights, span_basis })
    }
}

/// Orthonormal basis of the column span of `psi` from the Gram eigensystem:
/// `E = Psi V Lambda^{-1/2}`.
fn span_basis(psi: &ComplexMatrix, gram_eig: &HermitianEig) -> ComplexMatrix {
    let n = psi.cols();
    let pv = psi * &gram_eig.vectors;
    ComplexMatrix::from_fn(psi.rows(), n, |i, m| pv[(i, m)] / gram_eig.values[m].sqrt())
}

/// Matrix of pairwise overlaps.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix(ComplexMatrix);

impl GramMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn eig(&self) -> HermitianEig {
        hermitian_eig(&self.0).expect("Gram matrices are Hermitian")
    }

    /// `|G - I|_F`
    pub fn distance_from_identity(&self) -> f64 {
        (&self.0 - &ComplexMatrix::identity(self.0.rows())).frobenius_norm()
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.distance_from_identity() <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport {
    pub independent: bool,
    pub smallest_eigenvalue: f64,
    pub largest_eigenvalue: f64,
    /// Ascending Gram spectrum.
    pub eigenvalues: Vec<f64>,
}

/// Dual states with `<perp_j|psi_k> = s_j delta_jk`, `s_j > 0` and weights
/// `q_j = s_j^-2`.
#[derive(Debug, Clone)]
pub struct ReciprocalSet {
    reciprocals: Vec<PureState>,
    overlaps: Vec<f64>,
    weights: Vec<f64>,
    span_basis: ComplexMatrix,
}

impl ReciprocalSet {
    pub fn n(&self) -> usize {
        self.reciprocals.len()
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.span_basis.rows()
    }

    pub fn reciprocals(&self) -> &[PureState] {
        &self.reciprocals
    }

    pub fn reciprocal(&self, j: usize) -> &PureState {
        &self.reciprocals[j]
    }

    /// `s_j = <perp_j|psi_j>`
    pub fn overlaps(&self) -> &[f64] {
        &self.overlaps
    }

    /// `q_j = s_j^-2`
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `d x n`, orthonormal columns spanning the ensemble.
    pub fn span_basis(&self) -> &ComplexMatrix {
        &self.span_basis
    }

    /// Reciprocal states expressed in the span basis (length `n` each).
    pub fn span_coordinates(&self) -> Vec<Vec<C64>> {
        let et = self.span_basis.adjoint();
        self.reciprocals.iter().map(|r| et.mul_vec(r.amplitudes())).collect()
    }

    /// `max_{j != k} |<perp_j|psi_k>|`
    pub fn biorthogonality_residual(&self, ensemble: &StateEnsemble) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, r) in self.reciprocals.iter().enumerate() {
            for (k, s) in ensemble.states().iter().enumerate() {
                if j != k {
                    worst = worst.max(r.overlap(s).norm());
                }
            }
        }
        worst
    }

    /// The reciprocal states as an equal-prior ensemble.
    pub fn as_ensemble(&self) -> StateEnsemble {
        StateEnsemble::uniform(self.reciprocals.clone()).expect("reciprocals are unit vectors")
    }
}
