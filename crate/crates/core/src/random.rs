//! Random states, operators and ensembles for property tests, benchmarks and
//! the embedding check. All generators take an explicit RNG.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::concentration::SchmidtState;
use crate::ensemble::{PureState, StateEnsemble};
use crate::numcore::{inner, normalized, ComplexMatrix, C64};

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unit vector.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if let Some(u) = normalized(&v) {
            return u;
        }
    }
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn hermitian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// `G G†` with `G` of random rank between 1 and `n`.
pub fn psd_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let rank = rng.random_range(1..=n);
    let g = gaussian_matrix(rng, n, rank);
    &g * &g.adjoint()
}

/// Haar-ish unitary from Gram-Schmidt on a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let proj = inner(c, &v);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        if let Some(u) = normalized(&v) {
            cols.push(u);
        }
    }
    ComplexMatrix::from_columns(&cols)
}

/// Flat-Dirichlet probability vector.
pub fn priors<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Random pure states in dimension `dim` with random priors.
pub fn ensemble<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize) -> StateEnsemble {
    let states = (0..n).map(|_| PureState::new(unit_vector(rng, dim)).expect("unit vector")).collect();
    StateEnsemble::new(states, priors(rng, n)).expect("valid ensemble")
}

/// Random ensemble whose Gram matrix has smallest eigenvalue at least
/// `min_gram_eig` (rejection sampling).
pub fn well_conditioned_ensemble<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    dim: usize,
    min_gram_eig: f64,
) -> StateEnsemble {
    loop {
        let e = ensemble(rng, n, dim);
        let report = e.check_independence(crate::ensemble::DEFAULT_INDEPENDENCE_TOL);
        if report.smallest_eigenvalue >= min_gram_eig {
            return e;
        }
    }
}

/// Random Schmidt coefficients with random phases; the smallest weight is at
/// least `min_weight`.
pub fn schmidt_state<R: Rng + ?Sized>(rng: &mut R, n: usize, min_weight: f64) -> SchmidtState {
    loop {
        let w = priors(rng, n);
        if w.iter().any(|&x| x < min_weight) {
            continue;
        }
        let coeffs =
            w.iter().map(|&x| C64::from_polar(x.sqrt(), rng.random_range(0.0..std::f64::consts::TAU))).collect();
        return SchmidtState::new(coeffs).expect("normalized coefficients");
    }
}
