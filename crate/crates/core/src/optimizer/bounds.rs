//! Two-state reference values: the equal-prior inconclusive limit, the
//! minimum-error bound and the error/inconclusive tradeoff between them.

use crate::ensemble::StateEnsemble;
use crate::error::{Error, Result};

/// `|<psi_+|psi_->|`, the least inconclusive probability for two equiprobable states.
pub fn idp_bound(ensemble: &StateEnsemble) -> Result<f64> {
    if ensemble.n() != 2 {
        return Err(Error::WrongArity { expected: 2, found: ensemble.n() });
    }
    Ok(ensemble.state(0).overlap(ensemble.state(1)).norm().min(1.0))
}

/// Minimum error probability with no inconclusive results allowed.
pub fn helstrom_bound(overlap: f64) -> Result<f64> {
    error_tradeoff(0.0, overlap)
}

/// Least error probability `P_E` given an inconclusive rate `P_I <= overlap`:
/// the smaller root of `P_E (1 - P_I - P_E) = (overlap - P_I)^2 / 4`.
pub fn error_tradeoff(inconclusive: f64, overlap: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::Domain(format!("overlap {overlap} outside [0, 1]")));
    }
    if !(0.0..=overlap).contains(&inconclusive) {
        return Err(Error::Domain(format!("inconclusive probability {inconclusive} outside [0, overlap = {overlap}]")));
    }
    let b = 1.0 - inconclusive;
    let c = 0.25 * (overlap - inconclusive).powi(2);
    let disc = (b * b - 4.0 * c).max(0.0);
    // Numerically stable form of (b - sqrt(disc)) / 2.
    if c == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * c / (b + disc.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::PureState;
    use std::f64::consts::PI;

    /// Bisection on `f(x) = x (b - x) - c` over `[0, b/2]`, where `f` is increasing.
    fn tradeoff_oracle(pi: f64, overlap: f64) -> f64 {
        let b = 1.0 - pi;
        let c = 0.25 * (overlap - pi).powi(2);
        let (mut lo, mut hi) = (0.0f64, b / 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * (b - mid) < c {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn idp_examples() {
        let ortho = StateEnsemble::uniform(vec![PureState::basis(2, 0), PureState::basis(2, 1)]).unwrap();
        assert_eq!(idp_bound(&ortho).unwrap(), 0.0);
        let same = StateEnsemble::uniform(vec![PureState::basis(2, 0), PureState::basis(2, 0)]).unwrap();
        assert_eq!(idp_bound(&same).unwrap(), 1.0);
        let pair = StateEnsemble::symmetric_pair(PI / 8.0, 0.5).unwrap();
        assert!((idp_bound(&pair).unwrap() - 0.70711).abs() < 1e-5);
        let triple = StateEnsemble::uniform((0..3).map(|k| PureState::basis(3, k)).collect()).unwrap();
        assert!(matches!(idp_bound(&triple), Err(Error::WrongArity { expected: 2, found: 3 })));
    }

    #[test]
    fn tradeoff_examples() {
        let o = (PI / 4.0).cos();
        assert!(error_tradeoff(o, o).unwrap().abs() < 1e-15);
        let helstrom = helstrom_bound(o).unwrap();
        assert!((helstrom - (1.0 - (1.0 - o * o).sqrt()) / 2.0).abs() < 1e-15);
        assert!((helstrom - 0.14645).abs() < 1e-5);
        let pe = error_tradeoff(0.2, 0.70711).unwrap();
        assert!((pe - tradeoff_oracle(0.2, 0.70711)).abs() < 1e-12);
        assert!((pe - 0.09063).abs() < 1e-5);
        assert!(matches!(error_tradeoff(0.8, 0.7), Err(Error::Domain(_))));
    }

    #[test]
    fn tradeoff_matches_bisection_and_saturates() {
        for i in 0..=20 {
            let overlap = i as f64 / 20.0;
            for k in 0..=10 {
                let pi = overlap * k as f64 / 10.0;
                let pe = error_tradeoff(pi, overlap).unwrap();
                if i == 20 {
                    // double root: bisection only resolves it to ~sqrt(eps)
                    assert!((pe - (1.0 - pi) / 2.0).abs() < 1e-12);
                } else {
                    assert!((pe - tradeoff_oracle(pi, overlap)).abs() < 1e-12);
                }
                let pd = 1.0 - pi - pe;
                assert!((pe * pd - 0.25 * (overlap - pi).powi(2)).abs() < 1e-12);
            }
        }
    }
}
