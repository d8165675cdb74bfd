//! Acceptance suite. Runs every criterion at its stated tolerance, prints
//! one PASS/FAIL line each and exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use usd_core::concentration::{apply_concentration, concentration_probability, derived_states, SchmidtState};
use usd_core::ensemble::{PureState, StateEnsemble};
use usd_core::measurement::{build_measurement, post_inconclusive_states, probability_operator, UsdMeasurement};
use usd_core::optimizer::{
    embedding_no_gain_check, equal_p_solution, error_tradeoff, grid_oracle, helstrom_bound,
    jaeger_shimony_inconclusive, optimize_general,
};
use usd_core::random;
use usd_core::simulator::{simulate, simulate_concentration};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn random_n(rng: &mut ChaCha8Rng, choices: &[usize]) -> usize {
    choices[rng.random_range(0..choices.len())]
}

/// Optimal measurement, rescaled so the largest eigenvalue is exactly on the boundary.
fn optimal_measurement(e: &StateEnsemble) -> (UsdMeasurement, Vec<f64>) {
    let recip = e.reciprocal_states().unwrap();
    let r = optimize_general(e).unwrap();
    let lambda = probability_operator(&recip, &r.cond_probs).unwrap().max_eigenvalue;
    let p: Vec<f64> = r.cond_probs.iter().map(|x| (x / lambda).min(1.0)).collect();
    (build_measurement(e, &recip, &p).unwrap(), p)
}

fn two_state_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_idp: f64 = 0.0;
    for deg in 1..=44 {
        let theta = (deg as f64).to_radians();
        for step in 0..=9 {
            let eta = 0.5 + 0.05 * step as f64;
            let e = StateEnsemble::symmetric_pair(theta, eta).unwrap();
            let overlap = (2.0 * theta).cos();
            let r = optimize_general(&e).unwrap();
            worst = worst.max((r.inconclusive_prob - jaeger_shimony_inconclusive(overlap, eta, 1.0 - eta)).abs());
            if step == 0 {
                worst_idp = worst_idp.max((r.inconclusive_prob - overlap).abs());
            }
        }
    }
    outcome(
        worst <= 1e-6 && worst_idp <= 1e-6,
        format!("440 cases, max |dP_I| = {worst:.2e}, equal-prior max |P_I - overlap| = {worst_idp:.2e}"),
    )
}

fn equal_p_concentration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0);
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let n = 1 + i % 6;
        let s = random::schmidt_state(&mut rng, n, 1e-3);
        let e = derived_states(&s).unwrap();
        let r = equal_p_solution(&e.reciprocal_states().unwrap()).unwrap();
        worst = worst.max((r.discrimination_prob - concentration_probability(&s)).abs());
    }
    outcome(worst <= 1e-9, format!("500 states, max |P - n min|c|^2| = {worst:.2e}"))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0A);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = random_n(&mut rng, &[2, 3]);
        let dim = n + rng.random_range(0..=1);
        let e = random::well_conditioned_ensemble(&mut rng, n, dim, 1e-3);
        let g = grid_oracle(&e, 1e-3).unwrap();
        let it = optimize_general(&e).unwrap();
        worst = worst.max((it.discrimination_prob - g.discrimination_prob).abs());
    }
    outcome(worst <= 2e-3, format!("200 ensembles, max |P_D - grid P_D| = {worst:.2e}"))
}

fn zero_error() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2E);
    let mut errors = 0;
    let mut shots = 0;
    for t in 0..50 {
        let n = rng.random_range(2..=5);
        let dim = n + rng.random_range(0..=2);
        let e = random::well_conditioned_ensemble(&mut rng, n, dim, 1e-3);
        let (m, _) = optimal_measurement(&e);
        let r = simulate(&m, &e, 1_000_000, 1000 + t).unwrap();
        errors += r.error_count;
        shots += r.shots;
    }
    outcome(errors == 0, format!("{shots} shots over 50 measurements, error_count = {errors}"))
}

fn completeness_biorthogonality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5C);
    let mut completeness: f64 = 0.0;
    let mut biorth: f64 = 0.0;
    let mut count = 0;
    for _ in 0..300 {
        let n = rng.random_range(1..=6);
        let dim = n + rng.random_range(0..=2);
        let e = random::well_conditioned_ensemble(&mut rng, n, dim, 1e-3);
        let recip = e.reciprocal_states().unwrap();
        biorth = biorth.max(recip.biorthogonality_residual(&e));
        // the optimum, plus an interior point
        let (m, p) = optimal_measurement(&e);
        completeness = completeness.max(m.completeness_residual());
        let inner: Vec<f64> = p.iter().map(|x| x * rng.random_range(0.0..1.0)).collect();
        let m = build_measurement(&e, &recip, &inner).unwrap();
        completeness = completeness.max(m.completeness_residual());
        count += 2;
    }
    for w in [[0.5, 0.3, 0.2].as_slice(), &[0.9, 0.1], &[0.4, 0.2, 0.2, 0.2]] {
        let s = SchmidtState::from_weights(w).unwrap();
        let e = derived_states(&s).unwrap();
        biorth = biorth.max(e.reciprocal_states().unwrap().biorthogonality_residual(&e));
        let r = apply_concentration(&s).unwrap();
        let mut total = &r.inconclusive_op.adjoint() * &r.inconclusive_op;
        total = &total + &(&r.orthogonalisation_op.adjoint() * &r.orthogonalisation_op);
        let id = usd_core::ComplexMatrix::identity(w.len());
        completeness = completeness.max((&total - &id).frobenius_norm());
        count += 1;
    }
    outcome(
        completeness <= 1e-9 && biorth <= 1e-9,
        format!(
            "{count} measurements, max completeness residual = {completeness:.2e}, max |<perp_j|psi_k>| = {biorth:.2e}"
        ),
    )
}

fn orthogonality_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x06);
    let mut worst_ortho: f64 = 0.0;
    for n in 1..=6 {
        let u = random::unitary(&mut rng, n + 1);
        let states = (0..n).map(|k| PureState::new(u.column(k)).unwrap()).collect();
        let e = StateEnsemble::new(states, random::priors(&mut rng, n)).unwrap();
        worst_ortho = worst_ortho.max((optimize_general(&e).unwrap().discrimination_prob - 1.0).abs());
    }
    let mut tested = 0;
    let mut max_p_d: f64 = 0.0;
    for i in 0..200 {
        let n = rng.random_range(2..=5);
        let e = if i % 2 == 0 {
            random::well_conditioned_ensemble(&mut rng, n, n + 1, 1e-3)
        } else {
            // nearly orthonormal: small perturbations of a basis
            let eps = rng.random_range(0.02..0.2);
            let states = (0..n)
                .map(|k| {
                    let mut v = random::unit_vector(&mut rng, n);
                    for z in v.iter_mut() {
                        *z *= eps;
                    }
                    v[k] += usd_core::C64::new(1.0, 0.0);
                    PureState::normalize(v).unwrap()
                })
                .collect();
            StateEnsemble::new(states, random::priors(&mut rng, n)).unwrap()
        };
        if e.gram().distance_from_identity() < 0.05 {
            continue;
        }
        tested += 1;
        max_p_d = max_p_d.max(optimize_general(&e).unwrap().discrimination_prob);
    }
    outcome(
        worst_ortho <= 1e-9 && max_p_d <= 1.0 - 1e-4 && tested >= 100,
        format!(
            "orthonormal max |P_D - 1| = {worst_ortho:.2e}; {tested} non-orthogonal ensembles, max P_D = {max_p_d:.6}"
        ),
    )
}

fn post_inconclusive_collapse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x17);
    let mut full_rank = 0;
    let mut worst_alignment: f64 = 0.0;
    for i in 0..100 {
        let n = if i < 30 { 2 } else { rng.random_range(3..=5) };
        let dim = n + rng.random_range(0..=1);
        let e = random::well_conditioned_ensemble(&mut rng, n, dim, 1e-3);
        let (m, _) = optimal_measurement(&e);
        let post = post_inconclusive_states(&m, &e).unwrap();
        if post.rank >= n {
            full_rank += 1;
        }
        if n == 2 {
            worst_alignment = worst_alignment.max(1.0 - post.alignment(0, 1));
        }
    }
    outcome(
        full_rank == 0 && worst_alignment <= 1e-9,
        format!("100 ensembles, full-rank cases = {full_rank}, n=2 max (1 - |cos|) = {worst_alignment:.2e}"),
    )
}

fn embedding_no_gain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA7);
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut min_gap = f64::INFINITY;
    for i in 0..20 {
        let e = if i == 0 {
            StateEnsemble::symmetric_pair(PI / 8.0, 0.5).unwrap()
        } else {
            let n = rng.random_range(2..=4);
            random::well_conditioned_ensemble(&mut rng, n, n, 1e-3)
        };
        let r = embedding_no_gain_check(&e, 2, 1000, 500 + i).unwrap();
        violations += r.violations;
        max_excess = max_excess.max(r.max_excess);
        min_gap = min_gap.min(r.min_lambda_gap);
        if i == 0 && r.max_embedded_p_d > 0.29289 + 1e-5 + 1e-9 {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!(
            "20 ensembles x 1000 embeddings, max excess P_D = {max_excess:.2e}, min lambda_S - lambda = {min_gap:.2e}"
        ),
    )
}

fn concentration_success() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x09);
    let mut worst_weight: f64 = 0.0;
    let mut worst_amp: f64 = 0.0;
    let mut worst_sigma: f64 = 0.0;
    for i in 0..100 {
        let s = if i == 0 {
            SchmidtState::from_weights(&[0.5, 0.3, 0.2]).unwrap()
        } else {
            {
                let n = rng.random_range(2..=6);
                random::schmidt_state(&mut rng, n, 1e-3)
            }
        };
        let n = s.n();
        let r = apply_concentration(&s).unwrap();
        for c in r.success_state.coeffs() {
            worst_weight = worst_weight.max((c.norm_sqr() - 1.0 / n as f64).abs());
        }
        let w = s.weights();
        let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
        for (j, wj) in w.iter().enumerate() {
            if *wj == min {
                worst_amp = worst_amp.max(r.failure_state.max_amplitude(j));
            }
        }
        let shots = 100_000;
        let sim = simulate_concentration(&s, shots, 77 + i).unwrap();
        let p = r.success_prob;
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        let dev = (sim.tallies[0][0] as f64 / shots as f64 - p).abs();
        worst_sigma = worst_sigma.max(if sigma > 0.0 {
            dev / sigma
        } else if dev == 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    outcome(
        worst_weight <= 1e-9 && worst_amp <= 1e-9 && worst_sigma <= 4.0,
        format!("100 states, max |w - 1/n| = {worst_weight:.2e}, max failure amplitude at argmin = {worst_amp:.2e}, max deviation = {worst_sigma:.2} sigma"),
    )
}

#[allow(clippy::approx_constant)]
fn bounds() -> Outcome {
    let helstrom = helstrom_bound(0.70711).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..=100 {
        let overlap = i as f64 / 100.0;
        worst = worst.max(error_tradeoff(overlap, overlap).unwrap().abs());
    }
    outcome(
        (helstrom - 0.14645).abs() <= 1e-5 && worst <= 1e-9,
        format!("Helstrom(0.70711) = {helstrom:.6}, max P_E at P_I = P_IDP = {worst:.2e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 two-state closed form", two_state_closed_form, Some(Duration::from_secs(30))),
        ("2 equal-P vs concentration", equal_p_concentration, Some(Duration::from_secs(10))),
        ("3 grid oracle equivalence", oracle_equivalence, Some(Duration::from_secs(300))),
        ("4 zero error in simulation", zero_error, None),
        ("5 completeness and biorthogonality", completeness_biorthogonality, None),
        ("6 orthogonality theorem", orthogonality_theorem, None),
        ("7 post-inconclusive collapse", post_inconclusive_collapse, None),
        ("8 embedding never helps", embedding_no_gain, None),
        ("9 concentration success state", concentration_success, None),
        ("10 bounds", bounds, None),
    ];
    let mut failures = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let passed = result.passed && in_time;
        if !passed {
            failures += 1;
        }
        let budget_note = budget.map_or(String::new(), |b| format!(" (budget {}s)", b.as_secs()));
        println!(
            "[{}] criterion {name}: {} [{:.2}s{budget_note}]",
            if passed { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
