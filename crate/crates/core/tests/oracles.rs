//! Simulation paths checked against closed-form expansions written out
//! independently of the blockwise beamsplitter.

use carburettor::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Coherent amplitudes qₙ = e^{−|α|²/2} αⁿ / √(n!) by direct factorials.
fn q(alpha: f64, n: usize) -> f64 {
    (-alpha * alpha / 2.0).exp() * alpha.powi(n as i32) / factorial(n).sqrt()
}

/// Joint output for |α⟩|1⟩ from the double sum over n and k with the A₁, A₂
/// prefactors, returned as a dense (j, k) lookup.
fn joint_output_oracle(alpha: f64, cutoff: usize, t: f64, r: f64, phi_t: f64, phi_r: f64) -> Vec<Vec<Complex64>> {
    let size = cutoff + 2;
    let mut out = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    let i = Complex64::new(0.0, 1.0);
    for n in 0..=cutoff {
        let nf = n as f64;
        for k in 0..=n {
            let kf = k as f64;
            let pre = q(alpha, n) * factorial(n).sqrt() * (-1f64).powi(k as i32) / (factorial(k) * factorial(n - k));
            let a1 = t.powi((n - k) as i32)
                * r.powi(k as i32 + 1)
                * (i * ((nf - kf) * phi_t - (kf - 1.0) * phi_r)).exp();
            let a2 = t.powi((n - k) as i32 + 1)
                * r.powi(k as i32)
                * (i * ((nf - kf - 1.0) * phi_t - kf * phi_r)).exp();
            out[n - k + 1][k] += a1 * pre * (factorial(n - k + 1) * factorial(k)).sqrt();
            out[n - k][k + 1] += a2 * pre * (factorial(n - k) * factorial(k + 1)).sqrt();
        }
    }
    out
}

#[test]
fn joint_output_matches_double_sum() {
    let default_phases = (0.0, std::f64::consts::PI);
    for alpha in [0.5, 1.0, 2.0] {
        let cutoff = choose_cutoff(alpha * alpha, &CutoffPolicy::default());
        let input = tensor(
            &make_coherent(Complex64::new(alpha, 0.0), cutoff).unwrap(),
            &make_fock(1, 1).unwrap(),
        );
        for refl in [0.3, 0.5, 0.869] {
            for (phi_t, phi_r) in [default_phases, (0.4, -1.1)] {
                let (t, r) = ((1.0f64 - refl).sqrt(), refl.sqrt());
                let params = BeamsplitterParams::new(t, r, phi_t, phi_r).unwrap();
                let sim = beamsplitter(&input, &params);
                let oracle = joint_output_oracle(alpha, cutoff, t, r, phi_t, phi_r);
                for (j, row) in oracle.iter().enumerate() {
                    for (k, expected) in row.iter().enumerate() {
                        let d = (sim.amplitude(j, k) - expected).norm();
                        assert!(d < 1e-10, "alpha {alpha}, R {refl}, ({j}, {k}): off by {d:e}");
                    }
                }
            }
        }
    }
}

#[test]
fn heralded_state_matches_conditional_formula() {
    for alpha in [0.5, 1.0, 2.0, 3.0] {
        for refl in [0.2, 0.5, 0.8] {
            let out = run_single_bs(Complex64::new(alpha, 0.0), refl, 1.0).unwrap();
            let (t, r) = ((1.0f64 - refl).sqrt(), refl.sqrt());
            let p0: f64 = (0..150)
                .map(|n| q(alpha, n).powi(2) * t * t * r.powi(2 * n as i32) * (n + 1) as f64)
                .sum();
            assert!((out.p_success - p0).abs() < 1e-10);
            let e = out.output.unwrap();
            assert_eq!(e.len(), 1);
            let state = &e.branches()[0].state;
            assert_eq!(state.amplitude(0), Complex64::new(0.0, 0.0));
            for n in 0..40 {
                let expected = q(alpha, n) * t * r.powi(n as i32) * ((n + 1) as f64).sqrt() / p0.sqrt();
                let d = (state.amplitude(n + 1) - expected).norm();
                assert!(d < 1e-10, "alpha {alpha}, R {refl}, n {n}: {d:e}");
            }
        }
    }
}

#[test]
fn second_stage_matches_closed_form() {
    let alpha = 2.0;
    let refl = optimal_reflectivity(4.0);
    for (r1_sq, r2_sq) in [(refl, refl), (0.4, 0.7)] {
        let state = cascade_second_stage_state(Complex64::new(alpha, 0.0), r1_sq, r2_sq).unwrap();
        let (t1, r1) = ((1.0f64 - r1_sq).sqrt(), r1_sq.sqrt());
        let (t2, r2) = ((1.0f64 - r2_sq).sqrt(), r2_sq.sqrt());
        assert_eq!(state.amplitude(0), Complex64::new(0.0, 0.0));
        for n in 0..40 {
            let nf = n as f64;
            let expected =
                q(alpha, n) * r1.powi(n as i32 - 1) * (nf * t1 * t1 - r1 * r1) * t2 * r2.powi(n as i32) * (nf + 1.0).sqrt();
            let d = (state.amplitude(n + 1) - expected).norm();
            assert!(d < 1e-10, "({r1_sq}, {r2_sq}) n {n}: {d:e}");
        }
        // squared norm is the joint probability of failing once and recovering
        let out = run_cascade(Complex64::new(alpha, 0.0), r1_sq, r2_sq, 1.0).unwrap();
        assert!((state.norm_sqr() - out.p1_1 * out.p2_0).abs() < 1e-12);
    }
}

#[test]
fn count_outcomes_are_complete() {
    for alpha in [0.0, 0.7, 2.0] {
        for refl in [0.1, 0.5, 0.95] {
            let setup = AdditionSetup::new(Complex64::new(alpha, 0.0)).unwrap();
            let joint = setup.joint_output(refl).unwrap();
            let dist = watched_distribution(&joint, Mode::First).unwrap();
            let p0 = project_counts(&joint, Mode::First, 0).unwrap().probability;
            let p1 = failed_branch(Complex64::new(alpha, 0.0), refl).unwrap().probability;
            let rest: f64 = dist[2..].iter().sum();
            assert!((p0 + p1 + rest - 1.0).abs() < 1e-12);
            let all: f64 = (0..dist.len())
                .map(|m| project_counts(&joint, Mode::First, m).unwrap().probability)
                .sum();
            assert!((all - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn failed_state_hole_near_predicted_photon_number() {
    for alpha in [2.0f64, 3.0] {
        let refl = optimal_reflectivity(alpha * alpha);
        let state = failed_branch(Complex64::new(alpha, 0.0), refl).unwrap().into_state().unwrap();
        let p = photon_distribution(&state).unwrap();
        let hole = (1..p.len() - 1)
            .find(|&n| p[n] < p[n - 1] && p[n] < p[n + 1])
            .expect("interior minimum");
        let predicted = refl / (1.0 - refl);
        assert!((hole as f64 - predicted).abs() <= 1.0, "alpha {alpha}: {hole} vs {predicted}");
    }
}

#[test]
fn single_bs_probability_matches_closed_form_grid() {
    for alpha in [0.5f64, 1.0, 2.0, 3.0] {
        let setup = AdditionSetup::new(Complex64::new(alpha, 0.0)).unwrap();
        for i in 1..=9 {
            let refl = i as f64 / 10.0;
            let p = setup.run(refl, 1.0).unwrap().p_success;
            assert!((p - closed_form_p0(alpha * alpha, refl)).abs() < 1e-10);
        }
    }
}

#[test]
fn carburettor_limit_is_monotone() {
    let values: Vec<f64> = [4.0, 9.0, 25.0, 100.0]
        .iter()
        .map(|&a| closed_form_p0(a, optimal_reflectivity(a)))
        .collect();
    for w in values.windows(2) {
        assert!(w[1] < w[0]);
    }
    assert!(values.iter().all(|&p| p > 1.0 / std::f64::consts::E));
}

#[test]
fn inefficient_detector_raises_zero_count_probability() {
    let setup = AdditionSetup::new(Complex64::new(1.5, 0.0)).unwrap();
    let mut prev = 0.0;
    for eta in [1.0, 0.8, 0.6, 0.4, 0.0] {
        let p = setup.run(0.869, eta).unwrap().p_success;
        assert!(p >= prev);
        prev = p;
    }
    assert!((prev - 1.0).abs() < 1e-12);
}

fn random_state() -> impl Strategy<Value = PureState64> {
    (0usize..8).prop_flat_map(|cutoff| {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), cutoff + 1).prop_filter_map("nonzero", |raw| {
            let norm = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            (norm > 1e-6).then(|| {
                PureState::new(raw.iter().map(|(a, b)| Complex64::new(a / norm, b / norm)).collect()).unwrap()
            })
        })
    })
}

proptest! {
    #[test]
    fn fidelity_symmetric_and_scale_invariant(
        a in random_state(),
        b in random_state(),
        re in -2.0f64..2.0,
        im in -2.0f64..2.0,
    ) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let f_ab = fidelity(&a, &b).unwrap();
        prop_assert!((f_ab - fidelity(&b, &a).unwrap()).abs() < 1e-12);
        let scaled = a.scaled(Complex64::new(re, im));
        prop_assert!((fidelity(&scaled, &b).unwrap() - f_ab).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f_ab));
    }

    #[test]
    fn coherent_populations_are_poisson(re in -6.0f64..6.0, im in -6.0f64..6.0) {
        let alpha = Complex64::new(re, im);
        let mean = alpha.norm_sqr();
        let p = photon_distribution(&coherent(alpha).unwrap()).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mut poisson = (-mean).exp();
        for (n, pn) in p.iter().enumerate() {
            prop_assert!((pn - poisson).abs() < 1e-12, "n = {}", n);
            poisson *= mean / (n + 1) as f64;
        }
    }

    #[test]
    fn povm_probability_monotone_in_eta(
        alpha in 0.0f64..2.5,
        refl in 0.0f64..1.0,
        eta_lo in 0.0f64..1.0,
        eta_hi in 0.0f64..1.0,
    ) {
        let (lo, hi) = if eta_lo <= eta_hi { (eta_lo, eta_hi) } else { (eta_hi, eta_lo) };
        let joint = AdditionSetup::new(Complex64::new(alpha, 0.0)).unwrap().joint_output(refl).unwrap();
        let p = |eta: f64| {
            condition_zero_counts_inefficient(&joint, Mode::First, &DetectorModel::new(eta).unwrap())
                .unwrap()
                .probability
        };
        let ideal = p(1.0);
        prop_assert!(p(lo) + 1e-12 >= p(hi));
        prop_assert!(p(hi) + 1e-12 >= ideal);
        prop_assert!(p(lo) <= 1.0 + 1e-12);
    }

    #[test]
    fn povm_branches_reassemble_probability(
        alpha in 0.0f64..2.5,
        refl in 0.0f64..1.0,
        eta in 0.0f64..1.0,
    ) {
        let joint = AdditionSetup::new(Complex64::new(alpha, 0.0)).unwrap().joint_output(refl).unwrap();
        let dist = watched_distribution(&joint, Mode::First).unwrap();
        let expected: f64 = dist.iter().enumerate().map(|(k, pk)| (1.0 - eta).powi(k as i32) * pk).sum();
        let out = condition_zero_counts_inefficient(&joint, Mode::First, &DetectorModel::new(eta).unwrap()).unwrap();
        prop_assert!((out.probability - expected).abs() < 1e-12);
        if let Some(e) = out.state {
            let wsum: f64 = e.branches().iter().map(|b| b.weight).sum();
            prop_assert!((wsum - 1.0).abs() < 1e-12);
            for b in e.branches() {
                prop_assert!((b.state.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn accepted_output_has_no_vacuum(alpha in 0.0f64..4.0, refl in 0.0f64..0.999) {
        let out = run_single_bs(Complex64::new(alpha, 0.0), refl, 1.0).unwrap();
        let e = out.output.unwrap();
        prop_assert_eq!(e.branches()[0].state.amplitude(0), Complex64::new(0.0, 0.0));
    }
}
