use ccl_core::entropy::EntropySolver;
use ccl_core::pmp_bvp::*;
use ccl_core::problems::{self, exp_coefficient_guess, exp_coefficient_problem, exp_coefficient_solution, Model};
use proptest::prelude::*;

fn harmonic() -> (ControlProblem, std::sync::Arc<dyn CandidateEnumerator>) {
    match problems::by_name("harmonic_box").unwrap().model {
        Model::Control { problem, enumerator } => (problem, enumerator),
        Model::Convex(_) => unreachable!(),
    }
}

#[test]
fn exp_coefficient_point() {
    let prob = exp_coefficient_problem();
    let (x, t) = (0.3, 0.3);
    let c = exp_coefficient_guess(&prob, x, 1.0);
    let sol = solve_bvp(&prob, x, t, c.terminal, &*c.guess, &BvpOptions::default()).unwrap();
    assert!(sol.converged && sol.resolved);
    let expected = -(-3.0f64).exp() / (1.0 + 9.0 * (-3.0f64).exp());
    assert!((sol.initial_costate() - expected).abs() < 1e-10, "{}", sol.initial_costate());
    assert!(sol.residual < 1e-9);
}

#[test]
fn exp_coefficient_is_unique_across_guesses() {
    let prob = exp_coefficient_problem();
    for (x, t) in [(0.0, 0.1), (0.5, 0.35), (1.0, 0.6)] {
        let us: Vec<f64> = [0.5, 0.8, 1.0, 1.3, 1.8]
            .iter()
            .filter_map(|&s| {
                let c = exp_coefficient_guess(&prob, x, s);
                let sol = solve_bvp(&prob, x, t, c.terminal, &*c.guess, &BvpOptions::default()).unwrap();
                sol.converged.then(|| sol.initial_costate())
            })
            .collect();
        assert!(!us.is_empty());
        for u in &us {
            assert!((u - us[0]).abs() < 1e-9, "{us:?}");
            assert!((u - exp_coefficient_solution(x, t)).abs() < 1e-9);
        }
    }
}

#[test]
fn harmonic_trajectory_matches_closed_form() {
    let (prob, _) = harmonic();
    let (x, t) = (0.7f64, 1.2f64);
    let xx = x / t.cosh();
    // start from a perturbation of the exact trajectory
    let guess = |r: f64| {
        let (a, b) = harmonic_trajectory(x, t, xx, r);
        (a + 0.05 * r.sin(), b - 0.03)
    };
    let sol = solve_bvp(&prob, x, t, Terminal::Free, &guess, &BvpOptions::default()).unwrap();
    assert!(sol.converged);
    for k in 0..=10 {
        let r = t * k as f64 / 10.0;
        let (ex, ep) = harmonic_trajectory(x, t, xx, r);
        assert!((sol.trajectory_x(r) - ex).abs() < 1e-8);
        assert!((sol.trajectory_p(r) - ep).abs() < 1e-8);
    }
}

#[test]
fn harmonic_minimum_value_matches_closed_form() {
    let (prob, en) = harmonic();
    for (x, t) in [(0.0, 1.0), (-5.0, 0.5), (10.0, 0.1), (-0.5, 0.3), (-1.5, 1.8), (0.4, 1.8), (-0.9, 0.7)] {
        let s = minimum_value_point(&prob, &*en, x, t, &BvpOptions::default()).unwrap();
        let (u, w) = harmonic_closed_form(x, t);
        assert!((s.u - u).abs() < 1e-8, "u at ({x}, {t}): {} vs {u}", s.u);
        assert!((s.j - w).abs() < 1e-8, "cost at ({x}, {t}): {} vs {w}", s.j);
    }
    // the far-left point follows the outer branch, p(0) = x csch t − X coth t evaluated at r = 0
    let s = minimum_value_point(&prob, &*en, -5.0, 0.5, &BvpOptions::default()).unwrap();
    assert!((s.u + 5.0 * 0.5f64.tanh()).abs() < 1e-8);
}

#[test]
fn hamiltonian_is_conserved() {
    let (h6, _) = harmonic();
    let h7 = exp_coefficient_problem();
    let x = 0.4;
    let t = 0.9f64;
    let xx = x / t.cosh();
    let s6 = solve_bvp(&h6, x, t, Terminal::Free, &|r| harmonic_trajectory(x, t, xx, r), &BvpOptions::default()).unwrap();
    let c = exp_coefficient_guess(&h7, 0.2, 1.0);
    let s7 = solve_bvp(&h7, 0.2, 0.5, c.terminal, &*c.guess, &BvpOptions::default()).unwrap();
    for (prob, sol) in [(&h6, &s6), (&h7, &s7)] {
        assert!(sol.converged);
        let hs: Vec<f64> = sol
            .xs
            .iter()
            .zip(&sol.ps)
            .map(|(&x, &p)| prob.hamiltonian(x, p, prob.alpha_star(x, p)))
            .collect();
        for h in &hs {
            assert!((h - hs[0]).abs() < 1e-8, "{hs:?}");
        }
    }
}

#[test]
fn costate_is_value_gradient() {
    let (h6, en6) = harmonic();
    let h7 = exp_coefficient_problem();
    let en7 = |prob: &ControlProblem, x: f64, _t: f64| vec![exp_coefficient_guess(prob, x, 1.0)];
    let opts = BvpOptions::default();
    let cases: [(&ControlProblem, &dyn CandidateEnumerator, f64, f64); 4] = [
        (&h6, &*en6, 1.3, 0.8),
        (&h6, &*en6, -0.5, 0.3),
        (&h7, &en7, 0.3, 0.3),
        (&h7, &en7, 0.8, 0.5),
    ];
    for (prob, en, x, t) in cases {
        let s = minimum_value_point(prob, en, x, t, &opts).unwrap();
        let h = 1e-5;
        let wp = minimum_value_point(prob, en, x + h, t, &opts).unwrap().j;
        let wm = minimum_value_point(prob, en, x - h, t, &opts).unwrap().j;
        let dw = (wp - wm) / (2.0 * h);
        assert!((s.u - dw).abs() < 1e-4, "({x}, {t}): {} vs {dw}", s.u);
    }
}

#[test]
fn agrees_with_entropy_solver_for_burgers() {
    let spec = problems::by_name("burgers_sine").unwrap();
    let init = spec.init.clone();
    let prob = ControlProblem::new(
        |_, p, a| p * a + 0.5 * a * a,
        |_, _, _| 0.0,
        |_, p| -p,
        |_, a| 0.5 * a * a,
        init.clone(),
        0.1,
    );
    let entropy = EntropySolver::new(spec.convex_flux().unwrap().clone(), init.clone()).unwrap();
    let en = move |_: &ControlProblem, x: f64, _t: f64| {
        let p = init.g(x);
        vec![BvpCandidate {
            terminal: Terminal::Free,
            guess: Box::new(move |r| (x - p * r, p)),
        }]
    };
    for x in [0.0, 0.37, 1.0, 1.5, 2.9, 3.6] {
        let a = minimum_value_point(&prob, &en, x, 0.1, &BvpOptions::default()).unwrap();
        let b = entropy.solve_point(x, 0.1).unwrap();
        assert!((a.u - b.u).abs() < 1e-8, "x = {x}: {} vs {}", a.u, b.u);
    }
}

#[test]
fn zero_horizon_is_rejected() {
    let prob = exp_coefficient_problem();
    let r = solve_bvp(&prob, 0.0, 0.0, Terminal::Free, &|_| (0.0, 0.0), &BvpOptions::default());
    assert_eq!(r.unwrap_err(), BvpError::NonPositiveTime(0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn envelope_and_minimality(x in -1.0f64..1.0, p in -2.0f64..2.0) {
        let (h6, _) = harmonic();
        let h7 = exp_coefficient_problem();
        for prob in [&h6, &h7] {
            let d = 1e-6;
            let dfdp = (prob.flux(x, p + d) - prob.flux(x, p - d)) / (2.0 * d);
            let a = prob.alpha_star(x, p);
            prop_assert!((dfdp + a).abs() <= 1e-5 * (1.0 + a.abs()));
            let h = prob.hamiltonian(x, p, a);
            prop_assert!(h <= prob.hamiltonian(x, p, a + 1e-3));
            prop_assert!(h <= prob.hamiltonian(x, p, a - 1e-3));
        }
    }
}
