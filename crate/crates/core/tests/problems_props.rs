use ccl_core::problems::{self, oracle, Grid, Rect};

fn fd(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-6 * (1.0 + x.abs());
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `u_t + ∂_x F(x, u(x, t))` by central differences.
fn residual(u: &dyn Fn(f64, f64) -> f64, flux: &dyn Fn(f64, f64) -> f64, x: f64, t: f64) -> f64 {
    fd(|s| u(x, s), t) + fd(|y| flux(y, u(y, t)), x)
}

#[test]
fn analytic_solutions_satisfy_the_pde() {
    let box_u = |x: f64, t: f64| problems::box_solution(x, t);
    let burgers = |_: f64, u: f64| 0.5 * u * u;
    for (x, t) in [(0.3, 1.0), (1.2, 1.0), (-0.5, 2.0), (1.0, 3.0), (3.0, 3.0)] {
        assert!(residual(&box_u, &burgers, x, t).abs() < 1e-6, "box at ({x}, {t})");
    }

    let harmonic_u = |x: f64, t: f64| ccl_core::pmp_bvp::harmonic_closed_form(x, t).0;
    let harmonic_f = |x: f64, u: f64| 0.5 * (u * u - x * x);
    for (x, t) in [(2.0, 0.5), (-3.0, 0.4), (-0.6, 0.2), (1.0, 1.5)] {
        assert!(residual(&harmonic_u, &harmonic_f, x, t).abs() < 1e-6, "harmonic at ({x}, {t})");
    }

    let exp_u = problems::exp_coefficient_solution;
    let exp_f = |x: f64, u: f64| (1.0 + u * (10.0 * x).exp()) * u;
    for (x, t) in [(0.0, 0.1), (0.4, 0.3), (1.0, 0.6)] {
        let scale = exp_u(x, t).abs() * 10.0 + 1e-300;
        assert!(residual(&exp_u, &exp_f, x, t).abs() < 1e-6 * scale.max(1.0), "exp at ({x}, {t})");
    }
}

#[test]
fn traffic_density_round_trip() {
    let spec = problems::by_name("lwr_traffic").unwrap();
    let tr = spec.transform.unwrap();
    assert_eq!(tr.label(), "q");
    let solver = spec.solver().unwrap();
    let grid = Grid {
        rect: Rect {
            x: (-35.0, 35.0),
            t: (0.0, 4.0),
        },
        nx: 29,
        nt: 5,
    };
    for s in solver.solve_grid(&grid.xs(), &grid.ts(), true).unwrap() {
        let q = tr.apply(s.u);
        assert!((0.0..=1.0).contains(&q), "q = {q} at ({}, {})", s.x, s.t);
    }
}

#[test]
fn sine_oracle_matches_implicit_characteristics_pre_shock() {
    let spec = problems::by_name("burgers_sine").unwrap();
    let solver = spec.solver().unwrap();
    for t in [0.02, 0.05, 0.1] {
        for k in 0..=20 {
            let x = 4.0 * k as f64 / 20.0;
            // safeguarded Newton on u = g(x − ut)
            let g = |y: f64| 1.0 + (std::f64::consts::PI * y).sin();
            let mut u: f64 = g(x);
            for _ in 0..60 {
                let r = u - g(x - u * t);
                let d = 1.0 + t * std::f64::consts::PI * (std::f64::consts::PI * (x - u * t)).cos();
                u = (u - r / d).clamp(0.0, 2.0);
            }
            let o = oracle::burgers_sine(x, t);
            assert_eq!(o.roots, 1);
            assert!((o.u - u).abs() < 1e-12);
            assert!((solver.solve_point(x, t).unwrap().u - u).abs() < 1e-10);
        }
    }
}

#[test]
fn reports_exclude_shock_points() {
    let spec = problems::by_name("burgers_box").unwrap();
    let solver = spec.solver().unwrap();
    // x = 1.5 sits exactly on the shock at t = 1
    let grid = Grid {
        rect: Rect {
            x: (1.0, 2.0),
            t: (1.0, 1.0),
        },
        nx: 3,
        nt: 1,
    };
    let r = problems::analytic_error(&spec, &solver, &grid, false).unwrap();
    assert_eq!(r.excluded_points, 1);
    assert_eq!(r.points, 2);
    assert!(r.max_abs < 1e-14);
    let nwave = problems::by_name("burgers_nwave").unwrap();
    assert!(problems::analytic_error(&nwave, &nwave.solver().unwrap(), &grid, false).is_err());
}
