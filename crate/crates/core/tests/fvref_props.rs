use ccl_core::fvref::{FvGrid, Limiter};
use ccl_core::legendre::ConvexFlux;
use proptest::prelude::*;

fn burgers() -> ConvexFlux {
    ConvexFlux::new(|p| 0.5 * p * p, |p| p, (-3.0, 3.0))
}

fn advection() -> ConvexFlux {
    ConvexFlux::new(|p| p, |_| 1.0, (-3.0, 3.0))
}

#[test]
fn constant_state_is_preserved() {
    for c in [-1.3, 0.0, 0.7] {
        let mut g = FvGrid::new(-1.0, 1.0, vec![c; 20]).unwrap();
        g.run_until(&burgers(), 0.5, Limiter::VanLeer).unwrap();
        assert!(g.cell_averages().iter().all(|&v| v == c));
        assert_eq!(g.time(), 0.5);
    }
}

#[test]
fn advection_step_matches_hand_stencil() {
    let q = [0.0, 0.1, 0.5, 0.6, 0.4];
    let mut g = FvGrid::new(0.0, 5.0, q.to_vec()).unwrap();
    let nu = 0.6;
    g.step(&advection(), nu, Limiter::VanLeer).unwrap();

    // ghost-extended data and the upwind-plus-limited-correction flux for unit speed
    let ext = [q[0], q[0], q[0], q[1], q[2], q[3], q[4], q[4]];
    let phi = |t: f64| (t + t.abs()) / (1.0 + t.abs());
    let flux = |k: usize| {
        let w = ext[k] - ext[k - 1];
        let theta = if w != 0.0 { (ext[k - 1] - ext[k - 2]) / w } else { 0.0 };
        ext[k - 1] + 0.5 * (1.0 - nu) * phi(theta) * w
    };
    for i in 0..5 {
        let expected = q[i] - nu * (flux(i + 3) - flux(i + 2));
        assert!((g.cell_averages()[i] - expected).abs() < 1e-15, "cell {i}");
    }
}

#[test]
fn upwind_unit_courant_is_exact_shift() {
    let q: Vec<f64> = (0..12).map(|i| ((i as f64) * 0.7).sin()).collect();
    let mut g = FvGrid::new(0.0, 12.0, q.clone()).unwrap().with_cfl(1.0);
    g.step(&advection(), 1.0, Limiter::Upwind).unwrap();
    assert_eq!(g.cell_averages()[0], q[0]);
    for i in 1..12 {
        assert!((g.cell_averages()[i] - q[i - 1]).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn conservation_through_boundaries(data in prop::collection::vec(-1.5f64..1.5, 4..40), frac in 0.1f64..1.0) {
        let mut g = FvGrid::new(-2.0, 2.0, data).unwrap();
        let flux = burgers();
        for _ in 0..5 {
            let before = g.total();
            let dt = frac * g.stable_dt(&flux).min(1.0);
            let r = g.step(&flux, dt, Limiter::VanLeer).unwrap();
            let expected = before - dt * (r.flux_right - r.flux_left);
            prop_assert!((g.total() - expected).abs() <= 1e-12 * (1.0 + before.abs()));
        }
    }

    #[test]
    fn monotone_data_is_tvd(mut data in prop::collection::vec(-1.5f64..1.5, 4..40), decreasing: bool) {
        data.sort_by(f64::total_cmp);
        if decreasing {
            data.reverse();
        }
        let mut g = FvGrid::new(0.0, 1.0, data).unwrap();
        let flux = burgers();
        for _ in 0..10 {
            let tv = g.total_variation();
            let dt = g.stable_dt(&flux).min(1.0);
            g.step(&flux, dt, Limiter::VanLeer).unwrap();
            prop_assert!(g.total_variation() <= tv + 1e-10);
        }
    }
}
