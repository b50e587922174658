use ccl_core::legendre::{check_duality, lagrangian_along_optimal, legendre_transform, ConvexFlux};
use proptest::prelude::*;

fn quartic() -> ConvexFlux {
    ConvexFlux::new(|p| p.powi(4), |p| 4.0 * p.powi(3), (-1.5, 1.5))
}

fn three_halves() -> ConvexFlux {
    ConvexFlux::new(
        |p: f64| p.abs().powf(1.5),
        |p: f64| 1.5 * p.signum() * p.abs().sqrt(),
        (-2.0, 2.0),
    )
    .with_hints(vec![0.0])
}

fn lwr() -> ConvexFlux {
    ConvexFlux::new(|p| p * (1.0 + p), |p| 1.0 + 2.0 * p, (-1.2, 0.2))
}

fn burgers() -> ConvexFlux {
    ConvexFlux::new(|p| 0.5 * p * p, |p| p, (-2.0, 2.0))
}

#[test]
fn quartic_double_transform() {
    let r = check_duality(&quartic(), 61).unwrap();
    assert!(r.max_deviation <= 1e-6, "{r:?}");
}

#[test]
fn three_halves_double_transform() {
    let r = check_duality(&three_halves(), 61).unwrap();
    assert!(r.max_deviation <= 1e-6, "{r:?}");
}

#[test]
fn lwr_double_transform() {
    let r = check_duality(&lwr(), 61).unwrap();
    assert!(r.max_deviation <= 1e-6, "{r:?}");
}

#[test]
fn quartic_conjugate_matches_closed_form() {
    let f = quartic();
    for q in [-3.0, -0.5, 0.0, 0.7, 4.0] {
        let want = 3.0 * (f64::abs(q) / 4.0).powf(4.0 / 3.0);
        let got = f.conjugate(q).unwrap();
        assert!((got.value - want).abs() < 1e-12, "q={q}");
    }
}

#[test]
fn flux_validation_passes_on_catalog_shapes() {
    for f in [quartic(), three_halves(), lwr(), burgers()] {
        assert!(f.validate(101).is_empty(), "{f:?}: {:?}", f.validate(101));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn young_inequality(p in -1.5f64..1.5, q in -4.0f64..4.0) {
        for f in [quartic(), three_halves(), lwr(), burgers()] {
            let fs = f.conjugate(q).unwrap().value;
            prop_assert!(p * q <= f.f(p) + fs + 1e-9);
        }
    }

    #[test]
    fn conjugate_is_midpoint_convex(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        for f in [quartic(), three_halves(), lwr(), burgers()] {
            let mid = f.conjugate(0.5 * (a + b)).unwrap().value;
            let avg = 0.5 * (f.conjugate(a).unwrap().value + f.conjugate(b).unwrap().value);
            prop_assert!(mid <= avg + 1e-10);
        }
    }

    #[test]
    fn lagrangian_identity_matches_transform(p in -1.0f64..1.0) {
        for f in [quartic(), three_halves(), lwr(), burgers()] {
            let reflected = |lam: f64| f.f(-lam);
            let alpha = -f.fprime(p);
            let t = legendre_transform(&reflected, alpha, (-6.0, 6.0), &[0.0]).unwrap();
            prop_assert!((t.value - lagrangian_along_optimal(&f, p)).abs() <= 1e-8);
        }
    }
}
