use ccl_core::funcapprox::{approximate, ApproxOptions, RootOptions};
use proptest::prelude::*;

fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * s + v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_round_trip(
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..=31),
        lo in -5.0f64..5.0,
        width in 0.1f64..10.0,
        probes in prop::collection::vec(0.0f64..1.0, 100),
    ) {
        let hi = lo + width;
        let p = |x: f64| horner(&coeffs, (2.0 * x - lo - hi) / width);
        let pf = approximate(p, lo, hi, &[], &ApproxOptions::default()).unwrap();
        let scale = (0..200)
            .map(|i| p(lo + width * i as f64 / 199.0).abs())
            .fold(1.0, f64::max);
        for u in probes {
            let x = lo + u * width;
            let got = pf.evaluate(x).unwrap();
            prop_assert!((got - p(x)).abs() <= 1e-12 * scale, "x={x} got={got} want={}", p(x));
        }
    }

    #[test]
    fn roots_satisfy_the_function(
        a in 0.5f64..6.0,
        b in -1.0f64..1.0,
        c in -0.9f64..0.9,
    ) {
        let f = move |x: f64| (a * x).sin() + b * x * x * 0.1 + c;
        let pf = approximate(f, -4.0, 4.0, &[0.3], &ApproxOptions::default()).unwrap();
        let opts = RootOptions::default();
        for r in pf.roots() {
            let i = pf.piece_index(r).unwrap();
            let scale: f64 = pf.pieces()[i].iter().map(|v| v.abs()).sum();
            let v = pf.evaluate(r).unwrap();
            let v_left = if i > 0 { pf.eval_piece(i - 1, r) } else { v };
            prop_assert!(v.abs().min(v_left.abs()) <= opts.root_tol * scale.max(1.0), "r={r} v={v}");
        }
    }

    #[test]
    fn antiderivative_differentiates_back(
        a in 0.5f64..4.0,
        b in -2.0f64..2.0,
        probes in prop::collection::vec(0.01f64..0.99, 20),
    ) {
        let f = move |x: f64| (a * x).cos() * (1.0 + b * x) + if x < 1.0 { 0.0 } else { 1.0 };
        let pf = approximate(f, -2.0, 3.0, &[1.0], &ApproxOptions::default()).unwrap();
        let big = pf.antiderivative();
        let h = 1e-6;
        for u in probes {
            for (lo, hi) in [(-2.0, 1.0), (1.0, 3.0)] {
                let x: f64 = lo + u * (hi - lo);
                if (x - 1.0).abs() < 2.0 * h {
                    continue;
                }
                let fd = (big.evaluate(x + h).unwrap() - big.evaluate(x - h).unwrap()) / (2.0 * h);
                prop_assert!((fd - pf.evaluate(x).unwrap()).abs() <= 1e-4);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn cubic_roots_are_complete(
        r in prop::array::uniform3(-1.8f64..1.8),
        lead in prop::sample::select(vec![-3.0, -1.0, 0.5, 2.0]),
    ) {
        let mut want = r.to_vec();
        want.sort_by(f64::total_cmp);
        prop_assume!(want.windows(2).all(|w| w[1] - w[0] > 1e-2));
        let f = move |x: f64| lead * (x - r[0]) * (x - r[1]) * (x - r[2]);
        let pf = approximate(f, -2.0, 2.0, &[], &ApproxOptions::default()).unwrap();
        let got = pf.roots();
        prop_assert_eq!(got.len(), 3, "{:?} vs {:?}", got, want);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-10, "{:?} vs {:?}", got, want);
        }
    }
}
