use std::f64::consts::PI;

use cdddkit::bsvy::*;
use cdddkit::cddd::LambdaGrid;
use cdddkit::funcspace::*;
use cdddkit::grid::{GridWindow, Shift};
use cdddkit::report::Verdict;
use cdddkit::weights::{AxisBox, Weight};
use cdddkit::Error;
use proptest::prelude::*;

/// `∫_{S^{n−1}} |θ_1|^q dθ` without Gamma functions.
fn sphere_moment(n: usize, q: f64) -> f64 {
    match n {
        1 => 2.0,
        // periodic midpoint rule; the |cos| kinks limit it to O(h²)
        2 => {
            let m = 1 << 18;
            let h = 2.0 * PI / m as f64;
            (0..m).map(|k| ((k as f64 + 0.5) * h).cos().abs().powf(q)).sum::<f64>() * h
        }
        3 => 4.0 * PI / (q + 1.0),
        _ => unreachable!(),
    }
}

fn win() -> AxisBox {
    AxisBox::interval(-1.0, 1.0).unwrap()
}

#[test]
fn lower_constant_closed_forms() {
    assert!((lower_constant(1, 1.0, 1.0) - 2.0).abs() < 1e-12);
    assert!((lower_constant(1, 1.0, -2.0) - 1.0).abs() < 1e-12);
    assert!((lower_constant(2, 2.0, 1.0) - PI.sqrt()).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn lower_constant_matches_sphere_moments(n in 1usize..=3, q in 1.0f64..4.0, g in 0.1f64..5.0, neg in any::<bool>()) {
        let gamma = if neg { -g } else { g };
        let oracle = (sphere_moment(n, q) / g).powf(1.0 / q);
        let v = lower_constant(n, q, gamma);
        prop_assert!((v - oracle).abs() <= 1e-9 * oracle, "{v} vs {oracle}");
    }

    #[test]
    fn rescaling_f_and_lambda_together_leaves_inner_integrals_fixed(
        c in 0.1f64..10.0,
        x in -0.9f64..0.9,
        lambda in 0.5f64..50.0,
    ) {
        let cfg = BsvyConfig::new(1.0, 1.0, 1.0, Weight::Constant(1.0), win()).unwrap();
        let f = tent(1, 1.0, 1.0, vec![0.0]).unwrap();
        let cf = tent(1, c, 1.0, vec![0.0]).unwrap();
        let a = inner_integral(&f, &[x], lambda, &cfg).unwrap();
        let b = inner_integral(&cf, &[x], c * lambda, &cfg).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-9 * a.value.max(1e-300));
    }

    #[test]
    fn split_never_misses_a_pair(
        which in 0usize..5,
        x in -2.0f64..2.0,
        d in 1e-3f64..3.0,
        sign in any::<bool>(),
        lambda in 1e-3f64..1e2,
        s in -3.0f64..2.0,
    ) {
        let f = match which {
            0 => tent(1, 1.0, 1.0, vec![0.2]).unwrap(),
            1 => linear_ramp(1, 1.5, 1.0).unwrap(),
            2 => smoothed_indicator(1, 0.5, 0.5, vec![0.0]).unwrap(),
            3 => sharp1_bump().unwrap(),
            _ => sharp2_fdelta(0.5).unwrap(),
        };
        let y = if sign { x + d } else { x - d };
        let (e, e1, e2) = split_and_mean_sets(&f, &[x], &[y], lambda, s).unwrap();
        prop_assert!(!e || e1 || e2);
    }
}

#[test]
fn membership_predicate() {
    let c = constant(1, 4.0).unwrap();
    assert!(!in_level_set(&c, &[0.0], &[1.0], 1e-12, 0.5).unwrap());
    assert!(in_level_set(&c, &[0.5], &[0.5], 1.0, 0.5).is_err());
    let f = linear_ramp(1, 1.0, 10.0).unwrap();
    // |x − y| / |x − y|^{2} = 1/|x − y|
    assert!(in_level_set(&f, &[0.0], &[0.25], 3.9, 1.0).unwrap());
    assert!(!in_level_set(&f, &[0.0], &[0.25], 4.1, 1.0).unwrap());
}

#[test]
fn inner_integrals_of_the_ramp() {
    let f = linear_ramp(1, 1.0, 10.0).unwrap();
    let pos = BsvyConfig::new(1.0, 1.0, 1.0, Weight::Constant(1.0), win()).unwrap();
    let neg = BsvyConfig::new(1.0, 1.0, -2.0, Weight::Constant(1.0), win()).unwrap();
    for x in [-0.8, 0.0, 0.3] {
        for lambda in [1e2, 1e3] {
            let v = inner_integral(&f, &[x], lambda, &pos).unwrap();
            assert!(!v.truncated);
            assert!((v.value - 2.0 / lambda).abs() < 1e-9 / lambda);
        }
        for lambda in [1e-4, 1e-3] {
            let v = inner_integral(&f, &[x], lambda, &neg).unwrap();
            assert!(!v.truncated);
            assert!((v.value - 1.0 / lambda).abs() < 1e-9 / lambda);
        }
    }
    let c = constant(1, 1.0).unwrap();
    assert_eq!(inner_integral(&c, &[0.0], 1.0, &pos).unwrap().value, 0.0);
    let prof = bsvy_functional(&pos, &c).unwrap();
    assert!(prof.values.iter().all(|v| *v == 0.0));
}

#[test]
fn ramp_functional_reaches_the_lower_constant() {
    let f = linear_ramp(1, 1.0, 10.0).unwrap();
    let cfg = BsvyConfig::new(1.0, 1.0, 1.0, Weight::Constant(1.0), win())
        .unwrap()
        .with_lambdas(LambdaGrid::fixed(1e2, 1e4, 5).unwrap());
    let (rec, prof) = verify_bsvy(&cfg, &f, 0.02, 100.0).unwrap();
    assert_eq!(rec.verdict, Verdict::Pass);
    for v in &prof.values {
        assert!((v / 2.0 - 2.0).abs() < 1e-6);
    }
}

#[test]
fn zero_gamma_and_bad_scales_are_rejected() {
    let e = BsvyConfig::new(1.0, 1.0, 0.0, Weight::Constant(1.0), win()).unwrap_err();
    assert!(matches!(e, Error::Admissibility(_)));
    assert!(e.to_string().contains("Gamma_{p,q}"));
    assert!(BsvyConfig::exploratory(2.0, 2.0, 0.0, Weight::Constant(1.0), win()).is_err());
    // p = 1 excludes γ ∈ [−q, 0)
    assert!(BsvyConfig::new(1.0, 1.0, -0.5, Weight::Constant(1.0), win()).is_err());
    assert!(BsvyConfig::new(2.0, 1.0, -0.5, Weight::Constant(1.0), win()).is_ok());
    assert!(scale_condition(2, 1.0, 1.5));
    assert!(!scale_condition(2, 1.0, 4.0));
    let exp = BsvyConfig::exploratory(1.0, 1.0, -0.5, Weight::Constant(1.0), win()).unwrap();
    assert!(!exp.admissible());
}

#[test]
fn ball_means_of_ramps() {
    let f = linear_ramp(1, 2.0, 10.0).unwrap();
    for (c, r) in [(0.0, 1.0), (-3.0, 0.5), (4.0, 2.0)] {
        assert!((ball_mean(&f, &[c], r).unwrap() - f.value(&[c])).abs() < 1e-12);
    }
    // in the plane the ramp is 2|x|, whose mean over B(0, r) is 4r/3
    let g = linear_ramp(2, 2.0, 10.0).unwrap();
    let m = ball_mean(&g, &[0.0, 0.0], 0.75).unwrap();
    assert!((m - 1.0).abs() < 1e-12);
    // the second half of the split never fires for a linear function
    for k in 0..50 {
        let x = -2.0 + 0.08 * k as f64;
        let (_, _, e2) = split_and_mean_sets(&f, &[x], &[x + 0.7], 0.5, 0.0).unwrap();
        assert!(!e2);
    }
}

#[test]
fn pointwise_domination_examples() {
    let w = GridWindow::interval(-2.0, 2.0, -5, 2, vec![Shift::zero(1)]).unwrap();
    let zero = constant(1, 0.0).unwrap();
    let base = DominationParams {
        p: 1.0,
        q: 1.0,
        beta: 2.0,
        lambda: 1.0,
        epsilon: 0.5,
        c: 1.0,
        ceiling: 1e3,
        j_max: 60,
    };
    let rec = point_domination_check(&zero, &Weight::Constant(1.0), &w, &base).unwrap();
    assert_eq!((rec.lhs, rec.rhs), (0.0, 0.0));
    assert!(rec.passed());
    let t = tent(1, 1.0, 1.0, vec![0.0]).unwrap();
    let rec = point_domination_check(&t, &Weight::Constant(1.0), &w, &base).unwrap();
    assert!(rec.passed(), "{rec:?}");
    let r = linear_ramp(1, 1.0, 1.0).unwrap();
    let params = DominationParams {
        q: 2.0,
        beta: 0.0,
        epsilon: 0.25,
        ..base
    };
    let rec = point_domination_check(&r, &Weight::Constant(1.0), &w, &params).unwrap();
    assert!(rec.passed(), "{rec:?}");
}
