use cdddkit::weights::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn iv(a: f64, b: f64) -> AxisBox {
    AxisBox::interval(a, b).unwrap()
}

/// `∫_a^b |x − c|^e dx` from the antiderivative.
fn power_mass(c: f64, e: f64, a: f64, b: f64) -> f64 {
    let prim = |t: f64| (t - c).signum() * (t - c).abs().powf(e + 1.0) / (e + 1.0);
    prim(b) - prim(a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn power_mass_matches_antiderivative(
        c in -2.0f64..2.0,
        e in -0.95f64..2.0,
        a in -4.0f64..4.0,
        len in 0.01f64..5.0,
    ) {
        let w = Weight::power(vec![c], e).unwrap();
        let m = w.mass_box(&iv(a, a + len)).unwrap();
        let exact = power_mass(c, e, a, a + len);
        prop_assert!((m - exact).abs() <= 1e-9 * exact.abs().max(1e-12), "{m} vs {exact}");
    }

    #[test]
    fn mass_is_additive_and_monotone(
        c in -1.0f64..1.0,
        e in -0.9f64..1.5,
        a in -3.0f64..0.0,
        t in 0.05f64..0.95,
        len in 0.1f64..4.0,
    ) {
        let w = Weight::power(vec![c], e).unwrap();
        let b = a + t * len;
        let whole = w.mass_box(&iv(a, a + len)).unwrap();
        let left = w.mass_box(&iv(a, b)).unwrap();
        let right = w.mass_box(&iv(b, a + len)).unwrap();
        prop_assert!((whole - left - right).abs() <= 1e-9 * whole);
        prop_assert!(left <= whole * (1.0 + 1e-12) && right <= whole * (1.0 + 1e-12));
    }

    #[test]
    fn product_weight_mass_factorizes(
        e1 in -0.9f64..1.0,
        e2 in -0.9f64..1.0,
        lo in prop::collection::vec(-2.0f64..2.0, 2),
        l in 0.1f64..3.0,
    ) {
        let w = Weight::product(vec![
            Weight::power(vec![0.0], e1).unwrap(),
            Weight::power(vec![0.5], e2).unwrap(),
        ]).unwrap();
        let m = w.mass_box(&AxisBox::cube(&lo, l).unwrap()).unwrap();
        let exact = power_mass(0.0, e1, lo[0], lo[0] + l) * power_mass(0.5, e2, lo[1], lo[1] + l);
        prop_assert!((m - exact).abs() <= 1e-8 * exact);
    }

    #[test]
    fn ap_ratio_is_at_least_one_and_decreases_in_p(
        e in -0.9f64..0.9,
        a in -2.0f64..2.0,
        len in 0.01f64..4.0,
    ) {
        let w = Weight::power(vec![0.0], e).unwrap();
        let b = iv(a, a + len);
        let r2 = ap_ratio(&w, 2.0, &b).unwrap();
        let r3 = ap_ratio(&w, 3.0, &b).unwrap();
        prop_assert!(r2 >= 1.0 && r3 >= 1.0);
        prop_assert!(r3 <= r2 * (1.0 + 1e-9));
        if e <= 0.0 {
            let r1 = ap_ratio(&w, 1.0, &b).unwrap();
            prop_assert!(r2 <= r1 * (1.0 + 1e-9));
        }
    }
}

#[test]
fn dual_ratio_of_square_root_weight_in_closed_form() {
    let w = Weight::power(vec![0.0], 0.5).unwrap();
    // ⟨x^{1/2}⟩ = 2/3 and ⟨x^{-1/2}⟩ = 2 on (0, 1)
    let r = ap_ratio(&w, 2.0, &iv(0.0, 1.0)).unwrap();
    assert!((r - 4.0 / 3.0).abs() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rep = check_ap_properties(&w, 2.0, &[iv(0.0, 1.0)], &[], &mut rng, 1e-9).unwrap();
    assert!(rep.all_hold());
    assert!(!rep.duality.is_empty());
    assert!(rep.duality.iter().all(|d| d.rel_err <= 1e-9));
}

#[test]
fn maximal_bound_for_inverse_square_root() {
    let w = Weight::power(vec![0.0], -0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let probes = probes_around(&[2.0], -6, 4);
    let rep = check_ap_properties(&w, 1.0, &probes, &[vec![2.0], vec![0.25]], &mut rng, 1e-9).unwrap();
    assert!(rep.maximal.iter().all(|c| c.holds));
    assert!(rep.all_hold());
}

#[test]
fn sharp_ap_weight_constant_grows_like_inverse_delta() {
    let probes = probes_around(&[0.0], -10, 10);
    let mut last = 0.0;
    for k in 2..=5 {
        let delta = 2f64.powi(-k);
        let w = Weight::power(vec![0.0], 1.0 - delta).unwrap();
        let est = ap_constant(&w, 2.0, &probes).unwrap().value;
        // δ^{1−p} up to an absolute factor
        let scaled = est * delta;
        assert!(scaled > 0.1 && scaled < 10.0, "δ = {delta}: {est}");
        assert!(est > last);
        last = est;
    }
}

#[test]
fn growth_bound_holds_for_a1_weights() {
    let w = Weight::power(vec![0.0], -0.5).unwrap();
    let est = ap_constant(&w, 1.0, &probes_around(&[0.0], -8, 8)).unwrap().value;
    let pts: Vec<Vec<f64>> = (-20..=20).map(|i| vec![i as f64 * 0.7 + 0.01]).collect();
    assert!(check_growth(&w, est, &pts).unwrap().iter().all(|g| g.holds));
}

#[test]
fn analytic_membership_of_power_weights() {
    assert!(power_weight_in_ap(0.0, 1.0));
    assert!(power_weight_in_ap(-0.5, 1.0));
    assert!(!power_weight_in_ap(0.5, 1.0));
    assert!(power_weight_in_ap(0.5, 2.0));
    assert!(!power_weight_in_ap(1.0, 2.0));
    assert!(!power_weight_in_ap(-1.0, 2.0));
}
