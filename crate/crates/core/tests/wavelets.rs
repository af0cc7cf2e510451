use std::sync::Arc;

use cdddkit::funcspace::*;
use cdddkit::report::Verdict;
use cdddkit::wavelet::*;
use cdddkit::weights::{AxisBox, Weight};
use proptest::prelude::*;

fn index(e: u8, j: i32, k: i64) -> WaveletIndex {
    WaveletIndex {
        e: vec![e],
        cube: DyadicCube { j, k: vec![k] },
        boundary: false,
    }
}

#[test]
fn haar_scaling_function_is_the_unit_indicator() {
    let sys = build_daubechies(1, 8, 1).unwrap();
    for i in 0..100 {
        let x = -0.5 + 0.02 * i as f64;
        let expect = if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 };
        assert!((sys.phi_at(x) - expect).abs() < 1e-12, "x = {x}");
    }
    assert!(sys.orthonormality_defect() < 1e-12);
    assert!(sys.moments(1)[0].abs() < 1e-12);
}

#[test]
fn second_order_filter_closed_form() {
    let s3 = 3f64.sqrt();
    let d = 4.0 * 2f64.sqrt();
    let expect = [(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d];
    let h = daubechies_filter(2).unwrap();
    let rev: Vec<f64> = expect.iter().rev().copied().collect();
    let close = |a: &[f64]| a.iter().zip(&h).all(|(x, y)| (x - y).abs() < 1e-12);
    assert!(close(&expect) || close(&rev), "{h:?}");
}

#[test]
fn filters_are_orthonormal_for_every_order() {
    for order in 1..=10 {
        let h = daubechies_filter(order).unwrap();
        assert_eq!(h.len(), 2 * order);
        assert!((h.iter().sum::<f64>() - 2f64.sqrt()).abs() < 1e-10);
        for m in 0..order {
            let s: f64 = (0..h.len() - 2 * m).map(|k| h[k] * h[k + 2 * m]).sum();
            let target = if m == 0 { 1.0 } else { 0.0 };
            assert!((s - target).abs() < 1e-10, "N = {order}, m = {m}: {s}");
        }
    }
    assert!(daubechies_filter(0).is_err());
    assert!(daubechies_filter(11).is_err());
}

#[test]
fn vanishing_moments_and_refinement() {
    for order in [2usize, 4] {
        let sys = build_daubechies(order, 12, 1).unwrap();
        for (k, m) in sys.moments(order).iter().enumerate() {
            assert!(m.abs() < 1e-6, "N = {order}, k = {k}: {m}");
        }
        assert!(sys.refinement_residual() < 1e-10);
        assert!(sys.orthonormality_defect() < 1e-4);
        assert!((sys.lp_norm(&[0], 2.0) - 1.0).abs() < 1e-4);
        assert!((sys.lp_norm(&[1], 2.0) - 1.0).abs() < 1e-4);
    }
}

#[test]
fn normalized_atoms_keep_their_lp_norm() {
    let haar = build_daubechies(1, 10, 1).unwrap();
    let cube = DyadicCube { j: 3, k: vec![2] };
    let g = normalized_atom(&haar, &cube, &[1], 2.0);
    // 2^{j/2} on a cube of length 2^{−j}
    let m = 1 << 14;
    let h = 1.0 / m as f64;
    let l2: f64 = (0..m).map(|i| g(&[(i as f64 + 0.5) * h]).powi(2)).sum::<f64>() * h;
    assert!((l2 - 1.0).abs() < 1e-12);

    let sys = build_daubechies(2, 12, 1).unwrap();
    let cube = DyadicCube { j: 1, k: vec![0] };
    let g = normalized_atom(&sys, &cube, &[0], 1.0);
    let l1: f64 = (0..m).map(|i| g(&[(i as f64 + 0.5) * 2.0 * h]).abs()).sum::<f64>() * 2.0 * h;
    assert!((l1 - sys.lp_norm(&[0], 1.0)).abs() < 1e-4, "{l1}");
}

#[test]
fn coefficient_examples() {
    let sys = Arc::new(build_daubechies(4, 12, 1).unwrap());
    let one = constant(1, 3.0).unwrap();
    let line = TestFunction::callable("line", 1, |x| 2.0 * x[0] - 1.0, |_| vec![2.0]);
    for (j, k) in [(0, -3), (2, 5), (4, -20)] {
        assert!(coefficient(&one, &sys, &index(1, j, k), 1).abs() < 1e-6);
        assert!(coefficient(&line, &sys, &index(1, j, k), 1).abs() < 1e-6);
    }
    // an atom against itself
    for (j, k) in [(0, 0), (3, -2)] {
        let s = sys.clone();
        let scale = (j as f64).exp2();
        let atom = TestFunction::callable("atom", 1, move |x| s.psi_at(scale * x[0] - k as f64), |_| vec![0.0]);
        let c = coefficient(&atom, &sys, &index(1, j, k), 1);
        assert!((c - 1.0).abs() < 1e-4, "{c}");
        let off = coefficient(&atom, &sys, &index(1, j, k + 1), 1);
        assert!(off.abs() < 1e-4, "{off}");
    }
}

#[test]
fn coefficients_are_linear() {
    let sys = build_daubechies(3, 10, 1).unwrap();
    let idx = IndexSet::new(3, AxisBox::interval(-1.0, 1.0).unwrap()).unwrap();
    let f = tent(1, 1.0, 0.7, vec![0.1]).unwrap();
    let g = smoothed_indicator(1, 0.4, 0.3, vec![-0.2]).unwrap();
    let (f2, g2) = (f.clone(), g.clone());
    let mix = TestFunction::callable("mix", 1, move |x| 2.0 * f2.value(x) - 0.5 * g2.value(x), |_| vec![0.0]);
    let (a, b, c) = (
        coefficients(&f, &sys, &idx).unwrap(),
        coefficients(&g, &sys, &idx).unwrap(),
        coefficients(&mix, &sys, &idx).unwrap(),
    );
    for ((x, y), z) in a.iter().zip(&b).zip(&c) {
        assert_eq!(x.index, z.index);
        assert!((2.0 * x.value - 0.5 * y.value - z.value).abs() < 1e-12);
    }
}

#[test]
fn index_sets_grow_with_generations() {
    let sys = build_daubechies(2, 8, 1).unwrap();
    let idx = IndexSet::new(2, AxisBox::interval(0.0, 1.0).unwrap()).unwrap();
    let a = idx.enumerate(&sys);
    let b = idx.extended(1).enumerate(&sys);
    assert!(a.len() < b.len());
    assert_eq!(&b[..a.len()], &a[..]);
    assert!(a.iter().all(|i| i.cube.j >= 0 && i.cube.j <= 2));
    // scaling atoms only at generation 0
    assert!(a.iter().all(|i| i.e[0] == 1 || i.cube.j == 0));
    assert!(IndexSet::new(-1, AxisBox::interval(0.0, 1.0).unwrap()).is_err());
}

#[test]
fn sequence_norm_examples() {
    assert_eq!(weak_l1(&[2.0, 1.0], &[1.0, 1.0]), 2.0);
    assert_eq!(weak_l1(&[-5.0], &[0.5]), 2.5);
    assert_eq!(weak_l1(&[], &[]), 0.0);
    let co = |v: f64, k: i64| Coefficient {
        index: index(1, 0, k),
        value: v,
    };
    let one = Weight::Constant(1.0);
    let (s, w) = seq_norms(&[co(2.0, 0), co(1.0, 1)], 0.0, &one, 1.0).unwrap();
    assert_eq!((s, w), (3.0, 2.0));
    let (s, w) = seq_norms(&[co(1.0, 0)], 2.0, &one, 1.0).unwrap();
    assert_eq!((s, w), (1.0, 1.0));
    assert!(seq_norms(&[], 0.0, &one, 0.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn weak_l1_matches_threshold_scan(pairs in prop::collection::vec((-10.0f64..10.0, 0.0f64..3.0), 0..30)) {
        let (a, c): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let v = weak_l1(&a, &c);
        // sup over λ < |a_i| approaches |a_i| Σ_{|a_k| ≥ |a_i|} c_k
        let brute = a
            .iter()
            .map(|ai| ai.abs() * a.iter().zip(&c).filter(|(ak, _)| ak.abs() >= ai.abs()).map(|(_, ck)| ck).sum::<f64>())
            .fold(0.0, f64::max);
        prop_assert!((v - brute).abs() <= 1e-12 * brute.max(1.0));
        let strong: f64 = a.iter().zip(&c).map(|(ai, ci)| ai.abs() * ci).sum();
        prop_assert!(v <= strong * (1.0 + 1e-12) + 1e-12);
    }
}

#[test]
fn almost_characterization_examples() {
    let sys = build_daubechies(4, 12, 1).unwrap();
    let idx = IndexSet::new(5, AxisBox::interval(-2.0, 2.0).unwrap()).unwrap();
    let zero = constant(1, 0.0).unwrap();
    let rec = verify_almost_char(&zero, &Weight::Constant(1.0), 2.0, &sys, &idx, 10.0).unwrap();
    assert_eq!(rec.verdict, Verdict::Pass);
    assert_eq!(rec.lhs, 0.0);
    let f = tent(1, 1.0, 1.0, vec![0.0]).unwrap();
    let rec = verify_almost_char(&f, &Weight::Constant(1.0), 2.0, &sys, &idx, 10.0).unwrap();
    assert_eq!(rec.verdict, Verdict::Pass, "{rec:?}");
    assert!(rec.lhs > 0.0);
    // order too low, β outside the admissible set
    let low = build_daubechies(2, 8, 1).unwrap();
    assert!(verify_almost_char(&f, &Weight::Constant(1.0), 2.0, &low, &idx, 10.0).is_err());
    assert!(verify_almost_char(&f, &Weight::Constant(1.0), 0.5, &sys, &idx, 10.0).is_err());
    assert!(!wavelet_beta_admissible(0.5, 2) && wavelet_beta_admissible(0.4, 2));
}
