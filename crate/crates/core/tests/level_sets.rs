use cdddkit::cddd::*;
use cdddkit::funcspace::*;
use cdddkit::grid::*;
use cdddkit::report::Verdict;
use cdddkit::weights::{AxisBox, Weight};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn window(lo: f64, hi: f64, j_min: i32, j_max: i32) -> GridWindow {
    GridWindow::interval(lo, hi, j_min, j_max, vec![Shift::zero(1)]).unwrap()
}

/// Standard dyadic intervals of `(lo, hi)`, generation descending, index ascending.
fn dyadic_intervals(lo: f64, hi: f64, j_min: i32, j_max: i32) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for j in (j_min..=j_max).rev() {
        let h = 2f64.powi(j);
        let mut m = (lo / h).floor() as i64;
        while (m as f64) * h < hi {
            if (m as f64 + 1.0) * h > lo {
                out.push((m as f64 * h, h));
            }
            m += 1;
        }
    }
    out
}

#[test]
fn constant_function_has_empty_level_sets() {
    let f = constant(1, 2.0).unwrap();
    let w = window(-4.0, 4.0, -3, 2);
    for lambda in [1e-6, 1.0, 1e6] {
        let ls = level_set(&f, &w, lambda, 0.5, &Quadrature::for_dim(1)).unwrap();
        assert!(ls.cubes.is_empty());
    }
    let cfg = CdddConfig::new(1.0, 2.0, Weight::Constant(1.0), w).unwrap();
    let (rec, prof) = verify_cddd(&cfg, &f, 100.0).unwrap();
    assert!(prof.values.iter().all(|v| *v == 0.0));
    assert_eq!(rec.lhs, 0.0);
    assert_eq!(rec.verdict, Verdict::Pass);
}

#[test]
fn linear_level_set_is_cubes_longer_than_three_lambda() {
    let f = linear_ramp(1, 1.0, 100.0).unwrap();
    let w = window(-8.0, 8.0, -6, 3);
    let all = dyadic_intervals(-8.0, 8.0, -6, 3);
    for lambda in [0.01, 0.05, 0.2, 0.4, 1.1, 2.9] {
        let ls = level_set(&f, &w, lambda, 0.0, &Quadrature::for_dim(1)).unwrap();
        let expect: Vec<(f64, f64)> = all.iter().copied().filter(|(_, h)| *h > 3.0 * lambda).collect();
        let got: Vec<(f64, f64)> = ls.cubes.iter().map(|q| (q.lower()[0], q.edge())).collect();
        assert_eq!(got, expect, "λ = {lambda}");
    }
}

#[test]
fn functional_equals_brute_force_sum_bit_for_bit() {
    let f = linear_ramp(1, 1.0, 10.0).unwrap();
    let (p, beta) = (1.0, 2.0);
    let cfg = CdddConfig::new(p, beta, Weight::Constant(1.0), window(-8.0, 8.0, -6, 3)).unwrap();
    let prof = cddd_functional(&cfg, &f).unwrap();
    assert!(prof.sup > 0.0 && prof.sup.is_finite());
    let cubes = dyadic_intervals(-8.0, 8.0, -6, 3);
    let scores: Vec<f64> = cubes
        .iter()
        .map(|&(a, h)| omega(&f, &AxisBox::interval(a, a + h).unwrap(), &Quadrature::for_dim(1)).value)
        .collect();
    let b = beta + 1.0 - 1.0 / p;
    for (&lambda, &value) in prof.lambdas.iter().zip(&prof.values) {
        let mut sum = 0.0;
        for (&(_, h), &s) in cubes.iter().zip(&scores) {
            if s > lambda * h.powf(b) {
                sum += h.powf(beta * p - 1.0) * h;
            }
        }
        assert_eq!(lambda.powf(p) * sum, value, "λ = {lambda}");
    }
}

#[test]
fn exact_sup_dominates_grid_values() {
    let f = tent(1, 1.0, 1.0, vec![0.0]).unwrap();
    let cfg = CdddConfig::new(1.0, -1.0, Weight::power(vec![0.0], -0.5).unwrap(), window(-4.0, 4.0, -5, 2))
        .unwrap()
        .with_lambdas(LambdaGrid::default().refined(4));
    let prof = cddd_functional(&cfg, &f).unwrap();
    let es = prof.exact_sup.unwrap();
    assert!(prof.values.iter().all(|v| *v <= es * (1.0 + 1e-12)));
    assert!(prof.sup >= 0.5 * es);
}

#[test]
fn bump_certifying_cube_is_in_the_level_set() {
    let f = sharp1_bump().unwrap();
    let w = window(0.0, 4.0, -2, 2);
    let i0 = make_cube(&Shift::zero(1), 2, &[0]).unwrap();
    for (p, beta) in [(1.0, 2.0), (1.0, -1.0), (2.0, 1.0), (3.0, -0.5)] {
        let lambda = 4f64.powf(-beta - 3.0 + 1.0 / p);
        let ls = level_set(&f, &w, lambda, beta + 1.0 - 1.0 / p, &Quadrature::for_dim(1)).unwrap();
        assert!(ls.cubes.contains(&i0), "p = {p}, β = {beta}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn level_sets_shrink_as_lambda_grows(l1 in 1e-3f64..10.0, factor in 1.0f64..20.0, b in -1.0f64..3.0) {
        let f = tent(1, 1.0, 1.5, vec![0.3]).unwrap();
        let t = CubeTable::omega(&f, &window(-4.0, 4.0, -5, 2), &Weight::Constant(1.0), &Quadrature::for_dim(1)).unwrap();
        let big = t.level_set(l1, b).cubes;
        let small = t.level_set(l1 * factor, b).cubes;
        prop_assert!(small.iter().all(|q| big.contains(q)));
    }

    #[test]
    fn good_cube_dp_matches_brute_force(seed in any::<u64>(), sigma in -1.0f64..2.0, n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = good_family(&mut rng, n);
        let w = if n == 1 { Weight::power(vec![0.3], -0.5).unwrap() } else { Weight::Constant(1.0) };
        let fast = classify_good(&fam, sigma, &w).unwrap();
        let slow = classify_good_brute(&fam, sigma, &w).unwrap();
        prop_assert_eq!(fast.good, slow.good);
    }
}

fn good_family(rng: &mut ChaCha8Rng, n: usize) -> Vec<Cube> {
    random_family(rng, n, 12, 4)
}

#[test]
fn good_cube_examples() {
    let one = Weight::Constant(1.0);
    let c = |j, m| make_cube(&Shift::zero(1), j, &[m]).unwrap();
    assert!(classify_good(&[c(0, 0)], 0.3, &one).unwrap().good[0]);
    let p = classify_good(&[c(0, 0), c(-1, 0)], 1.0, &one).unwrap();
    assert_eq!(p.good, vec![true, true]);
    let p = classify_good(&[c(0, 0), c(-1, 0), c(-1, 1)], 0.0, &one).unwrap();
    assert_eq!(p.good, vec![false, true, true]);
    let other = make_cube(&Shift::uniform(1, 2).unwrap(), 0, &[0]).unwrap();
    assert!(classify_good(&[c(0, 0), other], 0.0, &one).is_err());
}

#[test]
fn domination_inequalities_on_random_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = Weight::power(vec![0.25], -0.5).unwrap();
    for k in 0..60 {
        let fam = random_family(&mut rng, 1, 14, 5);
        let sigma = 0.5 + 0.02 * k as f64;
        let rec = check_domination(&fam, sigma, &w, &Domination::AllByGood { gamma: sigma - 0.7 }).unwrap();
        assert!(rec.passed(), "{rec:?}");
        let part = classify_good(&fam, sigma, &w).unwrap();
        let (e, f) = random_disjoint_instance(&mut rng, &fam, &part);
        if !f.is_empty() {
            let rec = check_domination(&fam, sigma, &w, &Domination::GoodByDisjoint { alpha: sigma + 0.4, e, f }).unwrap();
            assert!(rec.passed(), "{rec:?}");
        }
    }
}

#[test]
fn chain_sums_are_geometric() {
    let f = tent(1, 1.0, 1.0, vec![0.0]).unwrap();
    let w = window(-2.0, 2.0, -8, 1);
    let pts: Vec<Vec<f64>> = (0..40).map(|i| vec![-1.9 + 0.095 * i as f64]).collect();
    for (beta, lambda) in [(2.0, 1e-3), (-1.0, 0.05), (0.75, 0.02)] {
        let rep = sparse_chain_check(&f, &w, lambda, beta, 2.0, 1.0, &pts, &Quadrature::for_dim(1)).unwrap();
        assert!(rep.holds());
        for s in &rep.samples {
            assert!(s.lhs <= s.bound * (1.0 + 1e-12));
        }
    }
    let empty = sparse_chain_check(&f, &w, 1e12, 2.0, 1.0, 1.0, &pts, &Quadrature::for_dim(1)).unwrap();
    assert!(empty.samples.is_empty() && empty.holds());
}

#[test]
fn mean_functional_examples() {
    let w = window(-4.0, 4.0, -4, 2);
    let grid = LambdaGrid::fixed(1e-3, 1e3, 25).unwrap();
    let zero = constant(1, 0.0).unwrap();
    let (prof, rec) = mean_functional(&zero, &Weight::Constant(1.0), 1.0, 2.0, &w, &grid, 100.0).unwrap();
    assert!(prof.values.iter().all(|v| *v == 0.0));
    assert!(rec.passed());
    assert!(mean_functional(&zero, &Weight::Constant(1.0), 2.0, 0.25, &w, &grid, 100.0).is_err());
    let e = indicator(vec![0.0], vec![1.0]).unwrap();
    let (_, rec) = mean_functional(&e, &Weight::power(vec![0.0], -0.5).unwrap(), 1.0, 2.0, &w, &grid, 100.0).unwrap();
    assert!(rec.lhs > 0.0 && rec.ratio <= 100.0);
}

#[test]
fn admissibility_gate() {
    let w = window(-1.0, 1.0, -2, 0);
    assert!(CdddConfig::new(1.0, 0.5, Weight::Constant(1.0), w.clone()).is_err());
    assert!(CdddConfig::new(2.0, 0.5, Weight::Constant(1.0), w.clone()).is_err());
    let cfg = CdddConfig::exploratory(2.0, 0.5, Weight::Constant(1.0), w).unwrap();
    assert!(!cfg.admissible());
    assert_eq!(alpha_exponent(2.0, 0.0), 2.0);
    assert_eq!(alpha_exponent(2.0, 1.0), 1.0);
    assert_eq!(alpha_exponent(1.0, -1.0), 1.0);
}
