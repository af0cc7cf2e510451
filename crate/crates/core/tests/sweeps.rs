use cdddkit::experiments::*;
use cdddkit::funcspace::*;
use cdddkit::grid::{make_cube, GridWindow, Shift};
use cdddkit::weights::{power_weight_in_ap, Weight};

fn third() -> Shift {
    Shift::uniform(1, 1).unwrap()
}

#[test]
fn sweep_configs_are_validated() {
    assert!(SweepConfig::new(SweepCase::A1, 1.0, 4).is_err());
    assert!(SweepConfig::new(SweepCase::Ap, 1.0, 7).is_err());
    assert!(SweepConfig::new(SweepCase::BetaLimit, 0.5, 7).is_err());
    assert_eq!(SweepConfig::new(SweepCase::Ap, 3.0, 7).unwrap().expected_slope(), -4.0);
    assert_eq!("beta-limit".parse::<SweepCase>().unwrap(), SweepCase::BetaLimit);
    assert!("sideways".parse::<SweepCase>().is_err());
    let mut cfg = SweepConfig::new(SweepCase::Ap, 2.0, 5).unwrap();
    cfg.grid = vec![0.6, 0.25, 0.125, 0.0625, 0.03125];
    assert!(sharpness_sweep(&cfg).is_err());
}

#[test]
fn a1_sweep_tracks_the_weight_mass() {
    let cfg = SweepConfig::new(SweepCase::A1, 1.0, 7).unwrap();
    let res = sharpness_sweep(&cfg).unwrap();
    assert!(res.pass, "slope {}", res.slope);
    assert!(res.all_certified);
    for pt in &res.points {
        let d = pt.param;
        let partial = 3.5f64.powf(d) / d;
        let full = (3.5f64.powf(d) + 0.5f64.powf(d)) / d;
        assert!((pt.partial_mass.unwrap() / partial - 1.0).abs() < 1e-9);
        assert!((pt.weight_mass.unwrap() / full - 1.0).abs() < 1e-9);
        assert!(pt.lhs_full.unwrap() >= pt.lhs_certified * (1.0 - 1e-9));
    }
    let csv = res.csv();
    assert_eq!(csv.lines().count(), 8);
}

/// `λ^p Σ_j |Q_j|^{βp−1} υ(Q_j)` over explicit members of a third-shifted family. The
/// generation range is capped, so the tail is closed with the ratio of the last two terms
/// after checking that the terms are geometric.
fn family_sum(lambda: f64, p: f64, cube_exp: f64, w: &Weight, gens: impl Iterator<Item = i32>) -> f64 {
    let terms: Vec<f64> = gens
        .map(|j| {
            let q = make_cube(&third(), j, &[0]).unwrap();
            q.volume().powf(cube_exp) * w.mass_cube(&q).unwrap()
        })
        .collect();
    let m = terms.len();
    let r = terms[m - 1] / terms[m - 2];
    assert!(r < 1.0);
    for t in terms.windows(2) {
        assert!((t[1] / t[0] / r - 1.0).abs() < 1e-9);
    }
    lambda.powf(p) * (terms.iter().sum::<f64>() + terms[m - 1] * r / (1.0 - r))
}

#[test]
fn ap_sweep_matches_direct_family_sums() {
    let p = 2.0;
    let cfg = SweepConfig::new(SweepCase::Ap, p, 7).unwrap();
    let res = sharpness_sweep(&cfg).unwrap();
    assert!(res.pass, "slope {}", res.slope);
    assert!((res.slope + 3.0).abs() <= 0.15);
    for pt in &res.points {
        let d = pt.param;
        let w = Weight::power(vec![0.0], (p - 1.0) * (1.0 - d)).unwrap();
        let direct = family_sum(pt.lambda, p, -p, &w, (2..=30).map(|j| 2 * j - 1));
        assert!((direct / pt.lhs_certified - 1.0).abs() < 1e-9, "δ = {d}: {direct} vs {}", pt.lhs_certified);
    }
}

#[test]
fn beta_limit_sweep_matches_direct_family_sums() {
    let p = 2.0;
    let cfg = SweepConfig::new(SweepCase::BetaLimit, p, 7).unwrap();
    let res = sharpness_sweep(&cfg).unwrap();
    assert!(res.pass, "slope {}", res.slope);
    for pt in &res.points {
        let k = pt.param;
        let beta = k - 1.0 + 1.0 / p;
        let w = Weight::power(vec![0.0], (p - 1.0) * (1.0 / p - beta)).unwrap();
        let direct = family_sum(pt.lambda, p, beta * p - 1.0, &w, (1..=29).map(|j| -2 * j - 1));
        assert!((direct / pt.lhs_certified - 1.0).abs() < 1e-9, "κ = {k}: {direct} vs {}", pt.lhs_certified);
    }
}

fn schedule(steps: usize) -> Vec<GridWindow> {
    let mut w = GridWindow::interval(-4.0, 4.0, -5, 2, vec![Shift::zero(1)]).unwrap();
    let mut out = vec![w.clone()];
    for _ in 1..steps {
        w = w.doubled();
        out.push(w.clone());
    }
    out
}

fn battery() -> Vec<TestFunction> {
    vec![tent(1, 1.0, 1.0, vec![0.0]).unwrap(), smoothed_indicator(1, 1.0, 0.5, vec![0.0]).unwrap()]
}

#[test]
fn classifier_accepts_a1_weights() {
    let cfg = ClassifierConfig::new(1.0, 2.0, battery(), schedule(3)).unwrap();
    for w in [Weight::Constant(1.0), Weight::power(vec![0.0], -0.5).unwrap()] {
        let rep = weight_classifier(&w, &cfg).unwrap();
        assert_eq!(rep.verdict, "consistent", "{w:?}: {rep:?}");
        assert_eq!(rep.analytic_in_ap, Some(true));
        assert_eq!(rep.agrees, Some(true));
        assert!(rep.max_growth < 4.0);
    }
}

#[test]
fn classifier_panel_inside_the_analytic_range() {
    for p in [1.0, 2.0, 3.0] {
        let cfg = ClassifierConfig::new(p, 2.0, battery(), schedule(3)).unwrap();
        let lo = -0.9;
        let hi = if p == 1.0 { 0.0 } else { p - 1.1 };
        for k in 0..4 {
            let a = lo + (hi - lo) * k as f64 / 3.0;
            let rep = weight_classifier(&Weight::power(vec![0.0], a).unwrap(), &cfg).unwrap();
            assert_eq!(rep.analytic_in_ap, Some(power_weight_in_ap(a, p)));
            assert_ne!(rep.verdict, "violates", "p = {p}, a = {a}: {rep:?}");
            assert_ne!(rep.agrees, Some(false));
        }
    }
    assert!(ClassifierConfig::new(1.0, 2.0, battery(), schedule(1)).is_err());
    assert!(ClassifierConfig::new(1.0, 2.0, vec![], schedule(2)).is_err());
}
