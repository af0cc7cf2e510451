use anyhow::{bail, Result};
use cdddkit::bsvy::{gamma_admissible, scale_condition, verify_bsvy, BsvyConfig};
use cdddkit::cddd::good::{check_domination, classify_good, classify_good_brute, random_family, Domination};
use cdddkit::cddd::{beta_admissible, mean_beta_admissible, mean_functional, verify_cddd, CdddConfig};
use cdddkit::experiments::{sharpness_sweep, weight_classifier, ClassifierConfig, SweepCase, SweepConfig};
use cdddkit::report::{fmt_f64, FunctionalProfile, Verdict, VerificationRecord};
use cdddkit::wavelet::{build_daubechies, coefficients, coefficients_csv, verify_almost_char, IndexSet};
use cdddkit::weights::{ap_constant, ap_ratio, power_weight_in_ap, probes_around, Weight};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::config::{function_label, weight_label, RunConfig};

/// What a command hands back before anything touches the disk.
pub struct Outcome {
    pub csv: String,
    pub verdict: Verdict,
    pub admissibility: Value,
    pub sup: f64,
    pub ratio: f64,
    pub truncation: Value,
    pub extra: Map<String, Value>,
    /// `(x column, y column, grouping columns)` for the optional plot.
    pub plot: Option<PlotSpec>,
}

pub struct PlotSpec {
    pub title: String,
    pub x: &'static str,
    pub y: &'static str,
    pub group: Vec<&'static str>,
}

fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::Pass;
    for v in verdicts {
        match v {
            Verdict::Fail => return Verdict::Fail,
            Verdict::Inconclusive => out = Verdict::Inconclusive,
            Verdict::Pass => {}
        }
    }
    out
}

fn prefixed(body: &str, prefix: &str, out: &mut String) {
    for line in body.lines().skip(1) {
        out.push_str(prefix);
        out.push_str(line);
        out.push('\n');
    }
}

fn profile_truncation(profiles: &[&FunctionalProfile]) -> Value {
    let share = profiles
        .iter()
        .flat_map(|p| p.boundary_share.iter().copied())
        .fold(0.0, f64::max);
    let flagged: usize = profiles.iter().map(|p| p.flags.iter().filter(|f| **f).count()).sum();
    json!({ "max_boundary_share": share, "flagged_lambdas": flagged })
}

fn worst<'a>(recs: impl Iterator<Item = &'a VerificationRecord>) -> (f64, f64) {
    recs.fold((0.0f64, 0.0f64), |(s, r), rec| (s.max(rec.lhs), r.max(rec.ratio)))
}

pub const VERIFY_CDDD_COLUMNS: &str = "beta,weight,function,lambda,functional,n_cubes,boundary_share";

pub fn verify_cddd_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let p = cfg.p.unwrap_or(1.0);
    let mut betas = vec![cfg.beta.unwrap_or(2.0)];
    betas.extend(cfg.betas.iter().copied());
    let win = cfg.window_spec();
    let gw = win.grid_window()?;
    let n = win.dim();
    let grid = cfg.lambda_grid(64)?;
    let ceiling = cfg.ceiling.unwrap_or(100.0);
    let mut csv = format!("{VERIFY_CDDD_COLUMNS}\n");
    let (mut recs, mut profiles) = (Vec::new(), Vec::new());
    for &beta in &betas {
        for ws in cfg.weight_specs() {
            for fs in cfg.battery() {
                let w = ws.build()?;
                let f = fs.build(n)?;
                let c = if cfg.exploratory() {
                    CdddConfig::exploratory(p, beta, w, gw.clone())?
                } else {
                    CdddConfig::new(p, beta, w, gw.clone())?
                }
                .with_lambdas(grid);
                let (mut rec, prof) = verify_cddd(&c, &f, ceiling)?;
                rec.insert("function", function_label(&fs));
                rec.insert("weight", weight_label(&ws));
                let prefix = format!("{},{},{},", fmt_f64(beta), weight_label(&ws), function_label(&fs));
                prefixed(&prof.cddd_csv(), &prefix, &mut csv);
                recs.push(rec);
                profiles.push(prof);
            }
        }
    }
    let (sup, ratio) = worst(recs.iter());
    let mut truncation = profile_truncation(&profiles.iter().collect::<Vec<_>>());
    truncation["window_cubes"] = json!(gw.count() as f64);
    let mut extra = Map::new();
    extra.insert("records".into(), serde_json::to_value(&recs)?);
    Ok(Outcome {
        csv,
        verdict: combine(recs.iter().map(|r| r.verdict)),
        admissibility: json!({ "omega_pn": betas.iter().all(|&b| beta_admissible(p, b, n)) }),
        sup,
        ratio,
        truncation,
        extra,
        plot: Some(PlotSpec {
            title: "weak-type functional".into(),
            x: "lambda",
            y: "functional",
            group: vec!["beta", "weight", "function"],
        }),
    })
}

pub const VERIFY_BSVY_COLUMNS: &str = "weight,function,lambda,functional,tail_flag";

pub fn verify_bsvy_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let p = cfg.p.unwrap_or(1.0);
    let q = cfg.q.unwrap_or(1.0);
    let gamma = cfg.gamma.unwrap_or(1.0);
    let win = cfg.window_spec();
    let bx = win.axis_box()?;
    let n = win.dim();
    let tol = cfg.tolerance.unwrap_or(0.02);
    let ceiling = cfg.ceiling.unwrap_or(100.0);
    let mut csv = format!("{VERIFY_BSVY_COLUMNS}\n");
    let (mut recs, mut profiles) = (Vec::new(), Vec::new());
    for ws in cfg.weight_specs() {
        for fs in cfg.battery() {
            let w = ws.build()?;
            let f = fs.build(n)?;
            let mut c = if cfg.exploratory() {
                BsvyConfig::exploratory(p, q, gamma, w, bx.clone())?
            } else {
                BsvyConfig::new(p, q, gamma, w, bx.clone())?
            };
            if cfg.lambda.is_some() {
                c = c.with_lambdas(cfg.lambda_grid(25)?);
            }
            let (mut rec, prof) = verify_bsvy(&c, &f, tol, ceiling)?;
            rec.insert("function", function_label(&fs));
            rec.insert("weight", weight_label(&ws));
            prefixed(&prof.bsvy_csv(), &format!("{},{},", weight_label(&ws), function_label(&fs)), &mut csv);
            recs.push(rec);
            profiles.push(prof);
        }
    }
    let (sup, ratio) = worst(recs.iter());
    let mut extra = Map::new();
    extra.insert("records".into(), serde_json::to_value(&recs)?);
    Ok(Outcome {
        csv,
        verdict: combine(recs.iter().map(|r| r.verdict)),
        admissibility: json!({
            "gamma_pq": gamma_admissible(p, q, gamma),
            "scale_condition": scale_condition(n, p, q),
        }),
        sup,
        ratio,
        truncation: profile_truncation(&profiles.iter().collect::<Vec<_>>()),
        extra,
        plot: Some(PlotSpec {
            title: "difference-quotient functional".into(),
            x: "lambda",
            y: "functional",
            group: vec!["weight", "function"],
        }),
    })
}

pub const MEAN_FUNCTIONAL_COLUMNS: &str = "weight,function,lambda,functional,n_cubes,boundary_share";

pub fn mean_functional_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let p = cfg.p.unwrap_or(1.0);
    let beta = cfg.beta.unwrap_or(2.0);
    let win = cfg.window_spec();
    let gw = win.grid_window()?;
    let grid = cfg.lambda_grid(64)?;
    let ceiling = cfg.ceiling.unwrap_or(100.0);
    let mut csv = format!("{MEAN_FUNCTIONAL_COLUMNS}\n");
    let (mut recs, mut profiles) = (Vec::new(), Vec::new());
    for ws in cfg.weight_specs() {
        for fs in cfg.battery() {
            let w = ws.build()?;
            let f = fs.build(win.dim())?;
            let (prof, mut rec) = mean_functional(&f, &w, p, beta, &gw, &grid, ceiling)?;
            rec.insert("function", function_label(&fs));
            rec.insert("weight", weight_label(&ws));
            prefixed(&prof.cddd_csv(), &format!("{},{},", weight_label(&ws), function_label(&fs)), &mut csv);
            recs.push(rec);
            profiles.push(prof);
        }
    }
    let (sup, ratio) = worst(recs.iter());
    let mut truncation = profile_truncation(&profiles.iter().collect::<Vec<_>>());
    truncation["window_cubes"] = json!(gw.count() as f64);
    let mut extra = Map::new();
    extra.insert("records".into(), serde_json::to_value(&recs)?);
    Ok(Outcome {
        csv,
        verdict: combine(recs.iter().map(|r| r.verdict)),
        admissibility: json!({ "beta_outside_excluded_band": mean_beta_admissible(p, beta) }),
        sup,
        ratio,
        truncation,
        extra,
        plot: Some(PlotSpec {
            title: "mean-oscillation functional".into(),
            x: "lambda",
            y: "functional",
            group: vec!["weight", "function"],
        }),
    })
}

pub const GOOD_CUBES_COLUMNS: &str = "family,cube,own,best_below,good,brute_good";

pub fn good_cubes_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let g = cfg.good_cubes.clone().unwrap_or_default();
    let n = g.dim.unwrap_or(1);
    let families = g.families.unwrap_or(20);
    let max_size = g.max_size.unwrap_or(12);
    let max_depth = g.max_depth.unwrap_or(4);
    let sigma = g.sigma.unwrap_or(0.5);
    let seed = cfg.seed.unwrap_or(0);
    let w = cfg.first_weight()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = format!("{GOOD_CUBES_COLUMNS}\n");
    let (mut mismatches, mut cubes, mut good) = (0usize, 0usize, 0usize);
    let (mut sup, mut worst_ratio) = (0.0f64, 0.0f64);
    let mut verdicts = Vec::new();
    for fam in 0..families {
        let family = random_family(&mut rng, n, max_size, max_depth);
        let part = classify_good(&family, sigma, &w)?;
        let brute = if family.len() <= 20 {
            Some(classify_good_brute(&family, sigma, &w)?)
        } else {
            None
        };
        for (i, q) in family.iter().enumerate() {
            let b = brute.as_ref().map(|b| b.good[i]);
            if b.is_some_and(|b| b != part.good[i]) {
                mismatches += 1;
            }
            csv += &format!(
                "{fam},{},{},{},{},{}\n",
                q.to_string().replace(',', ";"),
                fmt_f64(part.own[i]),
                fmt_f64(part.best_below[i]),
                part.good[i],
                b.map(|b| b.to_string()).unwrap_or_default()
            );
            sup = sup.max(part.own[i]);
        }
        cubes += family.len();
        good += part.good.iter().filter(|g| **g).count();
        let rec = check_domination(&family, sigma, &w, &Domination::AllByGood { gamma: sigma - 0.5 })?;
        worst_ratio = worst_ratio.max(rec.ratio);
        verdicts.push(rec.verdict);
    }
    let mut verdict = combine(verdicts);
    if mismatches > 0 {
        verdict = Verdict::Fail;
    }
    let mut extra = Map::new();
    extra.insert(
        "counts".into(),
        json!({ "families": families, "cubes": cubes, "good": good, "brute_mismatches": mismatches }),
    );
    extra.insert("sigma".into(), json!(sigma));
    Ok(Outcome {
        csv,
        verdict,
        admissibility: json!({ "sigma_positive": sigma > 0.0 }),
        sup,
        ratio: worst_ratio,
        truncation: json!({ "max_size": max_size, "max_depth": max_depth }),
        extra,
        plot: None,
    })
}


pub fn sharpness_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let s = cfg.sweep.clone().unwrap_or_default();
    let case: SweepCase = s.case.as_deref().unwrap_or("ap").parse()?;
    let p = cfg.p.unwrap_or(2.0);
    let count = if s.delta.is_empty() { s.deltas.unwrap_or(7) } else { s.delta.len() };
    let mut sc = SweepConfig::new(case, p, count)?;
    if !s.delta.is_empty() {
        sc.grid = s.delta.clone();
    }
    if let Some(b) = cfg.beta {
        sc.beta = b;
    }
    if let Some(t) = cfg.tolerance {
        sc.slope_tol = t;
    }
    if let Some(full) = s.full_grid {
        sc.full_grid = full;
    }
    let res = sharpness_sweep(&sc)?;
    let sup = res.points.iter().map(|pt| pt.lhs_certified).fold(0.0, f64::max);
    let mut extra = Map::new();
    extra.insert("slope".into(), json!(res.slope));
    extra.insert("intercept".into(), json!(res.intercept));
    extra.insert("fit_residual".into(), json!(res.residual));
    extra.insert("expected_slope".into(), json!(res.expected_slope));
    extra.insert("slope_tolerance".into(), json!(res.tolerance));
    extra.insert("implied_gamma".into(), json!(res.implied_gamma));
    extra.insert("case".into(), json!(res.case));
    let y = match case {
        SweepCase::A1 => "weight_mass",
        _ => "lhs_certified",
    };
    Ok(Outcome {
        csv: res.csv(),
        verdict: if res.pass { Verdict::Pass } else { Verdict::Fail },
        admissibility: json!({ "all_certified": res.all_certified }),
        sup,
        ratio: res.slope / res.expected_slope,
        truncation: json!({ "full_grid": sc.full_grid, "certify_count": sc.certify_count }),
        extra,
        plot: Some(PlotSpec {
            title: format!("sharpness sweep, fitted slope {:.4}", res.slope),
            x: "param",
            y,
            group: vec![],
        }),
    })
}


pub fn classify_weight_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let c = cfg.classifier.clone().unwrap_or_default();
    let p = cfg.p.unwrap_or(1.0);
    let beta = cfg.beta.unwrap_or(2.0);
    let win = cfg.window_spec();
    let steps = c.windows.unwrap_or(3);
    let mut w0 = win.grid_window()?;
    let mut schedule = vec![w0.clone()];
    for _ in 1..steps {
        w0 = w0.doubled();
        schedule.push(w0.clone());
    }
    let battery = cfg
        .battery()
        .iter()
        .map(|f| f.build(win.dim()))
        .collect::<cdddkit::Result<Vec<_>>>()?;
    let mut cc = ClassifierConfig::new(p, beta, battery, schedule)?;
    if let (Some(q), Some(g)) = (cfg.q, cfg.gamma) {
        cc.bsvy = Some((q, g));
    }
    if let Some(b) = c.blowup {
        cc.blowup = b;
    }
    if let Some(b) = c.bounded {
        cc.bounded = b;
    }
    let w = cfg.first_weight()?;
    let rep = weight_classifier(&w, &cc)?;
    let sup = rep.rows.iter().flat_map(|r| r.ratios.iter().copied()).fold(0.0, f64::max);
    let mut extra = Map::new();
    extra.insert("classification".into(), json!(rep.verdict));
    extra.insert("analytic_in_ap".into(), json!(rep.analytic_in_ap));
    extra.insert("agrees".into(), json!(rep.agrees));
    extra.insert("note".into(), json!(rep.note));
    Ok(Outcome {
        csv: rep.csv(),
        verdict: match rep.agrees {
            Some(false) => Verdict::Fail,
            Some(true) => Verdict::Pass,
            None => Verdict::Inconclusive,
        },
        admissibility: json!({ "omega_pn": beta_admissible(p, beta, win.dim()) }),
        sup,
        ratio: rep.max_growth,
        truncation: json!({ "windows": steps, "blowup": cc.blowup, "bounded": cc.bounded }),
        extra,
        plot: None,
    })
}


pub fn wavelet_check_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let ws = cfg.wavelet.clone().unwrap_or_default();
    let win = cfg.window_spec();
    let n = win.dim();
    let sys = build_daubechies(ws.order.unwrap_or(4), ws.depth.unwrap_or(12), n)?;
    let idx = IndexSet::new(ws.j_max.unwrap_or(5), win.axis_box()?)?;
    let beta = cfg.beta.unwrap_or(2.0);
    let battery = cfg.battery();
    if battery.len() != 1 {
        bail!("wavelet-check takes a single function, got {}", battery.len());
    }
    let f = battery[0].build(n)?;
    let w = cfg.first_weight()?;
    let rec = verify_almost_char(&f, &w, beta, &sys, &idx, cfg.ceiling.unwrap_or(10.0))?;
    let coeffs = coefficients(&f, &sys, &idx)?;
    let mut extra = Map::new();
    extra.insert("record".into(), serde_json::to_value(&rec)?);
    extra.insert("vanishing_moments".into(), json!(sys.moments(sys.order)));
    extra.insert("orthonormality_defect".into(), json!(sys.orthonormality_defect()));
    Ok(Outcome {
        csv: coefficients_csv(&coeffs),
        verdict: rec.verdict,
        admissibility: json!({ "order_exceeds_n_plus_1": sys.order > n + 1, "beta": true }),
        sup: rec.lhs,
        ratio: rec.ratio,
        truncation: json!({
            "j_max": idx.j_max,
            "boundary_nonzero": rec.details.get("boundary_nonzero"),
            "strong_convergent": rec.details.get("strong_convergent"),
        }),
        extra,
        plot: None,
    })
}

pub const AP_COLUMNS: &str = "probe,lo,hi,ratio";

pub fn ap_constant_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let ps = cfg.probes.clone().unwrap_or_default();
    let n = cfg.dim();
    let p = cfg.p.unwrap_or(2.0);
    let center = ps.center.clone().unwrap_or_else(|| vec![0.0; n]);
    let probes = probes_around(&center, ps.k_lo.unwrap_or(-8), ps.k_hi.unwrap_or(8));
    let w: Weight = cfg.first_weight()?;
    let est = ap_constant(&w, p, &probes)?;
    let list = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(";");
    let mut csv = format!("{AP_COLUMNS}\n");
    for (i, b) in probes.iter().enumerate() {
        csv += &format!("{i},{},{},{}\n", list(&b.lo), list(&b.hi), fmt_f64(ap_ratio(&w, p, b)?));
    }
    let analytic = match &w {
        Weight::PowerCentered { center, exponent } if center.len() == 1 => Some(power_weight_in_ap(*exponent, p)),
        Weight::Constant(_) => Some(true),
        _ => None,
    };
    let mut extra = Map::new();
    extra.insert("estimate".into(), serde_json::to_value(&est)?);
    extra.insert("analytic_in_ap".into(), json!(analytic));
    Ok(Outcome {
        csv,
        verdict: if est.value.is_finite() { Verdict::Pass } else { Verdict::Fail },
        admissibility: json!({ "p_at_least_one": p >= 1.0 }),
        sup: est.value,
        ratio: est.value,
        truncation: json!({ "probes": est.probes }),
        extra,
        plot: None,
    })
}
