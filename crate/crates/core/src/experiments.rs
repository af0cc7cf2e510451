//! Sharpness sweeps over explicit (weight, function, cube family) triples and an
//! empirical weight classifier built on the two functionals.

use num_rational::Ratio;
use serde::Serialize;

use crate::bsvy::{verify_bsvy, BsvyConfig};
use crate::cddd::{verify_cddd, CdddConfig, CubeTable, LambdaGrid};
use crate::error::{invalid, Error, Result};
use crate::funcspace::{omega_exact, sharp1_bump, sharp2_fdelta, sharp3_fbeta, Quadrature, TestFunction};
use crate::grid::{make_cube, Cube, GridWindow, Shift};
use crate::par_map;
use crate::report::{fit_line, fmt_f64, safe_ratio};
use crate::weights::{ap_constant, power_weight_in_ap, probes_around, AxisBox, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepCase {
    /// `υ = |x − 1/2|^{δ−1}` against a C¹ bump, certified by `I₀ = [0, 4)`.
    A1,
    /// `υ = |x|^{(p−1)(1−δ)}` against `∫_{−∞}^x t^{δ−1} 1_{(0,1)}`, certified by the third-shifted `I_j`.
    Ap,
    /// `υ = |x|^{(p−1)(1/p−β)}` as `β ↓ 1/p − 1`, certified by the third-shifted `Q_j`.
    BetaLimit,
}

impl std::str::FromStr for SweepCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a1" => Ok(SweepCase::A1),
            "ap" => Ok(SweepCase::Ap),
            "beta" | "betalimit" | "beta-limit" | "beta_limit" => Ok(SweepCase::BetaLimit),
            other => Err(invalid(format!("unknown sweep case {other:?}; expected a1, ap or beta-limit"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub case: SweepCase,
    pub p: f64,
    /// `β` for the A1 case; the other cases fix it.
    pub beta: f64,
    /// `δ` values (A1, Ap) or `κ = β + 1 − 1/p` values (BetaLimit).
    pub grid: Vec<f64>,
    /// Also evaluate the functional over a full grid window.
    pub full_grid: bool,
    /// Members of the certifying family checked against the level set.
    pub certify_count: usize,
    /// Weight of the two extreme points in the slope fit.
    pub end_weight: f64,
    pub slope_tol: f64,
}

impl SweepConfig {
    /// Grid `2^{−k}`, `k = 2..2+count−1`, with the case's default tolerance.
    pub fn new(case: SweepCase, p: f64, count: usize) -> Result<Self> {
        if count < 5 {
            return Err(invalid(format!("a slope fit needs at least 5 points, got {count}")));
        }
        match case {
            SweepCase::A1 if !(p >= 1.0) => return Err(invalid("the A1 sweep needs p >= 1")),
            SweepCase::Ap | SweepCase::BetaLimit if !(p > 1.0) => {
                return Err(invalid("the Ap and beta-limit sweeps need p > 1"))
            }
            _ => {}
        }
        Ok(SweepConfig {
            case,
            p,
            beta: 2.0,
            grid: (0..count).map(|k| (-(k as f64 + 2.0)).exp2()).collect(),
            full_grid: true,
            certify_count: 9,
            end_weight: 0.25,
            slope_tol: match case {
                SweepCase::A1 => 0.05,
                _ => 0.15,
            },
        })
    }

    pub fn expected_slope(&self) -> f64 {
        match self.case {
            SweepCase::A1 => -1.0,
            _ => -(self.p + 1.0),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    /// `δ` or `κ`.
    pub param: f64,
    pub lambda: f64,
    /// `λ^p Σ |I|^{βp−1} υ(I)` over the certifying family.
    pub lhs_certified: f64,
    /// The functional's supremum over a full grid window, when computed.
    pub lhs_full: Option<f64>,
    /// `υ(I₀)` for the A1 case.
    pub weight_mass: Option<f64>,
    /// `∫_{1/2}^{4} (x − 1/2)^{δ−1} dx` for the A1 case.
    pub partial_mass: Option<f64>,
    pub weight_constant: f64,
    pub gradient_pow: f64,
    /// Members of the certifying family found in the level set.
    pub certified: usize,
    pub checked: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub case: SweepCase,
    pub p: f64,
    pub points: Vec<SweepPoint>,
    /// Fitted log-log slope of the tracked quantity: `υ(I₀)` (A1) or the certified LHS.
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub expected_slope: f64,
    pub tolerance: f64,
    pub weight_constant_slope: f64,
    pub gradient_slope: f64,
    /// `(slope − gradient slope)/weight-constant slope`, the exponent the scaling forces.
    pub implied_gamma: f64,
    pub all_certified: bool,
    pub pass: bool,
}

impl SweepResult {
    /// CSV with columns `param,lambda,lhs_certified,lhs_full,weight_mass,weight_constant,gradient_pow,certified`.
    pub fn csv(&self) -> String {
        let mut s = String::from("param,lambda,lhs_certified,lhs_full,weight_mass,weight_constant,gradient_pow,certified\n");
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        for pt in &self.points {
            s += &format!(
                "{},{},{},{},{},{},{},{}/{}\n",
                fmt_f64(pt.param),
                fmt_f64(pt.lambda),
                fmt_f64(pt.lhs_certified),
                opt(pt.lhs_full),
                opt(pt.weight_mass),
                fmt_f64(pt.weight_constant),
                fmt_f64(pt.gradient_pow),
                pt.certified,
                pt.checked
            );
        }
        s
    }

    /// Series for a log-log plot: the tracked quantity against the parameter.
    pub fn tracked(&self) -> (Vec<f64>, Vec<f64>) {
        let x = self.points.iter().map(|p| p.param).collect();
        let y = self
            .points
            .iter()
            .map(|p| match self.case {
                SweepCase::A1 => p.weight_mass.unwrap_or(f64::NAN),
                _ => p.lhs_certified,
            })
            .collect();
        (x, y)
    }
}

fn third() -> Shift {
    Shift::uniform(1, 1).expect("one-third shift is valid")
}

fn cube_box(q: &Cube) -> AxisBox {
    AxisBox {
        lo: q.lower(),
        hi: q.upper(),
    }
}

/// Members of a cube family whose `ω` exceeds `λ|Q|^b` by the exact route.
fn certify(f: &TestFunction, cubes: &[Cube], lambda: f64, b: f64) -> Result<usize> {
    let mut hits = 0;
    for q in cubes {
        let bx = cube_box(q);
        let om = omega_exact(f, &bx).ok_or_else(|| Error::Domain("no exact route for the certifying cube".into()))?;
        if om > lambda * bx.volume().powf(b) {
            hits += 1;
        }
    }
    Ok(hits)
}

fn point(cfg: &SweepConfig, param: f64) -> Result<SweepPoint> {
    let p = cfg.p;
    match cfg.case {
        SweepCase::A1 => {
            let delta = param;
            let beta = cfg.beta;
            let w = Weight::power(vec![0.5], delta - 1.0)?;
            let f = sharp1_bump()?;
            let lambda = 4f64.powf(-beta - 3.0 + 1.0 / p);
            let b = beta + 1.0 - 1.0 / p;
            let i0 = make_cube(&Shift::zero(1), 2, &[0])?;
            let mass = w.mass_cube(&i0)?;
            let partial = w.mass_box(&AxisBox::interval(0.5, 4.0)?)?;
            let lhs = lambda.powf(p) * 4f64.powf(beta * p - 1.0) * mass;
            let certified = certify(&f, &[i0], lambda, b)?;
            let est = ap_constant(&w, 1.0, &probes_around(&[0.5], -4, 4))?.value;
            let grad = f.seminorm_pow(&w, p, None)?;
            let full = if cfg.full_grid {
                let win = GridWindow::interval(-4.0, 8.0, -3, 2, vec![Shift::zero(1)])?;
                let t = CubeTable::omega(&f, &win, &w, &Quadrature::for_dim(1))?;
                Some(t.exact_sup(p, b, beta * p - 1.0).0)
            } else {
                None
            };
            Ok(SweepPoint {
                param,
                lambda,
                lhs_certified: lhs,
                lhs_full: full,
                weight_mass: Some(mass),
                partial_mass: Some(partial),
                weight_constant: est,
                gradient_pow: grad,
                certified,
                checked: 1,
            })
        }
        SweepCase::Ap => {
            let delta = param;
            if !(delta > 0.0 && delta < 0.5) {
                return Err(invalid(format!("the Ap sweep needs delta in (0, 1/2), got {delta}")));
            }
            let a = (p - 1.0) * (1.0 - delta);
            let w = Weight::power(vec![0.0], a)?;
            let f = sharp2_fdelta(delta)?;
            let lambda = 1.0 / (9.0 * delta);
            // |I_j| = 2^{2j−1}, υ(I_j) = (2^{2j}/3)^{a+1}(1 + 2^{−(a+1)})/(a+1)
            let r = (-2.0 * delta * (p - 1.0)).exp2();
            let c = p.exp2() * 3f64.powf(-(a + 1.0)) * (1.0 + (-(a + 1.0)).exp2()) / (a + 1.0);
            let lhs = lambda.powf(p) * c * r * r / (1.0 - r);
            let family: Vec<Cube> = (2..2 + cfg.certify_count as i32)
                .map(|j| make_cube(&third(), 2 * j - 1, &[0]))
                .collect::<Result<_>>()?;
            let certified = certify(&f, &family, lambda, 0.0)?;
            let est = ap_constant(&w, p, &probes_around(&[0.0], -2, 2))?.value;
            let grad = f.seminorm_pow(&w, p, None)?;
            let full = if cfg.full_grid {
                let win = GridWindow::new(
                    vec![Ratio::new(-512, 3)],
                    vec![Ratio::new(1024, 3)],
                    -2,
                    9,
                    vec![third()],
                )?;
                let t = CubeTable::omega(&f, &win, &w, &Quadrature::for_dim(1))?;
                Some(t.exact_sup(p, 0.0, -p).0)
            } else {
                None
            };
            Ok(SweepPoint {
                param,
                lambda,
                lhs_certified: lhs,
                lhs_full: full,
                weight_mass: None,
                partial_mass: None,
                weight_constant: est,
                gradient_pow: grad,
                certified,
                checked: family.len(),
            })
        }
        SweepCase::BetaLimit => {
            let kappa = param;
            if !(kappa > 0.0 && kappa < 1.0) {
                return Err(invalid(format!("beta + 1 - 1/p must lie in (0, 1), got {kappa}")));
            }
            let beta = kappa - 1.0 + 1.0 / p;
            let a = (p - 1.0) * (1.0 / p - beta);
            let w = Weight::power(vec![0.0], a)?;
            let f = sharp3_fbeta(p, beta)?;
            let lambda = 3f64.powf(-kappa) / (9.0 * kappa);
            // |Q_j| = 2^{−2j−1}, υ(Q_j) = e^{a+1}(1 + 2^{a+1})/(a+1) with e = |Q_j|/3
            let r = (-2.0 * kappa).exp2();
            let c = 3f64.powf(beta * p - 1.0) * (1.0 + (a + 1.0).exp2()) / (a + 1.0) * (1.0 / 6.0f64).powf(kappa);
            let lhs = lambda.powf(p) * c * r / (1.0 - r);
            let family: Vec<Cube> = (1..1 + cfg.certify_count as i32)
                .map(|j| make_cube(&third(), -2 * j - 1, &[0]))
                .collect::<Result<_>>()?;
            let certified = certify(&f, &family, lambda, kappa)?;
            let est = ap_constant(&w, p, &probes_around(&[0.0], -2, 2))?.value;
            let grad = f.seminorm_pow(&w, p, None)?;
            let full = if cfg.full_grid {
                let win = GridWindow::new(vec![Ratio::new(-1, 6)], vec![Ratio::new(1, 3)], -12, -1, vec![third()])?;
                let t = CubeTable::omega(&f, &win, &w, &Quadrature::for_dim(1))?;
                Some(t.exact_sup(p, kappa, beta * p - 1.0).0)
            } else {
                None
            };
            Ok(SweepPoint {
                param,
                lambda,
                lhs_certified: lhs,
                lhs_full: full,
                weight_mass: None,
                partial_mass: None,
                weight_constant: est,
                gradient_pow: grad,
                certified,
                checked: family.len(),
            })
        }
    }
}

fn loglog_slope(x: &[f64], y: &[f64], end_weight: f64) -> (f64, f64, f64) {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mut w = vec![1.0; x.len()];
    if let (Some(first), Some(last)) = (lx.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)), lx.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))) {
        w[first.0] = end_weight;
        w[last.0] = end_weight;
    }
    fit_line(&lx, &ly, &w)
}

/// Evaluate every grid point, fit slopes and compare with the expected scaling.
pub fn sharpness_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    if cfg.grid.len() < 5 {
        return Err(invalid(format!("a slope fit needs at least 5 points, got {}", cfg.grid.len())));
    }
    let points = par_map(&cfg.grid, |&v| point(cfg, v)).into_iter().collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = points.iter().map(|p| p.param).collect();
    let tracked: Vec<f64> = points
        .iter()
        .map(|p| match cfg.case {
            SweepCase::A1 => p.weight_mass.unwrap_or(f64::NAN),
            _ => p.lhs_certified,
        })
        .collect();
    let (slope, intercept, residual) = loglog_slope(&x, &tracked, cfg.end_weight);
    let wc: Vec<f64> = points.iter().map(|p| p.weight_constant).collect();
    let gp: Vec<f64> = points.iter().map(|p| p.gradient_pow).collect();
    let lhs: Vec<f64> = points.iter().map(|p| p.lhs_certified).collect();
    let (ws, _, _) = loglog_slope(&x, &wc, cfg.end_weight);
    let (gs, _, _) = loglog_slope(&x, &gp, cfg.end_weight);
    let (ls, _, _) = loglog_slope(&x, &lhs, cfg.end_weight);
    let implied_gamma = safe_ratio(ls - gs, ws);
    let all_certified = points.iter().all(|p| p.certified == p.checked);
    let expected = cfg.expected_slope();
    Ok(SweepResult {
        case: cfg.case,
        p: cfg.p,
        points,
        slope,
        intercept,
        residual,
        expected_slope: expected,
        tolerance: cfg.slope_tol,
        weight_constant_slope: ws,
        gradient_slope: gs,
        implied_gamma,
        all_certified,
        pass: (slope - expected).abs() <= cfg.slope_tol && all_certified,
    })
}

#[derive(Clone, Debug)]
pub struct ClassifierConfig {
    pub p: f64,
    pub beta: f64,
    pub battery: Vec<TestFunction>,
    /// Growing windows; each step is normally a doubling.
    pub schedule: Vec<GridWindow>,
    /// Also run the difference-quotient functional with these `(q, γ)`.
    pub bsvy: Option<(f64, f64)>,
    /// Growth per step that signals a violation.
    pub blowup: f64,
    /// Growth per step still counted as bounded.
    pub bounded: f64,
}

impl ClassifierConfig {
    pub fn new(p: f64, beta: f64, battery: Vec<TestFunction>, schedule: Vec<GridWindow>) -> Result<Self> {
        if schedule.len() < 2 {
            return Err(invalid("the window schedule needs at least two windows"));
        }
        if battery.is_empty() {
            return Err(Error::Empty("function battery"));
        }
        Ok(ClassifierConfig {
            p,
            beta,
            battery,
            schedule,
            bsvy: None,
            blowup: 4.0,
            bounded: 1.25,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifierRow {
    pub function: String,
    pub functional: String,
    /// One ratio per schedule window.
    pub ratios: Vec<f64>,
    pub growth: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifierReport {
    pub verdict: String,
    pub rows: Vec<ClassifierRow>,
    pub max_growth: f64,
    /// Membership by the power-weight criterion, for one-dimensional power weights.
    pub analytic_in_ap: Option<bool>,
    pub agrees: Option<bool>,
    pub note: Option<String>,
}

impl ClassifierReport {
    /// CSV with columns `function,functional,window,ratio,growth`.
    pub fn csv(&self) -> String {
        let mut s = String::from("function,functional,window,ratio,growth\n");
        for r in &self.rows {
            for (i, v) in r.ratios.iter().enumerate() {
                let g = if i == 0 { String::new() } else { fmt_f64(r.growth[i - 1]) };
                s += &format!("{},{},{},{},{}\n", r.function, r.functional, i, fmt_f64(*v), g);
            }
        }
        s
    }
}

fn growth(r: &[f64]) -> Vec<f64> {
    r.windows(2)
        .map(|w| {
            if w[0] == 0.0 && w[1] == 0.0 {
                1.0
            } else if w[0] == 0.0 {
                f64::INFINITY
            } else {
                w[1] / w[0]
            }
        })
        .collect()
}

/// Ratios of each functional to `‖∇f‖^p_{L^p_υ}` over the schedule, judged by their growth.
pub fn weight_classifier(w: &Weight, cfg: &ClassifierConfig) -> Result<ClassifierReport> {
    let analytic = match w {
        Weight::PowerCentered { center, exponent } if center.len() == 1 => Some(power_weight_in_ap(*exponent, cfg.p)),
        Weight::Constant(_) => Some(true),
        _ => None,
    };
    let last = &cfg.schedule[cfg.schedule.len() - 1];
    let outer = AxisBox::new(last.lo_f64(), last.hi_f64())?;
    let local = w.mass_box(&outer);
    if !matches!(local, Ok(m) if m.is_finite()) {
        return Ok(ClassifierReport {
            verdict: "violates".into(),
            rows: vec![],
            max_growth: f64::INFINITY,
            analytic_in_ap: analytic,
            agrees: analytic.map(|a| !a),
            note: Some("weight is not locally integrable on the window".into()),
        });
    }
    let mut rows = Vec::new();
    for f in &cfg.battery {
        let mut ratios = Vec::new();
        for win in &cfg.schedule {
            let c = CdddConfig::exploratory(cfg.p, cfg.beta, w.clone(), win.clone())?;
            let (rec, _) = verify_cddd(&c, f, f64::INFINITY)?;
            ratios.push(rec.details["gradient_ratio"].as_f64().unwrap_or(f64::INFINITY));
        }
        rows.push(ClassifierRow {
            function: f.label().to_string(),
            functional: "cddd".into(),
            growth: growth(&ratios),
            ratios,
        });
        if let Some((q, gamma)) = cfg.bsvy {
            let mut ratios = Vec::new();
            for win in &cfg.schedule {
                let bx = AxisBox::new(win.lo_f64(), win.hi_f64())?;
                let c = BsvyConfig::exploratory(cfg.p, q, gamma, w.clone(), bx)?.with_lambdas(LambdaGrid {
                    lo: None,
                    hi: None,
                    count: 9,
                });
                let (rec, _) = verify_bsvy(&c, f, 0.0, f64::INFINITY)?;
                ratios.push(rec.ratio);
            }
            rows.push(ClassifierRow {
                function: f.label().to_string(),
                functional: "bsvy".into(),
                growth: growth(&ratios),
                ratios,
            });
        }
    }
    let max_growth = rows.iter().flat_map(|r| r.growth.iter().copied()).fold(0.0, f64::max);
    let last_bounded = rows
        .iter()
        .all(|r| r.growth.last().is_some_and(|g| g.is_finite() && *g <= cfg.bounded));
    let verdict = if max_growth >= cfg.blowup {
        "violates"
    } else if last_bounded {
        "consistent"
    } else {
        "inconclusive"
    };
    let agrees = analytic.and_then(|a| match verdict {
        "violates" => Some(!a),
        "consistent" => Some(a),
        _ => None,
    });
    Ok(ClassifierReport {
        verdict: verdict.into(),
        rows,
        max_growth,
        analytic_in_ap: analytic,
        agrees,
        note: None,
    })
}
