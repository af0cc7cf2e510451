//! Browser bindings for three interactive operations: the weak-type profile of a
//! catalog function, the level set at one λ, and the scaling sweep.
//!
//! Each operation returns a JSON string. The plain-Rust versions are what the native
//! tests call; the exported wrappers only turn errors into JS exceptions.

use cdddkit::cddd::{level_set, verify_cddd, CdddConfig, LambdaGrid};
use cdddkit::experiments::{sharpness_sweep, SweepCase, SweepConfig};
use cdddkit::funcspace::FunctionSpec;
use cdddkit::grid::{GridWindow, Shift};
use cdddkit::weights::Weight;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn setup(function: &str, exponent: f64, p: f64, beta: f64) -> Result<(cdddkit::funcspace::TestFunction, CdddConfig), String> {
    let spec: FunctionSpec = serde_json::from_str(function).map_err(err)?;
    let f = spec.build(1).map_err(err)?;
    let w = if exponent == 0.0 {
        Weight::Constant(1.0)
    } else {
        Weight::power(vec![0.0], exponent).map_err(err)?
    };
    let window = GridWindow::interval(-8.0, 8.0, -6, 3, vec![Shift::zero(1)]).map_err(err)?;
    let cfg = CdddConfig::new(p, beta, w, window).map_err(err)?;
    Ok((f, cfg))
}

/// `{lambdas, values, sup, ratio, verdict, weight_constant}` for a JSON function spec
/// such as `{"name":"tent","radius":1}` and the weight `|x|^exponent` on `[-8, 8)`.
pub fn profile_json(function: &str, exponent: f64, p: f64, beta: f64, count: usize) -> Result<String, String> {
    let (f, cfg) = setup(function, exponent, p, beta)?;
    let cfg = cfg.with_lambdas(LambdaGrid {
        lo: None,
        hi: None,
        count: count.clamp(2, 512),
    });
    let (rec, prof) = verify_cddd(&cfg, &f, 100.0).map_err(err)?;
    Ok(json!({
        "lambdas": prof.lambdas,
        "values": prof.values,
        "sup": prof.best_sup(),
        "argmax": prof.exact_argmax.unwrap_or(prof.argmax_lambda),
        "ratio": rec.ratio,
        "verdict": rec.verdict.as_str(),
        "weight_constant": rec.details.get("weight_constant"),
    })
    .to_string())
}

/// Cubes `[lo, hi)` with their generations where the oscillation exceeds `λ|Q|^{β+1−1/p}`.
pub fn level_set_json(function: &str, p: f64, beta: f64, lambda: f64) -> Result<String, String> {
    let (f, cfg) = setup(function, 0.0, p, beta)?;
    let ls = level_set(&f, &cfg.window, lambda, cfg.level_exponent(), &cfg.quadrature).map_err(err)?;
    let cubes: Vec<_> = ls
        .cubes
        .iter()
        .map(|q| json!({ "lo": q.lower()[0], "hi": q.upper()[0], "j": q.generation() }))
        .collect();
    let samples: Vec<[f64; 2]> = (0..=400)
        .map(|i| {
            let x = -4.0 + 8.0 * i as f64 / 400.0;
            [x, f.value(&[x])]
        })
        .collect();
    Ok(json!({ "cubes": cubes, "flagged": ls.flagged.len(), "samples": samples }).to_string())
}

/// The tracked quantity of a scaling sweep, its fitted slope and the predicted slope.
pub fn sweep_json(case: &str, p: f64, count: usize) -> Result<String, String> {
    let case: SweepCase = case.parse().map_err(err)?;
    let mut cfg = SweepConfig::new(case, p, count.clamp(5, 12)).map_err(err)?;
    cfg.full_grid = false;
    let res = sharpness_sweep(&cfg).map_err(err)?;
    let (x, y) = res.tracked();
    Ok(json!({
        "params": x,
        "tracked": y,
        "slope": res.slope,
        "expected": res.expected_slope,
        "pass": res.pass,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn weak_type_profile(function: &str, exponent: f64, p: f64, beta: f64, count: usize) -> Result<String, JsError> {
    profile_json(function, exponent, p, beta, count).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn level_set_cubes(function: &str, p: f64, beta: f64, lambda: f64) -> Result<String, JsError> {
    level_set_json(function, p, beta, lambda).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn scaling_sweep(case: &str, p: f64, count: usize) -> Result<String, JsError> {
    sweep_json(case, p, count).map_err(|e| JsError::new(&e))
}
