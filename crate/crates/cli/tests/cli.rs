use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cdddkit"));
    c.env_remove("CDDDKIT_OUT_DIR");
    c
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("cdddkit-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out-dir").arg(out).output().unwrap()
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn a1_battery_config_passes() {
    let out = scratch("battery");
    let cfg = example("a1_battery.toml");
    let o = run(&["verify-cddd", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["verdict"], "pass");
    for key in ["inputs", "admissibility", "sup", "ratio", "verdict", "truncation"] {
        assert!(s.get(key).is_some(), "summary lacks {key}");
    }
    assert_eq!(s["admissibility"]["omega_pn"], true);
    // 2 betas x 3 weights x 3 functions x 64 lambdas
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3 * 3 * 64);
    assert!(!out.join("plot.svg").exists());
}

#[test]
fn ap_sweep_writes_seven_rows_and_a_slope() {
    let out = scratch("sweep");
    let o = run(&["sharpness", "--case", "ap", "--p", "2", "--deltas", "7", "--plot"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 8);
    assert!(csv.starts_with("param,lambda,lhs_certified,"));
    let s = summary(&out);
    let slope = s["slope"].as_f64().unwrap();
    assert!((slope + 3.0).abs() < 0.15, "{slope}");
    assert!(std::fs::read_to_string(out.join("plot.svg")).unwrap().contains("<svg"));
}

#[test]
fn zero_gamma_is_a_config_error() {
    let out = scratch("gamma0");
    let o = run(&["verify-bsvy", "--gamma", "0"], &out);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("Gamma_{p,q}"), "{err}");
    assert!(!out.join("summary.json").exists());
}

#[test]
fn inadmissible_beta_names_the_rule() {
    let out = scratch("beta");
    let o = run(&["verify-cddd", "--beta", "0.5"], &out);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Omega_{p,n}"));
    // the exploratory switch runs it and reports the flag
    let o = run(&["verify-cddd", "--beta", "0.5", "--exploratory", "--function", "tent"], &out);
    assert_ne!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(summary(&out)["admissibility"]["omega_pn"], false);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(1));
    assert_eq!(bin().args(["sharpness", "--p", "two"]).output().unwrap().status.code(), Some(1));
    let o = bin().args(["verify-cddd", "--config", "/nonexistent/run.toml"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let dir = scratch("badcfg");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "p = 1.0\nalpha = 3\n").unwrap();
    let o = bin().args(["verify-cddd", "--config", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn help_documents_csv_columns() {
    let o = bin().args(["good-cubes", "--help"]).output().unwrap();
    assert!(String::from_utf8_lossy(&o.stdout).contains("family,cube,own,best_below,good,brute_good"));
}

#[test]
fn failed_check_exits_two() {
    let out = scratch("classify");
    let o = run(&["classify-weight", "--p", "1", "--weight-exponent", "0.5"], &out);
    assert_eq!(o.status.code(), Some(2));
    let s = summary(&out);
    assert_eq!(s["verdict"], "fail");
    assert_eq!(s["analytic_in_ap"], false);
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (scratch("rerun-a"), scratch("rerun-b"));
    for args in [
        &["good-cubes", "--seed", "11", "--families", "8"][..],
        &["verify-cddd", "--function", "tent", "--weight-exponent", "-0.5"][..],
    ] {
        assert_eq!(run(args, &a).status.code(), Some(0));
        assert_eq!(run(args, &b).status.code(), Some(0));
        let ra = std::fs::read(a.join("results.csv")).unwrap();
        assert_eq!(ra, std::fs::read(b.join("results.csv")).unwrap());
    }
    // a different seed draws different families
    run(&["good-cubes", "--seed", "12", "--families", "8"], &b);
    assert_ne!(
        std::fs::read(a.join("results.csv")).unwrap(),
        std::fs::read(b.join("results.csv")).unwrap()
    );
}

#[test]
fn flags_override_config_and_env_sets_the_default_dir() {
    let out = scratch("env");
    let cfg = example("ap_sweep.toml");
    let o = bin()
        .args(["sharpness", "--config", cfg.to_str().unwrap(), "--deltas", "5", "--p", "3"])
        .env("CDDDKIT_OUT_DIR", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["inputs"]["p"], 3.0);
    assert_eq!(s["inputs"]["sweep"]["deltas"], 5);
    assert_eq!(s["inputs"]["sweep"]["case"], "ap");
    assert_eq!(s["expected_slope"], -4.0);
    assert_eq!(std::fs::read_to_string(out.join("results.csv")).unwrap().lines().count(), 6);
}

#[test]
fn remaining_subcommands_complete() {
    let out = scratch("rest");
    let cfg = example("bsvy_ramp.toml");
    for args in [
        &["verify-bsvy", "--config", cfg.to_str().unwrap()][..],
        &["mean-functional", "--function", "smoothed_indicator"][..],
        &["wavelet-check", "--window-lo", "-2", "--window-hi", "2"][..],
        &["ap-constant", "--p", "2", "--weight-exponent", "0.5"][..],
    ] {
        let o = run(args, &out);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(summary(&out)["verdict"], "pass", "{args:?}");
    }
}
