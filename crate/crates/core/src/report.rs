//! Result records shared by the verification routines, plus CSV, JSON and SVG emitters.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::grid::Cube;

/// Outcome of one inequality instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Left side, right side and their ratio for one inequality instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub tolerance: f64,
    pub ceiling: f64,
    pub verdict: Verdict,
    /// False when the parameters lie outside the range the inequality is stated for.
    pub admissible: bool,
    pub details: BTreeMap<String, Value>,
}

impl VerificationRecord {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        VerificationRecord {
            name: name.into(),
            lhs,
            rhs,
            ratio: safe_ratio(lhs, rhs),
            tolerance: 0.0,
            ceiling: f64::INFINITY,
            verdict: Verdict::Inconclusive,
            admissible: true,
            details: BTreeMap::new(),
        }
    }

    pub fn with_detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.insert(key, value);
        self
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.details.insert(key.to_string(), v);
    }

    /// Pass when `ratio ≤ ceiling·(1 + tolerance)`.
    pub fn judge_ceiling(mut self, ceiling: f64, tolerance: f64) -> Self {
        self.ceiling = ceiling;
        self.tolerance = tolerance;
        self.verdict = if self.ratio <= ceiling * (1.0 + tolerance) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// `a / b` with `0/0 = 0`.
pub fn safe_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// A functional sampled on a λ-grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalProfile {
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    /// Values with threshold-flagged cubes excluded and included.
    pub values_lo: Vec<f64>,
    pub values_hi: Vec<f64>,
    pub n_cubes: Vec<usize>,
    /// Share of each value carried by cubes touching the window boundary.
    pub boundary_share: Vec<f64>,
    /// Per-λ truncation flag (tail not certified).
    pub flags: Vec<bool>,
    pub sup: f64,
    pub argmax_lambda: f64,
    /// Supremum over all λ > 0 for the truncated family, when computable exactly.
    pub exact_sup: Option<f64>,
    pub exact_argmax: Option<f64>,
    pub certifying: Vec<Cube>,
    pub certifying_total: usize,
}

impl FunctionalProfile {
    /// Profile from values only; the sup is the grid maximum.
    pub fn from_values(lambdas: Vec<f64>, values: Vec<f64>, flags: Vec<bool>) -> Self {
        let (sup, argmax_lambda) = grid_max(&lambdas, &values);
        FunctionalProfile {
            values_lo: values.clone(),
            values_hi: values.clone(),
            n_cubes: Vec::new(),
            boundary_share: vec![0.0; values.len()],
            flags,
            lambdas,
            values,
            sup,
            argmax_lambda,
            exact_sup: None,
            exact_argmax: None,
            certifying: Vec::new(),
            certifying_total: 0,
        }
    }

    /// The exact supremum when known, otherwise the grid maximum.
    pub fn best_sup(&self) -> f64 {
        self.exact_sup.unwrap_or(self.sup)
    }

    /// CSV with columns `lambda,functional,n_cubes,boundary_share`.
    pub fn cddd_csv(&self) -> String {
        let mut s = String::from("lambda,functional,n_cubes,boundary_share\n");
        for i in 0..self.lambdas.len() {
            let n = self.n_cubes.get(i).copied().unwrap_or(0);
            let _ = writeln!(
                s,
                "{},{},{},{}",
                fmt_f64(self.lambdas[i]),
                fmt_f64(self.values[i]),
                n,
                fmt_f64(self.boundary_share[i])
            );
        }
        s
    }

    /// CSV with columns `lambda,functional,tail_flag`.
    pub fn bsvy_csv(&self) -> String {
        let mut s = String::from("lambda,functional,tail_flag\n");
        for i in 0..self.lambdas.len() {
            let _ = writeln!(
                s,
                "{},{},{}",
                fmt_f64(self.lambdas[i]),
                fmt_f64(self.values[i]),
                self.flags.get(i).copied().unwrap_or(false)
            );
        }
        s
    }
}

pub(crate) fn grid_max(lambdas: &[f64], values: &[f64]) -> (f64, f64) {
    let mut sup = 0.0;
    let mut arg = lambdas.first().copied().unwrap_or(f64::NAN);
    for (l, v) in lambdas.iter().zip(values) {
        if *v > sup {
            sup = *v;
            arg = *l;
        }
    }
    (sup, arg)
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == 0 {
                        lo
                    } else if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Seventeen significant digits, locale independent.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Weighted least-squares slope and intercept of `y` against `x` with residual RMS.
pub fn fit_line(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64) {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxy: f64 = (0..x.len()).map(|i| w[i] * (x[i] - mx) * (y[i] - my)).sum();
    let sxx: f64 = (0..x.len()).map(|i| w[i] * (x[i] - mx) * (x[i] - mx)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = (0..x.len())
        .map(|i| w[i] * (y[i] - icpt - slope * x[i]).powi(2))
        .sum();
    (slope, icpt, (rss / sw).sqrt())
}

/// A log-log line plot of one or more series.
pub fn loglog_svg(title: &str, xlabel: &str, ylabel: &str, series: &[(&str, &[f64], &[f64])]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const M: f64 = 60.0;
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, x, y)| x.iter().zip(y.iter()).map(|(a, b)| (*a, *b)))
        .filter(|(a, b)| *a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.log10(), b.log10()))
        .collect();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        W / 2.0,
        xml_escape(title)
    );
    if pts.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (a, b) in &pts {
        x0 = x0.min(*a);
        x1 = x1.max(*a);
        y0 = y0.min(*b);
        y1 = y1.max(*b);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |a: f64| M + (a - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |b: f64| H - M - (b - y0) / (y1 - y0) * (H - 2.0 * M);
    let _ = writeln!(
        s,
        r#"<path d="M{M} {M} V{} H{}" fill="none" stroke="black"/>"#,
        H - M,
        W - M
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">log10 {}</text>"#,
        W / 2.0,
        H - 18.0,
        xml_escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle" font-family="sans-serif" font-size="12">log10 {}</text>"#,
        H / 2.0,
        H / 2.0,
        xml_escape(ylabel)
    );
    for (v, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="{anchor}" font-family="sans-serif" font-size="10">{v:.2}</text>"#,
            sx(v),
            H - M + 14.0
        );
    }
    for v in [y0, y1] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="10">{v:.2}</text>"#,
            M - 4.0,
            sy(v) + 3.0
        );
    }
    let colors = ["#1f5fa8", "#c0392b", "#27864a", "#8e44ad"];
    for (k, (name, x, y)) in series.iter().enumerate() {
        let color = colors[k % colors.len()];
        let mut d = String::new();
        for (a, b) in x.iter().zip(y.iter()) {
            if *a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite() {
                let cmd = if d.is_empty() { 'M' } else { 'L' };
                let _ = write!(d, "{cmd}{:.2} {:.2} ", sx(a.log10()), sy(b.log10()));
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                    sx(a.log10()),
                    sy(b.log10())
                );
            }
        }
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{color}"/>"#, d.trim_end());
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            W - M - 120.0,
            M + 14.0 * k as f64,
            xml_escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_exact_line() {
        let x: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 3.0 * v).collect();
        let (s, c, r) = fit_line(&x, &y, &[1.0; 6]);
        assert!((s + 3.0).abs() < 1e-12 && (c - 2.0).abs() < 1e-12 && r < 1e-12);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-2, 1e2, 5);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 1e-2);
        assert_eq!(g[4], 1e2);
        assert!((g[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn float_format_is_fixed_width() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }
}
