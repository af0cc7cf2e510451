use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use cdddkit::report::loglog_svg;
use serde_json::{json, Value};

use crate::commands::{Outcome, PlotSpec};
use crate::config::RunConfig;

/// Write results.csv, summary.json and, when asked, plot.svg. Nothing is written until
/// all three are rendered.
pub fn write_all(dir: &Path, command: &str, cfg: &RunConfig, out: Outcome) -> Result<()> {
    let mut summary = serde_json::Map::new();
    summary.insert("command".into(), json!(command));
    summary.insert("inputs".into(), serde_json::to_value(cfg)?);
    summary.insert("admissibility".into(), out.admissibility);
    summary.insert("sup".into(), json_f64(out.sup));
    summary.insert("ratio".into(), json_f64(out.ratio));
    summary.insert("verdict".into(), json!(out.verdict.as_str()));
    summary.insert("truncation".into(), out.truncation);
    summary.insert(
        "csv_columns".into(),
        json!(out.csv.lines().next().unwrap_or("").split(',').collect::<Vec<_>>()),
    );
    summary.insert("rows".into(), json!(out.csv.lines().count().saturating_sub(1)));
    for (k, v) in out.extra {
        summary.insert(k, v);
    }
    let summary = serde_json::to_string_pretty(&Value::Object(summary))? + "\n";
    let plot = match (&out.plot, cfg.plot()) {
        (Some(spec), true) => Some(plot_from_csv(&out.csv, spec)),
        _ => None,
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(dir.join("results.csv"), &out.csv)?;
    std::fs::write(dir.join("summary.json"), summary)?;
    if let Some(svg) = plot {
        std::fs::write(dir.join("plot.svg"), svg)?;
    }
    Ok(())
}

/// Non-finite floats become strings so that the summary keeps them.
fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

/// Log-log plot of one CSV column against another, one series per distinct group key.
pub fn plot_from_csv(csv: &str, spec: &PlotSpec) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let (Some(xi), Some(yi)) = (col(spec.x), col(spec.y)) else {
        return loglog_svg(&spec.title, spec.x, spec.y, &[]);
    };
    let gi: Vec<usize> = spec.group.iter().filter_map(|g| col(g)).collect();
    let mut series: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        let key = gi.iter().map(|&i| cells.get(i).copied().unwrap_or("")).collect::<Vec<_>>().join(" ");
        let parse = |i: usize| cells.get(i).and_then(|s| s.parse::<f64>().ok());
        if let (Some(x), Some(y)) = (parse(xi), parse(yi)) {
            let e = series.entry(key).or_default();
            e.0.push(x);
            e.1.push(y);
        }
    }
    let refs: Vec<(&str, &[f64], &[f64])> = series
        .iter()
        .map(|(k, (x, y))| (k.as_str(), x.as_slice(), y.as_slice()))
        .collect();
    loglog_svg(&spec.title, spec.x, spec.y, &refs)
}
