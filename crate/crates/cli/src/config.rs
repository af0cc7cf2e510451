use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use cdddkit::cddd::LambdaGrid;
use cdddkit::funcspace::FunctionSpec;
use cdddkit::grid::{rat_from_f64, GridWindow, Shift};
use cdddkit::weights::{AxisBox, Weight, WeightSpec};
use serde::{Deserialize, Serialize};

/// Everything a run reads. Parameters keep their symbol names (`p`, `q`, `beta`, `gamma`).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ceiling: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Accept parameters outside the admissible ranges and flag them instead.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exploratory: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    /// A battery; used instead of `function` by the commands that accept several.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub functions: Vec<FunctionSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<WeightSpec>,
    /// Extra `beta` values for `verify-cddd` batteries.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub betas: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classifier: Option<ClassifierSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelet: Option<WaveletSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<ProbeSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good_cubes: Option<GoodCubesSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftSet {
    /// The standard grid only.
    Zero,
    /// All `3^n` shifted grids.
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub j_min: i32,
    pub j_max: i32,
    #[serde(default = "zero_shifts")]
    pub shifts: ShiftSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

fn zero_shifts() -> ShiftSet {
    ShiftSet::Zero
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            lo: vec![-8.0],
            hi: vec![8.0],
            j_min: -6,
            j_max: 3,
            shifts: ShiftSet::Zero,
            budget: None,
        }
    }
}

impl WindowSpec {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn grid_window(&self) -> Result<GridWindow> {
        let n = self.dim();
        let shifts = match self.shifts {
            ShiftSet::Zero => vec![Shift::zero(n)],
            ShiftSet::All => Shift::all(n),
        };
        let lo = self.lo.iter().map(|&x| rat_from_f64(x)).collect::<cdddkit::Result<Vec<_>>>()?;
        let hi = self.hi.iter().map(|&x| rat_from_f64(x)).collect::<cdddkit::Result<Vec<_>>>()?;
        let w = GridWindow::new(lo, hi, self.j_min, self.j_max, shifts)?;
        Ok(match self.budget {
            Some(b) => w.with_budget(b as u128),
            None => w,
        })
    }

    pub fn axis_box(&self) -> Result<AxisBox> {
        Ok(AxisBox::new(self.lo.clone(), self.hi.clone())?)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

impl LambdaSpec {
    pub fn grid(&self, default_count: usize) -> Result<LambdaGrid> {
        let count = self.count.unwrap_or(default_count);
        match (self.lo, self.hi) {
            (Some(lo), Some(hi)) => Ok(LambdaGrid::fixed(lo, hi, count)?),
            (lo, hi) => {
                if count < 2 {
                    bail!("the lambda grid needs at least 2 points, got {count}");
                }
                Ok(LambdaGrid { lo, hi, count })
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    /// Number of `delta` (or `kappa`) values `2^{-2}, 2^{-3}, ...`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<usize>,
    /// Explicit parameter grid; overrides `deltas`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full_grid: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierSpec {
    /// Windows in the schedule, each doubling the previous one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub windows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blowup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounded: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveletSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_max: Option<i32>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_lo: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_hi: Option<i32>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoodCubesSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub families: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn window_spec(&self) -> WindowSpec {
        self.window.clone().unwrap_or_default()
    }

    pub fn dim(&self) -> usize {
        self.window_spec().dim()
    }

    pub fn battery(&self) -> Vec<FunctionSpec> {
        let mut out: Vec<FunctionSpec> = self.function.iter().cloned().collect();
        out.extend(self.functions.iter().cloned());
        if out.is_empty() {
            out.push(FunctionSpec::Tent {
                height: 1.0,
                radius: 1.0,
                center: None,
            });
        }
        out
    }

    pub fn weight_specs(&self) -> Vec<WeightSpec> {
        let mut out: Vec<WeightSpec> = self.weight.iter().cloned().collect();
        out.extend(self.weights.iter().cloned());
        if out.is_empty() {
            out.push(WeightSpec::Constant { value: 1.0 });
        }
        out
    }

    pub fn first_weight(&self) -> Result<Weight> {
        Ok(self.weight_specs()[0].build()?)
    }

    pub fn lambda_grid(&self, default_count: usize) -> Result<LambdaGrid> {
        self.lambda.clone().unwrap_or_default().grid(default_count)
    }

    pub fn exploratory(&self) -> bool {
        self.exploratory.unwrap_or(false)
    }

    pub fn plot(&self) -> bool {
        self.plot.unwrap_or(false)
    }
}

/// Short stable label of a weight for CSV columns.
pub fn weight_label(w: &WeightSpec) -> String {
    fn list(v: &[f64]) -> String {
        v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";")
    }
    match w {
        WeightSpec::Constant { value } => format!("constant({value})"),
        WeightSpec::Power { center, exponent } => format!("power({};{exponent})", list(center)),
        WeightSpec::Product { factors } => {
            format!("product({})", factors.iter().map(weight_label).collect::<Vec<_>>().join("*"))
        }
        WeightSpec::Table { points, .. } => format!("table({} points)", points.len()),
    }
}

/// Short stable label of a function for CSV columns.
pub fn function_label(f: &FunctionSpec) -> String {
    let v = serde_json::to_value(f).unwrap_or_default();
    let name = v.get("name").and_then(|n| n.as_str()).unwrap_or("function").to_string();
    let params: Vec<String> = v
        .as_object()
        .map(|m| {
            m.iter()
                .filter(|(k, v)| k.as_str() != "name" && !v.is_null())
                .map(|(k, v)| format!("{k}={}", v.to_string().replace(',', ";")))
                .collect()
        })
        .unwrap_or_default();
    if params.is_empty() {
        name
    } else {
        format!("{name}({})", params.join(";"))
    }
}
