use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use cdddkit::funcspace::FunctionSpec;
use cdddkit::report::Verdict;
use cdddkit::weights::WeightSpec;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

mod commands;
mod config;
mod output;

use commands::*;
use config::RunConfig;

const OUT_DIR_ENV: &str = "CDDDKIT_OUT_DIR";

/// Numerical checks of weighted weak-type gradient inequalities.
///
/// Every subcommand writes results.csv and summary.json (plus plot.svg with --plot) into
/// the output directory: --out-dir, then `out_dir` in the config, then $CDDDKIT_OUT_DIR,
/// then ./cdddkit-out. Exit status: 0 pass or complete, 2 failed check, 1 usage or config error.
#[derive(Parser)]
#[command(name = "cdddkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weak-type level-set functional against the gradient norm, over a function/weight battery.
    #[command(after_help = "results.csv columns: beta,weight,function,lambda,functional,n_cubes,boundary_share")]
    VerifyCddd(Common),
    /// Difference-quotient functional against the gradient norm and its lower limit constant.
    #[command(after_help = "results.csv columns: weight,function,lambda,functional,tail_flag")]
    VerifyBsvy(Common),
    /// Mean-oscillation level-set functional against the weighted L^p norm.
    #[command(after_help = "results.csv columns: weight,function,lambda,functional,n_cubes,boundary_share")]
    MeanFunctional(Common),
    /// Good-cube classification of random dyadic families, checked by brute force.
    #[command(after_help = "results.csv columns: family,cube,own,best_below,good,brute_good")]
    GoodCubes {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        families: Option<usize>,
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long)]
        max_depth: Option<u32>,
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Scaling sweep toward an endpoint of the weight class, with a fitted log-log slope.
    #[command(
        after_help = "results.csv columns: param,lambda,lhs_certified,lhs_full,weight_mass,weight_constant,gradient_pow,certified"
    )]
    Sharpness {
        #[command(flatten)]
        common: Common,
        /// a1, ap or beta-limit.
        #[arg(long)]
        case: Option<String>,
        /// Number of parameter values 2^-2, 2^-3, ...
        #[arg(long)]
        deltas: Option<usize>,
        /// Explicit parameter values.
        #[arg(long = "delta", value_delimiter = ',')]
        delta: Vec<f64>,
    },
    /// Growth of the functional ratios over doubling windows, compared with A_p membership.
    #[command(after_help = "results.csv columns: function,functional,window,ratio,growth")]
    ClassifyWeight {
        #[command(flatten)]
        common: Common,
        /// Windows in the doubling schedule.
        #[arg(long)]
        windows: Option<usize>,
    },
    /// Wavelet coefficients and the weak sequence norm against the weighted Sobolev norm.
    #[command(after_help = "results.csv columns: e,j,m,value")]
    WaveletCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        depth: Option<u32>,
        /// Finest wavelet generation.
        #[arg(long)]
        wavelet_j_max: Option<i32>,
    },
    /// A_p constant estimated over dyadic probe boxes around a center.
    #[command(after_help = "results.csv columns: probe,lo,hi,ratio")]
    ApConstant {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        center: Option<Vec<f64>>,
        #[arg(long)]
        k_lo: Option<i32>,
        #[arg(long)]
        k_hi: Option<i32>,
    },
}

/// Flags shared by every subcommand; each one overrides the config key of the same name.
#[derive(Args, Clone)]
struct Common {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long = "p")]
    p: Option<f64>,
    #[arg(long = "q")]
    q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    ceiling: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Accept parameters outside the admissible ranges.
    #[arg(long)]
    exploratory: bool,
    /// Also write plot.svg.
    #[arg(long)]
    plot: bool,
    /// Catalog function name, replacing the configured function(s).
    #[arg(long)]
    function: Option<String>,
    /// Catalog parameter as key=value (repeatable).
    #[arg(long = "function-param", value_name = "KEY=VALUE")]
    function_params: Vec<String>,
    /// Power weight |x - center|^a with this exponent, replacing the configured weight(s).
    #[arg(long, allow_hyphen_values = true)]
    weight_exponent: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    weight_center: Option<Vec<f64>>,
    /// Window lower corner.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    window_lo: Option<Vec<f64>>,
    /// Window upper corner.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    window_hi: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    j_min: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    j_max: Option<i32>,
    #[arg(long)]
    lambda_lo: Option<f64>,
    #[arg(long)]
    lambda_hi: Option<f64>,
    #[arg(long)]
    lambda_count: Option<usize>,
}

impl Common {
    /// The config file with every given flag applied on top.
    fn merged(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! over {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    c.$field = Some(v);
                }
            )*};
        }
        over!(p, q, beta, gamma, seed, ceiling, tolerance, out_dir);
        if self.exploratory {
            c.exploratory = Some(true);
        }
        if self.plot {
            c.plot = Some(true);
        }
        if let Some(name) = &self.function {
            let mut obj = serde_json::Map::new();
            obj.insert("name".into(), json!(name));
            for kv in &self.function_params {
                let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("expected KEY=VALUE, got {kv:?}"))?;
                let v: Value = serde_json::from_str(v).unwrap_or_else(|_| json!(v));
                obj.insert(k.to_string(), v);
            }
            let spec: FunctionSpec = serde_json::from_value(Value::Object(obj)).context("--function")?;
            c.function = Some(spec);
            c.functions.clear();
        } else if !self.function_params.is_empty() {
            return Err(anyhow!("--function-param needs --function"));
        }
        if let Some(a) = self.weight_exponent {
            let n = self.window_lo.as_ref().map(|v| v.len()).unwrap_or_else(|| c.dim());
            let center = self.weight_center.clone().unwrap_or_else(|| vec![0.0; n]);
            c.weight = Some(WeightSpec::Power { center, exponent: a });
            c.weights.clear();
        } else if self.weight_center.is_some() {
            return Err(anyhow!("--weight-center needs --weight-exponent"));
        }
        if self.window_lo.is_some() || self.window_hi.is_some() || self.j_min.is_some() || self.j_max.is_some() {
            let mut w = c.window.clone().unwrap_or_default();
            if let Some(v) = &self.window_lo {
                w.lo = v.clone();
            }
            if let Some(v) = &self.window_hi {
                w.hi = v.clone();
            }
            w.j_min = self.j_min.unwrap_or(w.j_min);
            w.j_max = self.j_max.unwrap_or(w.j_max);
            c.window = Some(w);
        }
        if self.lambda_lo.is_some() || self.lambda_hi.is_some() || self.lambda_count.is_some() {
            let mut l = c.lambda.clone().unwrap_or_default();
            l.lo = self.lambda_lo.or(l.lo);
            l.hi = self.lambda_hi.or(l.hi);
            l.count = self.lambda_count.or(l.count);
            c.lambda = Some(l);
        }
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<Verdict> {
    let (name, cfg, outcome) = match cli.command {
        Command::VerifyCddd(c) => {
            let cfg = c.merged()?;
            ("verify-cddd", cfg.clone(), verify_cddd_cmd(&cfg)?)
        }
        Command::VerifyBsvy(c) => {
            let cfg = c.merged()?;
            ("verify-bsvy", cfg.clone(), verify_bsvy_cmd(&cfg)?)
        }
        Command::MeanFunctional(c) => {
            let cfg = c.merged()?;
            ("mean-functional", cfg.clone(), mean_functional_cmd(&cfg)?)
        }
        Command::GoodCubes {
            common,
            dim,
            families,
            max_size,
            max_depth,
            sigma,
        } => {
            let mut cfg = common.merged()?;
            let mut g = cfg.good_cubes.clone().unwrap_or_default();
            g.dim = dim.or(g.dim);
            g.families = families.or(g.families);
            g.max_size = max_size.or(g.max_size);
            g.max_depth = max_depth.or(g.max_depth);
            g.sigma = sigma.or(g.sigma);
            cfg.good_cubes = Some(g);
            ("good-cubes", cfg.clone(), good_cubes_cmd(&cfg)?)
        }
        Command::Sharpness {
            common,
            case,
            deltas,
            delta,
        } => {
            let mut cfg = common.merged()?;
            let mut s = cfg.sweep.clone().unwrap_or_default();
            s.case = case.or(s.case);
            if deltas.is_some() {
                s.deltas = deltas;
                s.delta.clear();
            }
            if !delta.is_empty() {
                s.delta = delta;
            }
            cfg.sweep = Some(s);
            ("sharpness", cfg.clone(), sharpness_cmd(&cfg)?)
        }
        Command::ClassifyWeight { common, windows } => {
            let mut cfg = common.merged()?;
            let mut s = cfg.classifier.clone().unwrap_or_default();
            s.windows = windows.or(s.windows);
            cfg.classifier = Some(s);
            ("classify-weight", cfg.clone(), classify_weight_cmd(&cfg)?)
        }
        Command::WaveletCheck {
            common,
            order,
            depth,
            wavelet_j_max,
        } => {
            let mut cfg = common.merged()?;
            let mut s = cfg.wavelet.clone().unwrap_or_default();
            s.order = order.or(s.order);
            s.depth = depth.or(s.depth);
            s.j_max = wavelet_j_max.or(s.j_max);
            cfg.wavelet = Some(s);
            ("wavelet-check", cfg.clone(), wavelet_check_cmd(&cfg)?)
        }
        Command::ApConstant {
            common,
            center,
            k_lo,
            k_hi,
        } => {
            let mut cfg = common.merged()?;
            let mut s = cfg.probes.clone().unwrap_or_default();
            s.center = center.or(s.center);
            s.k_lo = k_lo.or(s.k_lo);
            s.k_hi = k_hi.or(s.k_hi);
            cfg.probes = Some(s);
            ("ap-constant", cfg.clone(), ap_constant_cmd(&cfg)?)
        }
    };
    let dir = cfg
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("cdddkit-out"));
    let verdict = outcome.verdict;
    output::write_all(&dir, name, &cfg, outcome)?;
    eprintln!("{name}: {} ({})", verdict.as_str(), dir.display());
    Ok(verdict)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Verdict::Fail) => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
