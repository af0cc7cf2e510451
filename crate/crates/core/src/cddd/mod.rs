//! Level sets of the renormalized modulus over shifted dyadic grids, the
//! weak-type functional `sup_λ λ^p Σ |Q|^{βp−1} υ(Q)` and its verification
//! against weighted gradient norms.

pub mod chain;
pub mod good;

pub use chain::{sparse_chain_check, ChainReport, ChainSample};
pub use good::{
    check_domination, classify_good, classify_good_brute, cube_weight, forest, random_disjoint_instance, random_family,
    Domination, Forest, GoodPartition,
};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::funcspace::{omega_exact, OmegaTree, Quadrature, TestFunction};
use crate::grid::{Cube, GridWindow};
use crate::par_map;
use crate::report::{grid_max, log_grid, safe_ratio, FunctionalProfile, Verdict, VerificationRecord};
use crate::weights::{ap_constant, probes_around, AxisBox, Weight};

/// Relative threshold tolerance for cubes whose score comes from an exact route.
pub const EXACT_TOL: f64 = 1e-12;

/// Most cubes kept in a profile's certifying list.
const CERTIFYING_CAP: usize = 1000;

/// `β ∈ Ω_{p,n}`: for `p = 1`, `β < 1 − 1/n` or `β > 1`; for `p > 1`, `β ≠ 1/p`.
pub fn beta_admissible(p: f64, beta: f64, n: usize) -> bool {
    if p == 1.0 {
        beta < 1.0 - 1.0 / n as f64 || beta > 1.0
    } else {
        p > 1.0 && beta != 1.0 / p
    }
}

/// Exponent of the weight constant: `p/(p−1)` when `p > 1` and `β ∈ [1/p − 1, 1/p)`, else 1.
pub fn alpha_exponent(p: f64, beta: f64) -> f64 {
    if p > 1.0 && beta >= 1.0 / p - 1.0 && beta < 1.0 / p {
        p / (p - 1.0)
    } else {
        1.0
    }
}

/// Log-spaced λ values; missing endpoints are bracketed from the cube scores.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub count: usize,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        LambdaGrid {
            lo: None,
            hi: None,
            count: 64,
        }
    }
}

impl LambdaGrid {
    pub fn fixed(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 {
            return Err(invalid(format!("bad λ grid [{lo}, {hi}] with {count} points")));
        }
        Ok(LambdaGrid {
            lo: Some(lo),
            hi: Some(hi),
            count,
        })
    }

    /// The same range with `factor` times as many intervals.
    pub fn refined(&self, factor: usize) -> Self {
        LambdaGrid {
            count: (self.count.max(2) - 1) * factor + 1,
            ..*self
        }
    }

    pub fn points(&self, bracket: (f64, f64)) -> Vec<f64> {
        let lo = self.lo.unwrap_or(bracket.0);
        let hi = self.hi.unwrap_or(bracket.1).max(lo);
        log_grid(lo, hi, self.count)
    }
}

/// Parameters of the weak-type functional.
#[derive(Clone, Debug)]
pub struct CdddConfig {
    pub p: f64,
    pub beta: f64,
    pub weight: Weight,
    pub window: GridWindow,
    pub lambdas: LambdaGrid,
    /// Relative threshold tolerance for sampled scores.
    pub tol: f64,
    pub quadrature: Quadrature,
    /// Inadmissible `β` accepted; records are marked accordingly.
    pub exploratory: bool,
}

impl CdddConfig {
    /// Validated configuration; `β ∉ Ω_{p,n}` is rejected.
    pub fn new(p: f64, beta: f64, weight: Weight, window: GridWindow) -> Result<Self> {
        let cfg = Self::exploratory(p, beta, weight, window)?;
        if !cfg.admissible() {
            return Err(Error::Admissibility(format!(
                "beta = {beta} is outside Omega_{{p,n}} for p = {p}, n = {}",
                cfg.window.dim()
            )));
        }
        Ok(CdddConfig {
            exploratory: false,
            ..cfg
        })
    }

    /// Configuration that accepts any `β`.
    pub fn exploratory(p: f64, beta: f64, weight: Weight, window: GridWindow) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(invalid(format!("p must lie in [1, inf), got {p}")));
        }
        if !beta.is_finite() {
            return Err(invalid("beta must be finite"));
        }
        let n = window.dim();
        if let Some(d) = weight.dim() {
            if d != n {
                return Err(Error::DimensionMismatch { expected: n, got: d });
            }
        }
        Ok(CdddConfig {
            p,
            beta,
            weight,
            quadrature: Quadrature::for_dim(n),
            window,
            lambdas: LambdaGrid::default(),
            tol: 1e-6,
            exploratory: true,
        })
    }

    pub fn with_lambdas(mut self, g: LambdaGrid) -> Self {
        self.lambdas = g;
        self
    }

    pub fn with_window(mut self, w: GridWindow) -> Self {
        self.window = w;
        self
    }

    pub fn admissible(&self) -> bool {
        beta_admissible(self.p, self.beta, self.window.dim())
    }

    /// `β + 1 − 1/p`, the exponent in the level condition.
    pub fn level_exponent(&self) -> f64 {
        self.beta + 1.0 - 1.0 / self.p
    }

    /// `βp − 1`, the exponent of `|Q|` in the sum.
    pub fn weight_exponent(&self) -> f64 {
        self.beta * self.p - 1.0
    }

    pub fn alpha(&self) -> f64 {
        alpha_exponent(self.p, self.beta)
    }
}

/// One window cube with its score (`ω_Q` or a mean) and mass.
#[derive(Clone, Debug, Serialize)]
pub struct CubeEntry {
    pub cube: Cube,
    pub score: f64,
    /// Score from a closed form rather than sampling.
    pub exact: bool,
    /// Sampling met its tolerance.
    pub accurate: bool,
    pub volume: f64,
    pub mass: f64,
    pub boundary: bool,
}

/// Cube scores over a window, in enumeration order.
#[derive(Clone, Debug)]
pub struct CubeTable {
    pub entries: Vec<CubeEntry>,
    /// Relative tolerance of sampled scores.
    pub tol: f64,
}

/// Cubes passing a strict threshold, with the ones too close to call.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LevelSet {
    pub cubes: Vec<Cube>,
    /// Cubes whose score is within tolerance of the threshold, on either side.
    pub flagged: Vec<Cube>,
}

impl CubeTable {
    /// `ω_Q(f)` and `υ(Q)` for every window cube.
    pub fn omega(f: &TestFunction, window: &GridWindow, w: &Weight, quad: &Quadrature) -> Result<Self> {
        if f.dim() != window.dim() {
            return Err(Error::DimensionMismatch {
                expected: window.dim(),
                got: f.dim(),
            });
        }
        let cubes: Vec<Cube> = window.enumerate()?.collect();
        let exact: Vec<Option<f64>> = par_map(&cubes, |q| omega_exact(f, &AxisBox::from(q)));
        let sampled = sampled_omegas(f, window, &cubes, &exact, quad);
        Self::assemble(cubes, window, w, quad.rel_tol, |i, _| match exact[i] {
            Some(v) => (v, true, true),
            None => {
                let (v, acc) = sampled[&i];
                (v, false, acc)
            }
        })
    }

    /// `⨍_Q |f|` and `υ(Q)` for every window cube.
    pub fn mean(f: &TestFunction, window: &GridWindow, w: &Weight) -> Result<Self> {
        let cubes: Vec<Cube> = window.enumerate()?.collect();
        let means: Vec<Result<f64>> = par_map(&cubes, |q| f.abs_mean(&AxisBox::from(q)));
        let means: Vec<f64> = means.into_iter().collect::<Result<_>>()?;
        let exact = f.indicator().is_some() || f.is_constant();
        Self::assemble(cubes, window, w, 1e-9, |i, _| (means[i], exact, true))
    }

    fn assemble(
        cubes: Vec<Cube>,
        window: &GridWindow,
        w: &Weight,
        tol: f64,
        score: impl Fn(usize, &Cube) -> (f64, bool, bool),
    ) -> Result<Self> {
        let masses: Vec<Result<f64>> = par_map(&cubes, |q| w.mass_cube(q));
        let mut entries = Vec::with_capacity(cubes.len());
        for (i, (cube, mass)) in cubes.into_iter().zip(masses).enumerate() {
            let (s, exact, accurate) = score(i, &cube);
            entries.push(CubeEntry {
                score: s,
                exact,
                accurate,
                volume: cube.volume(),
                mass: mass?,
                boundary: window.touches_boundary(&cube),
                cube,
            });
        }
        Ok(CubeTable { entries, tol })
    }

    fn entry_tol(&self, e: &CubeEntry) -> f64 {
        if e.exact {
            EXACT_TOL
        } else {
            self.tol
        }
    }

    /// Cubes with `score > λ |Q|^b`.
    pub fn level_set(&self, lambda: f64, b: f64) -> LevelSet {
        let mut out = LevelSet::default();
        for e in &self.entries {
            let thr = lambda * e.volume.powf(b);
            if e.score > thr {
                out.cubes.push(e.cube.clone());
            }
            if (e.score - thr).abs() <= self.entry_tol(e) * e.score.max(thr) {
                out.flagged.push(e.cube.clone());
            }
        }
        out
    }

    /// `λ^p Σ_{score > λ|Q|^b} |Q|^c υ(Q)` summed in enumeration order.
    pub fn functional_at(&self, lambda: f64, p: f64, b: f64, c: f64) -> FunctionalPoint {
        let mut sum = 0.0;
        let mut lo = 0.0;
        let mut hi = 0.0;
        let mut boundary = 0.0;
        let mut count = 0;
        for e in &self.entries {
            let thr = lambda * e.volume.powf(b);
            let term = e.volume.powf(c) * e.mass;
            let near = (e.score - thr).abs() <= self.entry_tol(e) * e.score.max(thr);
            if e.score > thr {
                sum += term;
                count += 1;
                if e.boundary {
                    boundary += term;
                }
                if !near {
                    lo += term;
                }
                hi += term;
            } else if near {
                hi += term;
            }
        }
        let scale = lambda.powf(p);
        FunctionalPoint {
            value: scale * sum,
            lo: scale * lo,
            hi: scale * hi,
            count,
            boundary_share: safe_ratio(boundary, sum),
        }
    }

    /// `score / |Q|^b` per cube.
    pub fn thresholds(&self, b: f64) -> Vec<f64> {
        self.entries.iter().map(|e| e.score / e.volume.powf(b)).collect()
    }

    /// Exact `sup_{λ>0}` of the truncated functional and the λ approached.
    ///
    /// Between consecutive distinct thresholds the level set is fixed and the
    /// value increases with λ, so the supremum is a left limit at a threshold.
    pub fn exact_sup(&self, p: f64, b: f64, c: f64) -> (f64, f64) {
        let t = self.thresholds(b);
        let mut idx: Vec<usize> = (0..t.len()).filter(|&i| t[i] > 0.0).collect();
        idx.sort_by(|&i, &j| t[j].total_cmp(&t[i]));
        let mut best = 0.0;
        let mut arg = f64::NAN;
        let mut acc = 0.0;
        let mut k = 0;
        while k < idx.len() {
            let level = t[idx[k]];
            while k < idx.len() && t[idx[k]] == level {
                let e = &self.entries[idx[k]];
                acc += e.volume.powf(c) * e.mass;
                k += 1;
            }
            let v = level.powf(p) * acc;
            if v > best {
                best = v;
                arg = level;
            }
        }
        (best, arg)
    }

    /// Smallest and largest positive thresholds.
    pub fn bracket(&self, b: f64) -> Option<(f64, f64)> {
        let t = self.thresholds(b);
        let pos = t.iter().copied().filter(|v| *v > 0.0 && v.is_finite());
        let (lo, hi) = pos.fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(v), b.max(v)));
        (hi > 0.0).then_some((lo, hi))
    }

    /// Profile over a λ grid together with the exact supremum.
    pub fn profile(&self, grid: &LambdaGrid, p: f64, b: f64, c: f64) -> FunctionalProfile {
        let bracket = self.bracket(b).unwrap_or((1.0, 1.0));
        let lambdas = grid.points(bracket);
        let pts: Vec<FunctionalPoint> = lambdas.iter().map(|&l| self.functional_at(l, p, b, c)).collect();
        let values: Vec<f64> = pts.iter().map(|q| q.value).collect();
        let (sup, argmax_lambda) = grid_max(&lambdas, &values);
        let (es, ea) = self.exact_sup(p, b, c);
        let level = if sup > 0.0 {
            self.level_set(argmax_lambda, b).cubes
        } else {
            Vec::new()
        };
        FunctionalProfile {
            values_lo: pts.iter().map(|q| q.lo).collect(),
            values_hi: pts.iter().map(|q| q.hi).collect(),
            n_cubes: pts.iter().map(|q| q.count).collect(),
            boundary_share: pts.iter().map(|q| q.boundary_share).collect(),
            flags: pts.iter().map(|q| q.hi > q.lo).collect(),
            lambdas,
            values,
            sup,
            argmax_lambda,
            exact_sup: Some(es),
            exact_argmax: (es > 0.0).then_some(ea),
            certifying_total: level.len(),
            certifying: level.into_iter().take(CERTIFYING_CAP).collect(),
        }
    }
}

/// The functional at one λ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionalPoint {
    pub value: f64,
    /// Threshold-flagged cubes excluded.
    pub lo: f64,
    /// Threshold-flagged cubes included.
    pub hi: f64,
    pub count: usize,
    pub boundary_share: f64,
}

/// Sampled `ω` for the cubes without an exact route, one tree per top-generation ancestor.
fn sampled_omegas(
    f: &TestFunction,
    window: &GridWindow,
    cubes: &[Cube],
    exact: &[Option<f64>],
    quad: &Quadrature,
) -> HashMap<usize, (f64, bool)> {
    let pending: Vec<usize> = (0..cubes.len()).filter(|&i| exact[i].is_none()).collect();
    if pending.is_empty() {
        return HashMap::new();
    }
    let n = window.dim();
    let cap = if n == 1 { 18 } else { 8 };
    let span = (window.j_max - window.j_min) as u32;
    let depth = (span + quad.extra_depth).min(cap).max(1);
    let mut roots: Vec<Cube> = pending.iter().map(|&i| cubes[i].ancestor(window.j_max)).collect();
    roots.sort_by_key(|c| (c.shift().thirds().to_vec(), c.index().to_vec()));
    roots.dedup();
    let trees: Vec<(OmegaTree, OmegaTree)> = par_map(&roots, |r| {
        let lo = r.lower();
        (
            OmegaTree::build(f, &lo, r.edge(), depth, quad.gauss_points),
            OmegaTree::build(f, &lo, r.edge(), depth - 1, quad.gauss_points),
        )
    });
    let by_root: HashMap<&Cube, usize> = roots.iter().enumerate().map(|(k, r)| (r, k)).collect();
    let mut out = HashMap::new();
    for i in pending {
        let q = &cubes[i];
        let (fine, coarse) = &trees[by_root[&q.ancestor(window.j_max)]];
        let lo = q.lower();
        let v = fine.lookup(&lo, q.edge()).unwrap_or(f64::NAN);
        let acc = match coarse.lookup(&lo, q.edge()) {
            Some(vc) => (v - vc).abs() / 3.0 <= quad.rel_tol * v.abs().max(1e-300),
            None => false,
        };
        out.insert(i, (v, acc));
    }
    out
}

/// Cubes of the window with `ω_Q(f) > λ|Q|^b`.
pub fn level_set(f: &TestFunction, window: &GridWindow, lambda: f64, b: f64, quad: &Quadrature) -> Result<LevelSet> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    let t = CubeTable::omega(f, window, &Weight::Constant(1.0), quad)?;
    Ok(t.level_set(lambda, b))
}

/// The weak-type functional profile of `f` under `cfg`.
pub fn cddd_functional(cfg: &CdddConfig, f: &TestFunction) -> Result<FunctionalProfile> {
    let t = CubeTable::omega(f, &cfg.window, &cfg.weight, &cfg.quadrature)?;
    Ok(t.profile(&cfg.lambdas, cfg.p, cfg.level_exponent(), cfg.weight_exponent()))
}

/// Probe cubes for the weight constant: dyadic scales around the origin, the
/// window center and the weight's singular points.
pub fn default_probes(w: &Weight, window: &GridWindow) -> Vec<AxisBox> {
    let n = window.dim();
    let lo = window.lo_f64();
    let hi = window.hi_f64();
    let width = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
    let k_lo = window.j_min - 2;
    let k_hi = width.log2().ceil() as i32 + 2;
    let mut centers = vec![vec![0.0; n], lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect()];
    centers.extend(weight_centers(w, n));
    centers.dedup();
    centers.iter().flat_map(|c| probes_around(c, k_lo, k_hi)).collect()
}

fn weight_centers(w: &Weight, n: usize) -> Vec<Vec<f64>> {
    match w {
        Weight::PowerCentered { center, .. } => vec![center.clone()],
        Weight::ProductOfOneD(f) => {
            let c: Vec<f64> = f
                .iter()
                .map(|g| match g {
                    Weight::PowerCentered { center, .. } => center[0],
                    _ => 0.0,
                })
                .collect();
            vec![c]
        }
        Weight::Callable(c) => c.singular_points.iter().filter(|p| p.len() == n).cloned().collect(),
        Weight::Constant(_) => vec![],
    }
}

/// Functional supremum against `[υ]^α ‖∇f‖^p_{L^p_υ}`.
///
/// The left side is the exact supremum over λ for the window family. For
/// `p > 1` and `β ∈ [1/p − 1, 1/p)` the ratio normalized by `1/(1/p − β)` with
/// exponent `p/(p−1)` is reported as well.
pub fn verify_cddd(cfg: &CdddConfig, f: &TestFunction, ceiling: f64) -> Result<(VerificationRecord, FunctionalProfile)> {
    let profile = cddd_functional(cfg, f)?;
    let lhs = profile.best_sup();
    let probes = default_probes(&cfg.weight, &cfg.window);
    let est = ap_constant(&cfg.weight, cfg.p, &probes)?;
    let grad = f.seminorm_pow(&cfg.weight, cfg.p, None)?;
    let alpha = cfg.alpha();
    let rhs = est.value.powf(alpha) * grad;
    let mut rec = VerificationRecord::new("cddd", lhs, rhs).judge_ceiling(ceiling, 0.0);
    rec.admissible = cfg.admissible();
    if est.unbounded() && lhs > 0.0 {
        rec.verdict = Verdict::Inconclusive;
        rec.insert("note", "weight constant unbounded on the probes");
    }
    rec.insert("p", cfg.p);
    rec.insert("beta", cfg.beta);
    rec.insert("alpha", alpha);
    rec.insert("weight_constant", est.value);
    rec.insert("weight_constant_cube", &est.certifying);
    rec.insert("probes", est.probes);
    rec.insert("gradient_norm_p", grad);
    rec.insert("gradient_ratio", safe_ratio(lhs, grad));
    rec.insert("sup_grid", profile.sup);
    rec.insert("argmax_lambda", profile.exact_argmax);
    rec.insert("certifying_cubes", profile.certifying_total);
    let i = profile
        .lambdas
        .iter()
        .position(|&l| l == profile.argmax_lambda)
        .unwrap_or(0);
    rec.insert("boundary_share", profile.boundary_share.get(i).copied().unwrap_or(0.0));
    rec.insert(
        "threshold_spread",
        profile
            .values_hi
            .iter()
            .zip(&profile.values_lo)
            .map(|(h, l)| h - l)
            .fold(0.0, f64::max),
    );
    if cfg.p > 1.0 && cfg.beta >= 1.0 / cfg.p - 1.0 && cfg.beta < 1.0 / cfg.p {
        let norm = est.value.powf(cfg.p / (cfg.p - 1.0)) * grad / (1.0 / cfg.p - cfg.beta);
        rec.insert("normalized_ratio", safe_ratio(lhs, norm));
    }
    Ok((rec, profile))
}

/// `β ∈ (−∞, 1/p − 1) ∪ (1/p, ∞)`, the range of the mean-level functional.
pub fn mean_beta_admissible(p: f64, beta: f64) -> bool {
    beta < 1.0 / p - 1.0 || beta > 1.0 / p
}

/// Functional over cubes with `⨍_Q|f| > λ|Q|^{β−1/p}`, checked against
/// `[υ]_{A_p} ‖f‖^p_{L^p_υ}`.
pub fn mean_functional(
    f: &TestFunction,
    w: &Weight,
    p: f64,
    beta: f64,
    window: &GridWindow,
    grid: &LambdaGrid,
    ceiling: f64,
) -> Result<(FunctionalProfile, VerificationRecord)> {
    if !(p >= 1.0) {
        return Err(invalid(format!("p must lie in [1, inf), got {p}")));
    }
    if !mean_beta_admissible(p, beta) {
        return Err(Error::Admissibility(format!(
            "beta = {beta} lies in the excluded band [1/p - 1, 1/p] for p = {p}"
        )));
    }
    let t = CubeTable::mean(f, window, w)?;
    let b = beta - 1.0 / p;
    let profile = t.profile(grid, p, b, beta * p - 1.0);
    let est = ap_constant(w, p, &default_probes(w, window))?;
    let bx = AxisBox::new(window.lo_f64(), window.hi_f64())?;
    let norm = f.lp_norm_pow(w, p, &bx)?;
    let lhs = profile.best_sup();
    let mut rec = VerificationRecord::new("mean_functional", lhs, est.value * norm).judge_ceiling(ceiling, 0.0);
    rec.insert("p", p);
    rec.insert("beta", beta);
    rec.insert("weight_constant", est.value);
    rec.insert("lp_norm_p", norm);
    rec.insert("sup_grid", profile.sup);
    Ok((profile, rec))
}
