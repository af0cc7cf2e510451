//! Test functions with value and gradient oracles, the explicit catalog, and
//! weighted Sobolev seminorms.

mod omega;
pub mod profile;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_pieces, Tol};
use crate::weights::{unit_sphere_area, AxisBox, Weight};

pub use omega::{omega, omega_exact, OmegaTree, OmegaValue, Quadrature};
pub use profile::{smoothstep, LineWeight, Piece, Profile};

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Constant(f64),
    /// `f(x) = φ(x)` on the line.
    Line(Profile),
    /// `f(x) = φ(|x − c|)`.
    Radial { center: Vec<f64>, profile: Profile },
    /// `height · 1_{[lo, hi)}`.
    Indicator { lo: Vec<f64>, hi: Vec<f64>, height: f64 },
    Callable { value: ValueFn, grad: GradFn },
}

/// A function on ℝⁿ with a gradient oracle and optional exact helpers.
#[derive(Clone)]
pub struct TestFunction {
    n: usize,
    label: String,
    shape: Shape,
    support_radius: Option<f64>,
    lipschitz: Option<f64>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("support_radius", &self.support_radius)
            .finish()
    }
}

impl TestFunction {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Radius outside which the function is constant, if known.
    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    /// Upper bound for `|∇f|`, if finite and known.
    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Constant(c) => *c,
            Shape::Line(p) => p.value(x[0]),
            Shape::Radial { center, profile } => profile.value(dist(x, center)),
            Shape::Indicator { lo, hi, height } => {
                if lo.iter().zip(hi).zip(x).all(|((a, b), t)| a <= t && t < b) {
                    *height
                } else {
                    0.0
                }
            }
            Shape::Callable { value, .. } => value(x),
        }
    }

    /// Classical gradient where it exists (a.e.).
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.shape {
            Shape::Constant(_) | Shape::Indicator { .. } => vec![0.0; self.n],
            Shape::Line(p) => vec![p.deriv(x[0])],
            Shape::Radial { center, profile } => {
                let r = dist(x, center);
                if r == 0.0 {
                    return vec![0.0; self.n];
                }
                let d = profile.deriv(r);
                x.iter().zip(center).map(|(a, c)| d * (a - c) / r).collect()
            }
            Shape::Callable { grad, .. } => grad(x),
        }
    }

    pub fn grad_norm(&self, x: &[f64]) -> f64 {
        self.gradient(x).iter().map(|g| g * g).sum::<f64>().sqrt()
    }

    /// Points (n = 1) or radii (radial) where the function is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Line(p) => p.knots().iter().copied().filter(|t| t.is_finite()).collect(),
            Shape::Radial { center, profile } if self.n == 1 => {
                let mut v = vec![center[0]];
                for &r in profile.knots().iter().filter(|t| t.is_finite() && **t > 0.0) {
                    v.push(center[0] - r);
                    v.push(center[0] + r);
                }
                v
            }
            Shape::Indicator { lo, hi, .. } if self.n == 1 => vec![lo[0], hi[0]],
            _ => vec![],
        }
    }

    pub(crate) fn line_profile(&self) -> Option<&Profile> {
        match &self.shape {
            Shape::Line(p) => Some(p),
            _ => None,
        }
    }

    pub(crate) fn radial(&self) -> Option<(&[f64], &Profile)> {
        match &self.shape {
            Shape::Radial { center, profile } => Some((center, profile)),
            _ => None,
        }
    }

    pub(crate) fn indicator(&self) -> Option<(&[f64], &[f64], f64)> {
        match &self.shape {
            Shape::Indicator { lo, hi, height } => Some((lo, hi, *height)),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.shape, Shape::Constant(_))
    }

    /// Wrap arbitrary oracles.
    pub fn callable(
        label: impl Into<String>,
        n: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> TestFunction {
        TestFunction {
            n,
            label: label.into(),
            shape: Shape::Callable {
                value: Arc::new(value),
                grad: Arc::new(grad),
            },
            support_radius: None,
            lipschitz: None,
        }
    }

    pub fn with_support_radius(mut self, r: f64) -> Self {
        self.support_radius = Some(r);
        self
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    /// `‖ |∇f| ‖_{L^p_υ}^p` over ℝⁿ, or over `window` when given.
    pub fn seminorm_pow(&self, w: &Weight, p: f64, window: Option<&AxisBox>) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(invalid(format!("seminorm needs p >= 1, got {p}")));
        }
        if let Some(d) = w.dim() {
            if d != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, got: d });
            }
        }
        match &self.shape {
            Shape::Constant(_) => Ok(0.0),
            Shape::Indicator { .. } => Err(Error::Domain(
                "an indicator has a measure-valued gradient, not an L^p one".into(),
            )),
            Shape::Line(prof) => {
                let (u, v) = match window {
                    Some(b) => (b.lo[0], b.hi[0]),
                    None => (f64::NEG_INFINITY, f64::INFINITY),
                };
                line_grad_integral(prof, u, v, p, w)
            }
            Shape::Radial { center, profile } => {
                if window.is_none() {
                    if let Some(v) = radial_grad_integral(self.n, center, profile, p, w)? {
                        return Ok(v);
                    }
                }
                let b = match window {
                    Some(b) => b.clone(),
                    None => {
                        let r = self
                            .support_radius
                            .ok_or_else(|| Error::Domain("unbounded gradient support".into()))?;
                        AxisBox::new(center.iter().map(|c| c - r).collect(), center.iter().map(|c| c + r).collect())?
                    }
                };
                self.numeric_grad_integral(&b, p, w)
            }
            Shape::Callable { .. } => {
                let b = match window {
                    Some(b) => b.clone(),
                    None => {
                        let r = self
                            .support_radius
                            .ok_or_else(|| Error::Domain("callable function needs a support radius or window".into()))?;
                        AxisBox::new(vec![-r; self.n], vec![r; self.n])?
                    }
                };
                self.numeric_grad_integral(&b, p, w)
            }
        }
    }

    /// `‖ |∇f| ‖_{L^p_υ}`.
    pub fn seminorm(&self, w: &Weight, p: f64, window: Option<&AxisBox>) -> Result<f64> {
        Ok(self.seminorm_pow(w, p, window)?.powf(1.0 / p))
    }

    /// `‖f‖_{L^1_υ}` over a box.
    pub fn l1_norm(&self, w: &Weight, b: &AxisBox) -> Result<f64> {
        self.lp_norm_pow(w, 1.0, b)
    }

    /// `∫_b |f|^p υ`.
    pub fn lp_norm_pow(&self, w: &Weight, p: f64, b: &AxisBox) -> Result<f64> {
        if let Shape::Indicator { lo, hi, height } = &self.shape {
            let ilo: Vec<f64> = lo.iter().zip(&b.lo).map(|(x, y)| x.max(*y)).collect();
            let ihi: Vec<f64> = hi.iter().zip(&b.hi).map(|(x, y)| x.min(*y)).collect();
            if ilo.iter().zip(&ihi).any(|(x, y)| x >= y) {
                return Ok(0.0);
            }
            return Ok(height.abs().powf(p) * w.mass_box(&AxisBox::new(ilo, ihi)?)?);
        }
        let tol = Tol::new(1e-13, 1e-10);
        let v = match self.n {
            1 => {
                let mut breaks = self.kinks();
                breaks.extend(singular_coords_1d(w));
                integrate_pieces(
                    |x| self.value(&[x]).abs().powf(p) * w.value(&[x]),
                    b.lo[0],
                    b.hi[0],
                    &breaks,
                    tol,
                )
            }
            2 => integrate_pieces(
                |x| {
                    integrate_pieces(
                        |y| self.value(&[x, y]).abs().powf(p) * w.value(&[x, y]),
                        b.lo[1],
                        b.hi[1],
                        &[],
                        tol,
                    )
                },
                b.lo[0],
                b.hi[0],
                &[],
                tol,
            ),
            _ => return Err(invalid("L^p norms support n <= 2")),
        };
        if !v.is_finite() {
            return Err(Error::Domain("L^p integral diverged".into()));
        }
        Ok(v)
    }

    /// `⨍_Q |f|`.
    pub fn abs_mean(&self, q: &AxisBox) -> Result<f64> {
        Ok(self.l1_norm(&Weight::Constant(1.0), q)? / q.volume())
    }

    /// Circles where a radial profile has knots, and singular points of `f` and `w` (n = 2).
    fn plane_breaks(&self, w: &Weight) -> (Vec<([f64; 2], f64)>, Vec<[f64; 2]>) {
        let mut circles = Vec::new();
        let mut points = Vec::new();
        if let Shape::Radial { center, profile } = &self.shape {
            let c = [center[0], center[1]];
            points.push(c);
            for &r in profile.knots().iter().filter(|t| t.is_finite() && **t > 0.0) {
                circles.push((c, r));
            }
        }
        if let Weight::PowerCentered { center, .. } = w {
            points.push([center[0], center[1]]);
        }
        (circles, points)
    }

    fn numeric_grad_integral(&self, b: &AxisBox, p: f64, w: &Weight) -> Result<f64> {
        let tol = Tol::new(1e-13, 1e-10);
        let mut kinks = self.kinks();
        kinks.extend(singular_coords_1d(w));
        let v = match self.n {
            1 => integrate_pieces(
                |x| self.grad_norm(&[x]).powf(p) * w.value(&[x]),
                b.lo[0],
                b.hi[0],
                &kinks,
                tol,
            ),
            2 => {
                let (circles, points) = self.plane_breaks(w);
                let mut outer: Vec<f64> = points.iter().map(|q| q[0]).collect();
                outer.extend(circles.iter().flat_map(|&(c, r)| [c[0] - r, c[0] + r]));
                integrate_pieces(
                    |x| {
                        let mut inner: Vec<f64> = points.iter().map(|q| q[1]).collect();
                        for &(c, r) in &circles {
                            if (x - c[0]).abs() < r {
                                let h = (r * r - (x - c[0]) * (x - c[0])).sqrt();
                                inner.extend([c[1] - h, c[1] + h]);
                            }
                        }
                        integrate_pieces(
                            |y| self.grad_norm(&[x, y]).powf(p) * w.value(&[x, y]),
                            b.lo[1],
                            b.hi[1],
                            &inner,
                            tol,
                        )
                    },
                    b.lo[0],
                    b.hi[0],
                    &outer,
                    tol,
                )
            }
            _ => return Err(invalid("numeric seminorms support n <= 2")),
        };
        if !v.is_finite() {
            return Err(Error::Domain("gradient integral diverged".into()));
        }
        Ok(v)
    }
}

fn dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn line_grad_integral(prof: &Profile, u: f64, v: f64, p: f64, w: &Weight) -> Result<f64> {
    match w {
        Weight::Constant(c) => prof.grad_pow_integral(u, v, p, LineWeight { scale: *c, center: 0.0, exponent: 0.0 }),
        Weight::PowerCentered { center, exponent } => prof.grad_pow_integral(
            u,
            v,
            p,
            LineWeight {
                scale: 1.0,
                center: center[0],
                exponent: *exponent,
            },
        ),
        other => {
            let (u, v) = finite_support(prof, u, v)?;
            prof.grad_pow_integral_with(u, v, p, |t| other.value(&[t]), &singular_coords_1d(other))
        }
    }
}

/// Clip an integration range to the finite knots where the derivative lives.
fn finite_support(prof: &Profile, u: f64, v: f64) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, piece) in prof.pieces().iter().enumerate() {
        if piece.direction() != 0 {
            lo = lo.min(prof.knots()[i]);
            hi = hi.max(prof.knots()[i + 1]);
        }
    }
    if lo > hi {
        return Ok((u, u));
    }
    let (a, b) = (u.max(lo), v.min(hi));
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("gradient support is unbounded".into()));
    }
    Ok((a, b.max(a)))
}

/// Coordinates where a one-dimensional weight may be singular or kinked.
fn singular_coords_1d(w: &Weight) -> Vec<f64> {
    match w {
        Weight::PowerCentered { center, .. } => vec![center[0]],
        Weight::ProductOfOneD(f) => f.iter().flat_map(singular_coords_1d).collect(),
        Weight::Callable(c) => c.singular_points.iter().filter_map(|p| p.first().copied()).collect(),
        Weight::Constant(_) => vec![],
    }
}

fn radial_grad_integral(n: usize, center: &[f64], prof: &Profile, p: f64, w: &Weight) -> Result<Option<f64>> {
    let sphere = unit_sphere_area(n);
    match w {
        Weight::Constant(c) => Ok(Some(prof.grad_pow_integral(
            0.0,
            f64::INFINITY,
            p,
            LineWeight {
                scale: c * sphere,
                center: 0.0,
                exponent: (n - 1) as f64,
            },
        )?)),
        Weight::PowerCentered { center: wc, exponent } if wc.as_slice() == center => Ok(Some(prof.grad_pow_integral(
            0.0,
            f64::INFINITY,
            p,
            LineWeight {
                scale: sphere,
                center: 0.0,
                exponent: exponent + (n - 1) as f64,
            },
        )?)),
        other if n == 1 => match prof.mirrored(center[0]) {
            Some(line) => Ok(Some(line_grad_integral(&line, f64::NEG_INFINITY, f64::INFINITY, p, other)?)),
            None => Ok(None),
        },
        _ => Ok(None),
    }
}

/// Named catalog entry, as it appears in config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FunctionSpec {
    Constant {
        #[serde(default)]
        value: f64,
    },
    LinearRamp {
        #[serde(default = "one")]
        slope: f64,
        #[serde(default = "ten")]
        cutoff: f64,
    },
    Tent {
        #[serde(default = "one")]
        height: f64,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    SmoothedIndicator {
        #[serde(default = "one")]
        radius: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    Indicator {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Sharp1Bump,
    Sharp2Fdelta {
        delta: f64,
    },
    Sharp3Fbeta {
        p: f64,
        beta: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn ten() -> f64 {
    10.0
}

impl FunctionSpec {
    pub fn build(&self, n: usize) -> Result<TestFunction> {
        match self {
            FunctionSpec::Constant { value } => constant(n, *value),
            FunctionSpec::LinearRamp { slope, cutoff } => linear_ramp(n, *slope, *cutoff),
            FunctionSpec::Tent { height, radius, center } => {
                tent(n, *height, *radius, center.clone().unwrap_or_else(|| vec![0.0; n]))
            }
            FunctionSpec::SmoothedIndicator { radius, width, center } => {
                smoothed_indicator(n, *radius, *width, center.clone().unwrap_or_else(|| vec![0.0; n]))
            }
            FunctionSpec::Indicator { lo, hi } => indicator(lo.clone(), hi.clone()),
            FunctionSpec::Sharp1Bump => {
                check_1d(n)?;
                sharp1_bump()
            }
            FunctionSpec::Sharp2Fdelta { delta } => {
                check_1d(n)?;
                sharp2_fdelta(*delta)
            }
            FunctionSpec::Sharp3Fbeta { p, beta } => {
                check_1d(n)?;
                sharp3_fbeta(*p, *beta)
            }
        }
    }
}

fn check_1d(n: usize) -> Result<()> {
    if n != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: n });
    }
    Ok(())
}

/// Build a catalog function by name with parameters given as a JSON object.
pub fn catalog(name: &str, n: usize, params: &serde_json::Value) -> Result<TestFunction> {
    let mut obj = match params {
        serde_json::Value::Object(m) => m.clone(),
        serde_json::Value::Null => serde_json::Map::new(),
        _ => return Err(invalid("catalog parameters must be an object")),
    };
    obj.insert("name".into(), serde_json::Value::String(name.to_string()));
    let spec: FunctionSpec =
        serde_json::from_value(serde_json::Value::Object(obj)).map_err(|e| invalid(format!("catalog entry {name}: {e}")))?;
    spec.build(n)
}

pub fn constant(n: usize, c: f64) -> Result<TestFunction> {
    if n == 0 {
        return Err(invalid("dimension must be positive"));
    }
    Ok(TestFunction {
        n,
        label: format!("constant({c})"),
        shape: Shape::Constant(c),
        support_radius: Some(0.0),
        lipschitz: Some(0.0),
    })
}

/// `n = 1`: `s · clamp(x, −R, R)`; `n ≥ 2`: `s · min(|x|, R)`.
pub fn linear_ramp(n: usize, slope: f64, cutoff: f64) -> Result<TestFunction> {
    if !(cutoff > 0.0) || !slope.is_finite() {
        return Err(invalid("linear ramp needs a positive cutoff and finite slope"));
    }
    let label = format!("linear_ramp(slope={slope}, cutoff={cutoff})");
    if n == 1 {
        let prof = Profile::new(
            vec![f64::NEG_INFINITY, -cutoff, cutoff, f64::INFINITY],
            vec![
                Piece::Const(-slope * cutoff),
                Piece::Linear { t0: 0.0, v0: 0.0, slope },
                Piece::Const(slope * cutoff),
            ],
        )?;
        return Ok(TestFunction {
            n,
            label,
            shape: Shape::Line(prof),
            support_radius: Some(cutoff),
            lipschitz: Some(slope.abs()),
        });
    }
    let prof = Profile::new(
        vec![0.0, cutoff, f64::INFINITY],
        vec![Piece::Linear { t0: 0.0, v0: 0.0, slope }, Piece::Const(slope * cutoff)],
    )?;
    radial(n, label, vec![0.0; n], prof, cutoff)
}

fn radial(n: usize, label: String, center: Vec<f64>, profile: Profile, support: f64) -> Result<TestFunction> {
    if center.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: center.len() });
    }
    let lip = profile.lipschitz();
    Ok(TestFunction {
        n,
        label,
        support_radius: Some(support + center.iter().map(|c| c * c).sum::<f64>().sqrt()),
        lipschitz: lip.is_finite().then_some(lip),
        shape: Shape::Radial { center, profile },
    })
}

/// `h · (1 − |x − c|/r)_+`.
pub fn tent(n: usize, height: f64, radius: f64, center: Vec<f64>) -> Result<TestFunction> {
    if !(radius > 0.0) {
        return Err(invalid("tent radius must be positive"));
    }
    let prof = Profile::new(
        vec![0.0, radius, f64::INFINITY],
        vec![
            Piece::Linear {
                t0: 0.0,
                v0: height,
                slope: -height / radius,
            },
            Piece::Const(0.0),
        ],
    )?;
    radial(n, format!("tent(height={height}, radius={radius})"), center, prof, radius)
}

/// Equal to 1 on `B(c, R)`, C¹ smoothstep down to 0 across `R < |x − c| < R + w`.
pub fn smoothed_indicator(n: usize, radius: f64, width: f64, center: Vec<f64>) -> Result<TestFunction> {
    if !(radius >= 0.0) || !(width > 0.0) {
        return Err(invalid("smoothed indicator needs radius >= 0 and width > 0"));
    }
    let mut knots = vec![0.0];
    let mut pieces = vec![];
    if radius > 0.0 {
        knots.push(radius);
        pieces.push(Piece::Const(1.0));
    }
    knots.push(radius + width);
    knots.push(f64::INFINITY);
    pieces.push(Piece::Smooth {
        t0: radius,
        t1: radius + width,
        v0: 1.0,
        v1: 0.0,
    });
    pieces.push(Piece::Const(0.0));
    let prof = Profile::new(knots, pieces)?;
    radial(n, format!("smoothed_indicator(radius={radius}, width={width})"), center, prof, radius + width)
}

/// `height · 1_{[lo, hi)}`.
pub fn indicator(lo: Vec<f64>, hi: Vec<f64>) -> Result<TestFunction> {
    let b = AxisBox::new(lo, hi)?;
    let r = b.lo.iter().chain(&b.hi).fold(0.0f64, |m, v| m.max(v.abs())) * (b.dim() as f64).sqrt();
    Ok(TestFunction {
        n: b.dim(),
        label: "indicator".into(),
        shape: Shape::Indicator {
            lo: b.lo,
            hi: b.hi,
            height: 1.0,
        },
        support_radius: Some(r),
        lipschitz: None,
    })
}

/// C¹ bump with `1_{[0,1]} ≤ f ≤ 1_{(−1,2)}`: plateau on `[0, 1]`, cubic bridges on `(−1, 0)` and `(1, 2)`.
pub fn sharp1_bump() -> Result<TestFunction> {
    let prof = Profile::new(
        vec![0.0, 0.5, 1.5, f64::INFINITY],
        vec![
            Piece::Const(1.0),
            Piece::Smooth {
                t0: 0.5,
                t1: 1.5,
                v0: 1.0,
                v1: 0.0,
            },
            Piece::Const(0.0),
        ],
    )?;
    let mut f = radial(1, "sharp1_bump".into(), vec![0.5], prof, 1.5)?;
    f.support_radius = Some(2.0);
    Ok(f)
}

fn power_ramp(label: String, kappa: f64) -> Result<TestFunction> {
    let prof = Profile::new(
        vec![f64::NEG_INFINITY, 0.0, 1.0, f64::INFINITY],
        vec![
            Piece::Const(0.0),
            Piece::Power {
                t0: 0.0,
                kappa,
                scale: 1.0 / kappa,
                offset: 0.0,
            },
            Piece::Const(1.0 / kappa),
        ],
    )?;
    Ok(TestFunction {
        n: 1,
        label,
        shape: Shape::Line(prof),
        support_radius: Some(1.0),
        lipschitz: None,
    })
}

/// `f(x) = ∫_{−∞}^x t^{δ−1} 1_{(0,1)}(t) dt`.
pub fn sharp2_fdelta(delta: f64) -> Result<TestFunction> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0,1), got {delta}")));
    }
    power_ramp(format!("sharp2_fdelta(delta={delta})"), delta)
}

/// `f_β(y) = ∫_{−∞}^y t^{β−1/p} 1_{(0,1)}(t) dt`, needs `β ∈ (1/p − 1, 1/p)`.
pub fn sharp3_fbeta(p: f64, beta: f64) -> Result<TestFunction> {
    if !(p > 1.0) {
        return Err(invalid("sharp3_fbeta needs p > 1"));
    }
    let kappa = beta + 1.0 - 1.0 / p;
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(invalid(format!("beta must lie in (1/p - 1, 1/p), got {beta}")));
    }
    power_ramp(format!("sharp3_fbeta(p={p}, beta={beta})"), kappa)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_examples() {
        let f = sharp2_fdelta(0.5).unwrap();
        assert!((f.value(&[1.0]) - 2.0).abs() < 1e-15);
        let b = sharp1_bump().unwrap();
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(b.value(&[x]), 1.0);
        }
        for x in [-1.0, -3.0, 2.0, 5.0] {
            assert_eq!(b.value(&[x]), 0.0);
        }
        let r = linear_ramp(1, 1.0, 10.0).unwrap();
        for x in [-9.9, 0.0, 3.0] {
            assert_eq!(r.gradient(&[x]), vec![1.0]);
        }
        let r2 = linear_ramp(2, 1.0, 10.0).unwrap();
        assert!((r2.grad_norm(&[3.0, 4.0]) - 1.0).abs() < 1e-15);
        let by_name = catalog("tent", 1, &serde_json::json!({"center": [1.0]})).unwrap();
        assert_eq!(by_name.value(&[1.0]), 1.0);
        assert!(catalog("sharp2_fdelta", 1, &serde_json::json!({"delta": 1.5})).is_err());
    }

    #[test]
    fn gradients_match_finite_differences() {
        let fs = vec![
            tent(1, 2.0, 1.5, vec![0.2]).unwrap(),
            smoothed_indicator(1, 0.5, 1.0, vec![0.0]).unwrap(),
            sharp1_bump().unwrap(),
            sharp2_fdelta(0.25).unwrap(),
            tent(2, 1.0, 2.0, vec![0.0, 0.0]).unwrap(),
            smoothed_indicator(2, 0.5, 1.0, vec![0.1, 0.2]).unwrap(),
        ];
        let h = 1e-5;
        for f in &fs {
            for k in 0..50 {
                let t = -2.3 + 0.0971 * k as f64;
                let x: Vec<f64> = (0..f.dim()).map(|i| t + 0.137 * i as f64).collect();
                if f.kinks().iter().any(|c| (c - x[0]).abs() < 1e-3) {
                    continue;
                }
                let g = f.gradient(&x);
                for i in 0..f.dim() {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    let fd = (f.value(&xp) - f.value(&xm)) / (2.0 * h);
                    assert!((fd - g[i]).abs() < 1e-4 * (1.0 + g[i].abs()), "{} at {x:?}: {fd} vs {}", f.label(), g[i]);
                }
            }
        }
    }

    #[test]
    fn constant_outside_support() {
        let fs = vec![
            tent(2, 1.0, 2.0, vec![0.5, 0.0]).unwrap(),
            linear_ramp(2, 1.0, 3.0).unwrap(),
            sharp1_bump().unwrap(),
            sharp2_fdelta(0.3).unwrap(),
        ];
        for f in &fs {
            let r = f.support_radius().unwrap();
            let outside: Vec<f64> = (0..40)
                .map(|k| {
                    let th = k as f64 * 0.41;
                    let mut x = vec![(r + 0.5 + k as f64) * th.cos()];
                    if f.dim() == 2 {
                        x.push((r + 0.5 + k as f64) * th.sin());
                    }
                    f.value(&x)
                })
                .collect();
            // a ramp is constant per ray in n=1 only on each side
            let first = outside[0];
            if f.dim() == 2 {
                assert!(outside.iter().all(|v| (v - first).abs() < 1e-12), "{}", f.label());
            } else {
                for s in [-1.0, 1.0] {
                    let a = f.value(&[s * (r + 0.5)]);
                    let b = f.value(&[s * (r + 50.0)]);
                    assert_eq!(a, b, "{}", f.label());
                }
            }
        }
    }

    #[test]
    fn seminorm_examples() {
        let one = Weight::constant(1.0).unwrap();
        let r = linear_ramp(1, 1.0, 10.0).unwrap();
        let win = AxisBox::interval(0.0, 1.0).unwrap();
        assert!((r.seminorm(&one, 1.0, Some(&win)).unwrap() - 1.0).abs() < 1e-15);

        for delta in [0.5, 0.25, 2f64.powi(-8)] {
            let p = 2.0;
            let f = sharp2_fdelta(delta).unwrap();
            let w = Weight::power(vec![0.0], (p - 1.0) * (1.0 - delta)).unwrap();
            let v = f.seminorm_pow(&w, p, None).unwrap();
            assert!((v - 1.0 / delta).abs() < 1e-9 / delta, "{v}");
        }

        let t = tent(1, 1.0, 1.0, vec![1.0]).unwrap();
        assert!((t.seminorm(&one, 2.0, None).unwrap() - 2f64.sqrt()).abs() < 1e-14);

        // numeric and closed routes agree for a weight off the tent center
        let w = Weight::power(vec![0.3], -0.5).unwrap();
        let closed = t.seminorm_pow(&w, 1.0, None).unwrap();
        let expected = w.mass_box(&AxisBox::interval(0.0, 2.0).unwrap()).unwrap();
        assert!((closed - expected).abs() < 1e-9 * expected, "{closed} vs {expected}");

        let t2 = tent(2, 1.0, 1.0, vec![0.0, 0.0]).unwrap();
        let v = t2.seminorm_pow(&one, 1.0, None).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-12);
    }
}
