//! Piecewise one-variable profiles used to build test functions, either as
//! `f(x) = φ(x)` on the line or radially as `f(x) = φ(|x − c|)`.

use crate::error::{Error, Result};
use crate::quad::tanh_sinh;

/// `s(u) = 3u² − 2u³`, the C¹ bridge from 0 to 1 on `[0, 1]`.
pub fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

fn smoothstep_deriv(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        0.0
    } else {
        6.0 * u * (1.0 - u)
    }
}

/// One piece of a profile.
#[derive(Clone, Debug, PartialEq)]
pub enum Piece {
    Const(f64),
    /// `v0 + slope (t − t0)`.
    Linear { t0: f64, v0: f64, slope: f64 },
    /// `offset + scale (t − t0)^κ` for `t > t0`.
    Power { t0: f64, kappa: f64, scale: f64, offset: f64 },
    /// `v0 + (v1 − v0) s((t − t0)/(t1 − t0))`.
    Smooth { t0: f64, t1: f64, v0: f64, v1: f64 },
}

impl Piece {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Piece::Const(c) => c,
            Piece::Linear { t0, v0, slope } => v0 + slope * (t - t0),
            Piece::Power { t0, kappa, scale, offset } => offset + scale * (t - t0).max(0.0).powf(kappa),
            Piece::Smooth { t0, t1, v0, v1 } => v0 + (v1 - v0) * smoothstep((t - t0) / (t1 - t0)),
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match *self {
            Piece::Const(_) => 0.0,
            Piece::Linear { slope, .. } => slope,
            Piece::Power { t0, kappa, scale, .. } => scale * kappa * (t - t0).max(0.0).powf(kappa - 1.0),
            Piece::Smooth { t0, t1, v0, v1 } => (v1 - v0) * smoothstep_deriv((t - t0) / (t1 - t0)) / (t1 - t0),
        }
    }

    /// `+1` nondecreasing, `-1` nonincreasing, `0` constant.
    pub fn direction(&self) -> i8 {
        let s = match *self {
            Piece::Const(_) => 0.0,
            Piece::Linear { slope, .. } => slope,
            Piece::Power { scale, .. } => scale,
            Piece::Smooth { v0, v1, .. } => v1 - v0,
        };
        if s > 0.0 {
            1
        } else if s < 0.0 {
            -1
        } else {
            0
        }
    }

    /// `∫_u^v φ(t) (2t − a − b) dt`, exact.
    pub fn moment_integral(&self, u: f64, v: f64, a: f64, b: f64) -> f64 {
        let ab = a + b;
        match *self {
            Piece::Const(c) => c * (v - u) * ((u - a) + (v - b)),
            Piece::Linear { t0, v0, slope } => {
                // 2(c + slope s) s in s = t − ab/2, factored to avoid cancelling primitives
                let m = 0.5 * ab;
                let c = v0 + slope * (m - t0);
                let (sv, su) = (v - m, u - m);
                (v - u) * (c * ((u - a) + (v - b)) + 2.0 * slope * (sv * sv + sv * su + su * su) / 3.0)
            }
            Piece::Power { t0, kappa, scale, offset } => {
                let prim = |t: f64| {
                    let s = (t - t0).max(0.0);
                    offset * (t * t - ab * t)
                        + scale
                            * (2.0 * s.powf(kappa + 2.0) / (kappa + 2.0)
                                + (2.0 * t0 - ab) * s.powf(kappa + 1.0) / (kappa + 1.0))
                };
                prim(v) - prim(u)
            }
            Piece::Smooth { .. } => {
                // cubic times linear: four-point Gauss is exact
                let (x, w) = crate::quad::gauss_legendre_on(4, u, v);
                x.iter().zip(&w).map(|(t, wt)| wt * self.value(*t) * (2.0 * t - ab)).sum()
            }
        }
    }
}

/// A piecewise profile on `(knots[0], knots[last])`.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    knots: Vec<f64>,
    pieces: Vec<Piece>,
}

/// Weight seen along the profile variable: `scale · |t − center|^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineWeight {
    pub scale: f64,
    pub center: f64,
    pub exponent: f64,
}

impl Profile {
    pub fn new(knots: Vec<f64>, pieces: Vec<Piece>) -> Result<Self> {
        if knots.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(Error::InvalidParameter("profile needs one more knot than pieces".into()));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("profile knots must increase".into()));
        }
        Ok(Profile { knots, pieces })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    fn locate(&self, t: f64) -> usize {
        let k = self.knots.partition_point(|&x| x <= t);
        k.saturating_sub(1).min(self.pieces.len() - 1)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.pieces[self.locate(t)].value(t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.pieces[self.locate(t)].deriv(t)
    }

    /// `+1`/`-1` if monotone overall, `0` if constant, `None` if it changes direction.
    pub fn monotone_direction(&self) -> Option<i8> {
        let mut dir = 0;
        for p in &self.pieces {
            let d = p.direction();
            if d != 0 {
                if dir != 0 && d != dir {
                    return None;
                }
                dir = d;
            }
        }
        Some(dir)
    }

    /// `∫_a^b φ(t)(2t − a − b) dt`.
    pub fn moment(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            let u = self.knots[i].max(a);
            let v = self.knots[i + 1].min(b);
            if u < v {
                total += p.moment_integral(u, v, a, b);
            }
        }
        total
    }

    /// The line profile `x ↦ φ(|x − c|)` of a radial profile starting at 0.
    pub fn mirrored(&self, c: f64) -> Option<Profile> {
        if self.knots[0] != 0.0 {
            return None;
        }
        let mut knots = Vec::new();
        let mut pieces = Vec::new();
        for i in (0..self.pieces.len()).rev() {
            knots.push(c - self.knots[i + 1]);
            pieces.push(match self.pieces[i] {
                Piece::Const(v) => Piece::Const(v),
                Piece::Linear { t0, v0, slope } => Piece::Linear { t0: c - t0, v0, slope: -slope },
                Piece::Smooth { t0, t1, v0, v1 } => Piece::Smooth {
                    t0: c - t1,
                    t1: c - t0,
                    v0: v1,
                    v1: v0,
                },
                Piece::Power { .. } => return None,
            });
        }
        for i in 0..self.pieces.len() {
            knots.push(c + self.knots[i]);
            pieces.push(self.pieces[i].clone());
        }
        knots.push(c + self.knots[self.pieces.len()]);
        // the two pieces meeting at c stay separate; both are valid on their side
        Profile::new(knots, pieces).ok()
    }

    /// Largest `|φ'|` over the profile (numerically sampled for smooth pieces).
    pub fn lipschitz(&self) -> f64 {
        let mut best: f64 = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            match *p {
                Piece::Const(_) => {}
                Piece::Linear { slope, .. } => best = best.max(slope.abs()),
                Piece::Power { kappa, .. } if kappa < 1.0 => return f64::INFINITY,
                _ => {
                    let (a, b) = (self.knots[i], self.knots[i + 1]);
                    for k in 0..=64 {
                        let t = a + (b - a) * k as f64 / 64.0;
                        best = best.max(p.deriv(t).abs());
                    }
                }
            }
        }
        best
    }

    /// `∫_u^v |φ'(t)|^p w(t) dt` with `w = scale·|t − center|^exponent`.
    pub fn grad_pow_integral(&self, u: f64, v: f64, p: f64, w: LineWeight) -> Result<f64> {
        let mut total = 0.0;
        for (i, piece) in self.pieces.iter().enumerate() {
            let a = self.knots[i].max(u);
            let b = self.knots[i + 1].min(v);
            if !(a < b) {
                continue;
            }
            total += piece_grad_pow(piece, a, b, p, w)?;
        }
        Ok(total)
    }

    /// `∫_u^v |φ'(t)|^p g(t) dt` for a general nonnegative `g`, splitting at `breaks`.
    pub fn grad_pow_integral_with<G: Fn(f64) -> f64>(&self, u: f64, v: f64, p: f64, g: G, breaks: &[f64]) -> Result<f64> {
        let mut edges: Vec<f64> = self.knots.iter().chain(breaks).copied().filter(|t| *t > u && *t < v).collect();
        edges.push(u);
        edges.push(v);
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let mut total = 0.0;
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::Domain("gradient integral over an unbounded interval".into()));
            }
            let mid = 0.5 * (a + b);
            let piece = &self.pieces[self.locate(mid)];
            if piece.direction() == 0 {
                continue;
            }
            total += tanh_sinh(|t, _, _| piece.deriv(t).abs().powf(p) * g(t), a, b, 1e-12)?;
        }
        Ok(total)
    }
}

fn power_prim(s: f64, e1: f64) -> f64 {
    s.signum() * s.abs().powf(e1) / e1
}

fn piece_grad_pow(piece: &Piece, a: f64, b: f64, p: f64, w: LineWeight) -> Result<f64> {
    let ex = w.exponent;
    match *piece {
        Piece::Const(_) => Ok(0.0),
        Piece::Linear { slope, .. } => {
            if ex == 0.0 {
                return Ok(slope.abs().powf(p) * w.scale * (b - a));
            }
            if ex <= -1.0 && a <= w.center && w.center <= b {
                return Err(Error::Domain("weight not integrable on the gradient support".into()));
            }
            Ok(slope.abs().powf(p) * w.scale * (power_prim(b - w.center, ex + 1.0) - power_prim(a - w.center, ex + 1.0)))
        }
        Piece::Power { t0, kappa, scale, .. } if ex == 0.0 || w.center == t0 => {
            let e = (kappa - 1.0) * p + ex;
            if e <= -1.0 {
                return Err(Error::Domain("|f'|^p w is not integrable at the profile singularity".into()));
            }
            let c = (scale * kappa).abs().powf(p) * w.scale;
            Ok(c * (power_prim(b - t0, e + 1.0) - power_prim(a - t0, e + 1.0)))
        }
        _ => {
            let mut total = 0.0;
            let pieces: Vec<(f64, f64)> = if a < w.center && w.center < b && ex != 0.0 {
                vec![(a, w.center), (w.center, b)]
            } else {
                vec![(a, b)]
            };
            for (u, v) in pieces {
                // distances to singular endpoints come from the quadrature, not from t
                total += tanh_sinh(
                    |t, da, db| {
                        let dw = if w.center == u {
                            da
                        } else if w.center == v {
                            db
                        } else {
                            (t - w.center).abs()
                        };
                        let d = match *piece {
                            Piece::Power { t0, kappa, scale, .. } if t0 == u => scale * kappa * da.powf(kappa - 1.0),
                            _ => piece.deriv(t),
                        };
                        d.abs().powf(p) * w.scale * dw.powf(ex)
                    },
                    u,
                    v,
                    1e-12,
                )?;
            }
            Ok(total)
        }
    }
}

/// `|[a1,b1]×[a2,b2] ∩ B(0, r)|` in the plane.
pub fn rect_disk_area(lo: [f64; 2], hi: [f64; 2], r: f64) -> f64 {
    let g = |x: f64, y: f64| -> f64 { x.signum() * y.signum() * quarter_area(x.abs(), y.abs(), r) };
    g(hi[0], hi[1]) - g(lo[0], hi[1]) - g(hi[0], lo[1]) + g(lo[0], lo[1])
}

/// `|[0,X]×[0,Y] ∩ B(0, r)|` for `X, Y ≥ 0`.
fn quarter_area(x: f64, y: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let x = x.min(r);
    let y = y.min(r);
    if x * x + y * y <= r * r {
        return x * y;
    }
    let circ = |t: f64| 0.5 * (t * (r * r - t * t).max(0.0).sqrt() + r * r * (t / r).clamp(-1.0, 1.0).asin());
    let xs = (r * r - y * y).max(0.0).sqrt();
    let xm = xs.min(x);
    y * xm + circ(x) - circ(xm)
}
