//! One-dimensional quadrature: Gauss–Legendre rules, adaptive Gauss–Kronrod
//! and tanh–sinh for integrable endpoint singularities.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            x[0] = 0.0;
            w[0] = 2.0;
            break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    (
        x.iter().map(|t| c + h * t).collect(),
        w.iter().map(|v| v * h).collect(),
    )
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for k in 0..7 {
        let dx = h * XGK[k];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[k] * s;
        if k % 2 == 1 {
            rg += WG[k / 2] * s;
        }
    }
    let est = rk * h;
    let err = ((rk - rg) * h).abs();
    (est, err)
}

struct Segment {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Tolerances for adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Default for Tol {
    fn default() -> Self {
        Tol {
            abs: 1e-12,
            rel: 1e-10,
            max_segments: 4000,
        }
    }
}

impl Tol {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tol {
            abs,
            rel,
            ..Tol::default()
        }
    }
}

/// Globally adaptive 15-point Gauss–Kronrod integration over `[a, b]`.
///
/// Returns the estimate even when the segment budget runs out; the second
/// component is the accumulated error estimate.
pub fn integrate_gk<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tol) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, val: v, err: e });
    let mut total = v;
    let mut err = e;
    while err > tol.abs.max(tol.rel * total.abs()) && heap.len() < tol.max_segments {
        let s = heap.pop().expect("heap is never empty");
        let m = 0.5 * (s.a + s.b);
        // stop before nodes collapse onto an endpoint singularity
        if m <= s.a || m >= s.b || s.b - s.a < 1e-13 * s.a.abs().max(s.b.abs()) {
            heap.push(s);
            break;
        }
        let (v1, e1) = gk15(&mut f, s.a, m);
        let (v2, e2) = gk15(&mut f, m, s.b);
        total += v1 + v2 - s.val;
        err += e1 + e2 - s.err;
        heap.push(Segment { a: s.a, b: m, val: v1, err: e1 });
        heap.push(Segment { a: m, b: s.b, val: v2, err: e2 });
    }
    // resum to limit drift
    let total: f64 = heap.iter().map(|s| s.val).sum();
    let err: f64 = heap.iter().map(|s| s.err).sum();
    (total, err)
}

/// Adaptive integration that splits at the given interior breakpoints.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64], tol: Tol) -> f64 {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut edges = Vec::with_capacity(pts.len() + 2);
    edges.push(a);
    edges.extend(pts);
    edges.push(b);
    edges
        .windows(2)
        .map(|w| integrate_gk(&mut f, w[0], w[1], tol).0)
        .sum()
}

/// Tanh–sinh quadrature on `[a, b]`, robust to integrable endpoint singularities.
///
/// The integrand receives `(x, distance to a, distance to b)` so singular
/// factors can be evaluated without cancellation near the endpoints.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(mut f: F, a: f64, b: f64, rel: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let h0 = 0.5 * (b - a);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let tmax = 6.5;
    let mut step = 0.5;
    let eval = |t: f64, f: &mut F| -> f64 {
        let s = half_pi * t.sinh();
        let ch = s.cosh();
        let w = half_pi * t.cosh() / (ch * ch);
        // distance of the node to the nearer endpoint, computed without cancellation
        let d = h0 / (s.abs().exp() * ch);
        let (x, da, db) = if t < 0.0 {
            (a + d, d, b - a - d)
        } else {
            (b - d, b - a - d, d)
        };
        if d <= 0.0 || !x.is_finite() {
            return 0.0;
        }
        w * f(x, da, db)
    };
    let mut sum = eval(0.0, &mut f);
    let mut k = 1;
    loop {
        let t = k as f64 * step;
        if t > tmax {
            break;
        }
        sum += eval(t, &mut f) + eval(-t, &mut f);
        k += 1;
    }
    let mut prev = sum * step * h0;
    for _level in 0..10 {
        step *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        loop {
            let t = k as f64 * step;
            if t > tmax {
                break;
            }
            add += eval(t, &mut f) + eval(-t, &mut f);
            k += 2;
        }
        sum += add;
        let cur = sum * step * h0;
        if (cur - prev).abs() <= rel * cur.abs().max(1e-300) {
            return Ok(cur);
        }
        prev = cur;
    }
    if prev.is_finite() {
        Ok(prev)
    } else {
        Err(Error::Numerical("tanh-sinh quadrature diverged".to_string()))
    }
}

/// Midpoint and trapezoid helpers for uniformly sampled data.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}
