#![allow(dead_code)]

use cdddkit::funcspace::TestFunction;
use cdddkit::grid::{Rat, Relation};

const GL3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// Composite 3-point Gauss nodes on `[a, b]` with `cells` panels split at `breaks`.
pub fn composite_nodes(a: f64, b: f64, cells: usize, breaks: &[f64]) -> Vec<(f64, f64)> {
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|t| *t > a && *t < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (u, v) = (w[0], w[1]);
        let k = ((cells as f64) * (v - u) / (b - a)).ceil().max(1.0) as usize;
        let h = (v - u) / k as f64;
        for c in 0..k {
            for &(x, wt) in &GL3 {
                out.push((u + h * (c as f64 + 0.5 + 0.5 * x), 0.5 * h * wt));
            }
        }
    }
    out
}

/// `Σ_i Σ_j w_i w_j |v_i − v_j|` from the sorted values.
pub fn pair_sum(mut s: Vec<(f64, f64)>) -> f64 {
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut wsum, mut vsum, mut tot) = (0.0, 0.0, 0.0);
    for (v, w) in s {
        tot += w * (v * wsum - vsum);
        wsum += w;
        vsum += w * v;
    }
    2.0 * tot
}

/// `|Q|^{−1−1/n} ∫_Q∫_Q |f(x) − f(y)|` by tensor Gauss quadrature of the double integral
/// (n ≤ 2), with per-axis panel breaks.
pub fn brute_omega(f: &TestFunction, lo: &[f64], l: f64, cells: usize, breaks: &[Vec<f64>]) -> f64 {
    let n = lo.len();
    let axes: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|i| composite_nodes(lo[i], lo[i] + l, cells, breaks.get(i).map(|b| b.as_slice()).unwrap_or(&[])))
        .collect();
    let mut s = Vec::new();
    if n == 1 {
        for &(x, w) in &axes[0] {
            s.push((f.value(&[x]), w));
        }
    } else {
        for &(x, wx) in &axes[0] {
            for &(y, wy) in &axes[1] {
                s.push((f.value(&[x, y]), wx * wy));
            }
        }
    }
    let vol = l.powi(n as i32);
    pair_sum(s) * vol.powf(-1.0 - 1.0 / n as f64)
}

/// Plane version of [`brute_omega`] for radial functions: rows are split where they cross
/// the kink circles `(center, radius)`, columns at the circles' extents and centers.
pub fn brute_omega_plane(f: &TestFunction, lo: &[f64], l: f64, cells: usize, circles: &[([f64; 2], f64)]) -> f64 {
    let mut xb = Vec::new();
    for (c, r) in circles {
        xb.extend([c[0] - r, c[0], c[0] + r]);
    }
    let mut s = Vec::new();
    for (x, wx) in composite_nodes(lo[0], lo[0] + l, cells, &xb) {
        let mut yb = Vec::new();
        for (c, r) in circles {
            yb.push(c[1]);
            let d = r * r - (x - c[0]) * (x - c[0]);
            if d > 0.0 {
                yb.extend([c[1] - d.sqrt(), c[1] + d.sqrt()]);
            }
        }
        for (y, wy) in composite_nodes(lo[1], lo[1] + l, cells, &yb) {
            s.push((f.value(&[x, y]), wx * wy));
        }
    }
    pair_sum(s) * (l * l).powf(-1.5)
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn pow2(j: i32) -> Rat {
    if j >= 0 {
        Rat::from_integer(1i128 << j)
    } else {
        Rat::new(1, 1i128 << -j)
    }
}

/// Corners straight from `2^j (m + [0,1)^n + (-1)^j α)`.
pub fn corners(shift: &[u8], j: i32, m: &[i64]) -> (Vec<Rat>, Rat) {
    let sign = if j % 2 == 0 { 1 } else { -1 };
    let lo = m
        .iter()
        .zip(shift)
        .map(|(&mi, &a)| pow2(j) * (Rat::from_integer(mi as i128) + Rat::new(sign * a as i128, 3)))
        .collect();
    (lo, pow2(j))
}

pub fn oracle_relation(p: (&[Rat], Rat), q: (&[Rat], Rat)) -> Relation {
    let mut eq = true;
    let mut pin = true;
    let mut qin = true;
    for (a, b) in p.0.iter().zip(q.0) {
        let (a1, b1) = (a + p.1, b + q.1);
        if a1 <= *b || b1 <= *a {
            return Relation::Disjoint;
        }
        eq &= a == b && a1 == b1;
        pin &= b <= a && a1 <= b1;
        qin &= a <= b && b1 <= a1;
    }
    if eq {
        Relation::Equal
    } else if pin {
        Relation::PInsideQ
    } else if qin {
        Relation::QInsideP
    } else {
        Relation::Incomparable
    }
}
