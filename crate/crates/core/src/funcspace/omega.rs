//! The renormalized averaged modulus `ω_Q(f) = |Q|^{−1−1/n} ∫_Q∫_Q |f(x) − f(y)|`.
//!
//! Every catalog shape has an exact route built on
//! `∫_Q∫_Q |f(x) − f(y)| = 2 ∫ μ(t)(|Q| − μ(t)) dt`, `μ(t) = |{x ∈ Q : f(x) ≤ t}|`:
//! monotone functions on the line reduce to `2 |∫_a^b f(x)(2x − a − b) dx|`,
//! monotone radial profiles to an integral over the radius of the area of
//! `Q ∩ B(c, r)`. Other functions go through [`OmegaTree`], which evaluates
//! the double integral for a cube and all its dyadic descendants at once from
//! sorted Gauss samples.

use serde::{Deserialize, Serialize};

use super::profile::rect_disk_area;
use super::TestFunction;
use crate::quad::{gauss_legendre, integrate_pieces, Tol};
use crate::weights::AxisBox;

/// Settings of the generic sampled route.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    /// Gauss points per leaf and coordinate.
    pub gauss_points: usize,
    /// Levels of subdivision below the cube of interest.
    pub extra_depth: u32,
    /// Relative accuracy requested; the sampled route compares two depths.
    pub rel_tol: f64,
}

impl Quadrature {
    pub fn for_dim(n: usize) -> Self {
        Quadrature {
            gauss_points: 4,
            extra_depth: if n == 1 { 10 } else { 5 },
            rel_tol: 1e-6,
        }
    }
}

/// An `ω_Q` value with its provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OmegaValue {
    pub value: f64,
    /// Produced by a closed form or a quadrature of a closed-form integrand.
    pub exact: bool,
    /// The requested tolerance was met (always true for exact routes).
    pub accurate: bool,
}

fn edge_of(q: &AxisBox) -> f64 {
    q.hi[0] - q.lo[0]
}

/// `ω_Q(f)` by an exact route, if the function shape has one.
pub fn omega_exact(f: &TestFunction, q: &AxisBox) -> Option<f64> {
    let n = q.dim();
    let vol = q.volume();
    let norm = vol.powf(-1.0 - 1.0 / n as f64);
    if f.is_constant() {
        return Some(0.0);
    }
    if let Some((lo, hi, h)) = f.indicator() {
        let inter: f64 = (0..n)
            .map(|i| (hi[i].min(q.hi[i]) - lo[i].max(q.lo[i])).max(0.0))
            .product();
        return Some(2.0 * h.abs() * inter * (vol - inter) * norm);
    }
    if let Some(prof) = f.line_profile() {
        prof.monotone_direction()?;
        let (a, b) = (q.lo[0], q.hi[0]);
        return Some(2.0 * prof.moment(a, b).abs() * norm);
    }
    if let Some((c, prof)) = f.radial() {
        if n > 2 {
            return None;
        }
        prof.monotone_direction()?;
        let area = |r: f64| -> f64 {
            if n == 1 {
                (q.hi[0].min(c[0] + r) - q.lo[0].max(c[0] - r)).max(0.0)
            } else {
                rect_disk_area([q.lo[0] - c[0], q.lo[1] - c[1]], [q.hi[0] - c[0], q.hi[1] - c[1]], r)
            }
        };
        // radii where the area or the profile changes form
        let mut near = 0.0;
        let mut far = 0.0;
        let mut offsets: Vec<Vec<f64>> = Vec::new();
        for i in 0..n {
            let d0 = q.lo[i] - c[i];
            let d1 = q.hi[i] - c[i];
            let nd = if d0 > 0.0 {
                d0
            } else if d1 < 0.0 {
                -d1
            } else {
                0.0
            };
            near += nd * nd;
            far += d0.abs().max(d1.abs()).powi(2);
            offsets.push(vec![d0.abs(), d1.abs()]);
        }
        let (r0, r1) = (near.sqrt(), far.sqrt());
        let mut breaks: Vec<f64> = prof.knots().iter().copied().filter(|t| t.is_finite()).collect();
        for o in &offsets {
            breaks.extend(o.iter().copied());
        }
        if n == 2 {
            for a in &offsets[0] {
                for b in &offsets[1] {
                    breaks.push((a * a + b * b).sqrt());
                }
            }
        }
        let tol = Tol {
            abs: 1e-300,
            rel: 1e-13,
            max_segments: 400,
        };
        let s = integrate_pieces(
            |r| {
                let a = area(r);
                a * (vol - a) * prof.deriv(r).abs()
            },
            r0,
            r1,
            &breaks,
            tol,
        );
        return Some(2.0 * s * norm);
    }
    None
}

/// `ω_Q(f)`: exact route when available, otherwise the sampled tree at two depths.
pub fn omega(f: &TestFunction, q: &AxisBox, quad: &Quadrature) -> OmegaValue {
    if let Some(v) = omega_exact(f, q) {
        return OmegaValue {
            value: v,
            exact: true,
            accurate: true,
        };
    }
    let fine = OmegaTree::build(f, &q.lo, edge_of(q), quad.extra_depth, quad.gauss_points);
    let v = fine.omega(0, 0);
    let coarse = OmegaTree::build(f, &q.lo, edge_of(q), quad.extra_depth.saturating_sub(1), quad.gauss_points);
    let vc = coarse.omega(0, 0);
    // sampled error decays like the square of the leaf size
    let err = (v - vc).abs() / 3.0;
    OmegaValue {
        value: v,
        exact: false,
        accurate: err <= quad.rel_tol * v.abs().max(1e-300),
    }
}

/// `ω` for a cube and all its dyadic descendants down to a fixed depth.
///
/// Leaves carry tensor Gauss samples. Each node's double integral is the
/// pair sum over its samples, computed in `O(N log N)` from the sorted values,
/// with the within-leaf pairs replaced by a sharper self term in one dimension.
#[derive(Clone, Debug)]
pub struct OmegaTree {
    n: usize,
    lower: Vec<f64>,
    edge: f64,
    /// `levels[d][z]` is `ω` of the depth-`d` node with Morton index `z`.
    levels: Vec<Vec<f64>>,
}

/// Morton index of a multi-index at a level with `bits` bits per coordinate.
pub fn morton(idx: &[u64], bits: u32) -> usize {
    let n = idx.len();
    let mut z: usize = 0;
    for b in (0..bits).rev() {
        for &i in idx {
            z = (z << 1) | (((i >> b) & 1) as usize);
        }
    }
    let _ = n;
    z
}

fn demorton(mut z: usize, n: usize, bits: u32) -> Vec<u64> {
    let mut idx = vec![0u64; n];
    for b in 0..bits {
        for i in (0..n).rev() {
            idx[i] |= ((z & 1) as u64) << b;
            z >>= 1;
        }
    }
    idx
}

impl OmegaTree {
    pub fn build(f: &TestFunction, lower: &[f64], edge: f64, depth: u32, gauss: usize) -> OmegaTree {
        let n = lower.len();
        let leaves = 1usize << (n as u32 * depth);
        let per_side = 1u64 << depth;
        let h = edge / per_side as f64;
        let (gx, gw) = gauss_legendre(gauss);
        let g_n = gauss.pow(n as u32);
        let kinks = if n == 1 { f.kinks() } else { Vec::new() };
        let mut samples: Vec<(f64, f64)> = Vec::with_capacity(leaves * g_n);
        let mut starts = Vec::with_capacity(leaves + 1);
        let mut correction = vec![0.0; leaves];
        let mut nodes_1d: Vec<(f64, f64)> = Vec::new();
        for z in 0..leaves {
            starts.push(samples.len());
            let idx = demorton(z, n, depth);
            let leaf_lo: Vec<f64> = idx.iter().zip(lower).map(|(&i, &l)| l + i as f64 * h).collect();
            if n == 1 {
                let a = leaf_lo[0];
                let b = a + h;
                nodes_1d.clear();
                match kinks.iter().find(|&&t| a <= t && t <= b) {
                    Some(&t) => {
                        graded_nodes(a, t, false, &gx, &gw, &mut nodes_1d);
                        graded_nodes(t, b, true, &gx, &gw, &mut nodes_1d);
                    }
                    None => {
                        for k in 0..gauss {
                            nodes_1d.push((a + 0.5 * h * (gx[k] + 1.0), 0.5 * h * gw[k]));
                        }
                    }
                }
                let first = samples.len();
                for &(x, w) in &nodes_1d {
                    samples.push((f.value(&[x]), w));
                }
                let leaf = &samples[first..];
                let fa = f.value(&[a]);
                let fb = f.value(&[b]);
                let m = leaf.len();
                let inc = fa <= leaf[0].0 && leaf.windows(2).all(|w| w[0].0 <= w[1].0) && leaf[m - 1].0 <= fb;
                let dec = fa >= leaf[0].0 && leaf.windows(2).all(|w| w[0].0 >= w[1].0) && leaf[m - 1].0 >= fb;
                if inc || dec {
                    // monotone on the leaf: 2|∫ f(x)(2x − a − b)| is the exact self term
                    let sharp = 2.0
                        * nodes_1d
                            .iter()
                            .zip(leaf)
                            .map(|(&(x, w), &(v, _))| w * v * (2.0 * x - a - b))
                            .sum::<f64>()
                            .abs();
                    let mut sorted = leaf.to_vec();
                    sorted.sort_by(|p, q| p.0.total_cmp(&q.0));
                    correction[z] = sharp - pair_sum(&sorted);
                }
            } else {
                for k in 0..g_n {
                    let mut x = vec![0.0; n];
                    let mut w = 1.0;
                    let mut kk = k;
                    for i in (0..n).rev() {
                        let g = kk % gauss;
                        kk /= gauss;
                        x[i] = leaf_lo[i] + 0.5 * h * (gx[g] + 1.0);
                        w *= 0.5 * h * gw[g];
                    }
                    samples.push((f.value(&x), w));
                }
            }
        }
        starts.push(samples.len());

        let mut levels: Vec<Vec<f64>> = vec![Vec::new(); depth as usize + 1];
        let mut corr = correction;
        let fan = 1usize << n;
        for d in (0..=depth).rev() {
            let nodes = 1usize << (n as u32 * d);
            let leaves_per_node = leaves / nodes;
            let node_edge = edge / (1u64 << d) as f64;
            let norm = node_edge.powf(-(n as f64) - 1.0);
            let mut vals = Vec::with_capacity(nodes);
            for k in 0..nodes {
                let chunk = &mut samples[starts[k * leaves_per_node]..starts[(k + 1) * leaves_per_node]];
                chunk.sort_by(|p, q| p.0.total_cmp(&q.0));
                vals.push((pair_sum(chunk) + corr[k]).max(0.0) * norm);
            }
            levels[d as usize] = vals;
            if d > 0 {
                corr = corr.chunks(fan).map(|c| c.iter().sum()).collect();
            }
        }
        OmegaTree {
            n,
            lower: lower.to_vec(),
            edge,
            levels,
        }
    }

    pub fn depth(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    /// `ω` of the depth-`d` node with Morton index `z`.
    pub fn omega(&self, d: u32, z: usize) -> f64 {
        self.levels[d as usize][z]
    }

    /// `ω` of the descendant cube with the given lower corner and edge, if it is a node.
    pub fn lookup(&self, lower: &[f64], edge: f64) -> Option<f64> {
        let ratio = self.edge / edge;
        let d = ratio.log2().round();
        if d < 0.0 || d > self.depth() as f64 || (2f64.powf(d) - ratio).abs() > 1e-9 * ratio {
            return None;
        }
        let d = d as u32;
        let mut idx = Vec::with_capacity(self.n);
        for (l, r) in lower.iter().zip(&self.lower) {
            let t = (l - r) / edge;
            let ti = t.round();
            if (t - ti).abs() > 1e-7 || ti < 0.0 || ti >= (1u64 << d) as f64 {
                return None;
            }
            idx.push(ti as u64);
        }
        Some(self.omega(d, morton(&idx, d)))
    }
}

/// Composite Gauss nodes on `[a, b]` graded geometrically toward `b` (or toward `a` when `toward_a`).
fn graded_nodes(a: f64, b: f64, toward_a: bool, gx: &[f64], gw: &[f64], out: &mut Vec<(f64, f64)>) {
    let len = b - a;
    if !(len > 0.0) {
        return;
    }
    const LEVELS: i32 = 40;
    let mut cells: Vec<(f64, f64)> = Vec::with_capacity(LEVELS as usize + 1);
    for k in 0..LEVELS {
        let outer = len * 2f64.powi(-k);
        let inner = len * 2f64.powi(-k - 1);
        cells.push((inner, outer));
    }
    cells.push((0.0, len * 2f64.powi(-LEVELS)));
    // cells are offsets from the graded endpoint; emit them in increasing x
    let mut ordered: Vec<(f64, f64)> = cells
        .iter()
        .map(|&(i, o)| if toward_a { (a + i, a + o) } else { (b - o, b - i) })
        .collect();
    ordered.sort_by(|p, q| p.0.total_cmp(&q.0));
    for (u, v) in ordered {
        let hh = 0.5 * (v - u);
        for (t, w) in gx.iter().zip(gw) {
            out.push((u + hh * (t + 1.0), hh * w));
        }
    }
}

/// `Σ_{i,j} w_i w_j |v_i − v_j|` over samples sorted by value.
fn pair_sum(sorted: &[(f64, f64)]) -> f64 {
    if sorted.len() < 2 {
        return 0.0;
    }
    // shift by the median to limit cancellation
    let m = sorted[sorted.len() / 2].0;
    let mut w_acc = 0.0;
    let mut s_acc = 0.0;
    let mut total = 0.0;
    for &(v, w) in sorted {
        let v = v - m;
        total += w * (v * w_acc - s_acc);
        w_acc += w;
        s_acc += w * v;
    }
    2.0 * total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{indicator, linear_ramp, sharp1_bump, sharp2_fdelta, tent};

    fn iv(a: f64, b: f64) -> AxisBox {
        AxisBox::interval(a, b).unwrap()
    }

    #[test]
    fn morton_round_trip() {
        for z in 0..64 {
            let idx = demorton(z, 2, 3);
            assert_eq!(morton(&idx, 3), z);
        }
        assert_eq!(demorton(1, 2, 1), vec![0, 1]);
    }

    #[test]
    fn exact_routes_on_closed_forms() {
        let r = linear_ramp(1, 3.0, 10.0).unwrap();
        let v = omega_exact(&r, &iv(0.25, 0.75)).unwrap();
        assert!((v - 3.0 * 0.5 / 3.0).abs() < 1e-15);

        let ind = indicator(vec![0.0], vec![0.5]).unwrap();
        assert!((omega_exact(&ind, &iv(0.0, 1.0)).unwrap() - 0.5).abs() < 1e-15);

        // a radial tent in n = 1 on a cube on one side of the peak is linear there
        let t = tent(1, 1.0, 2.0, vec![0.0]).unwrap();
        let v = omega_exact(&t, &iv(0.5, 1.5)).unwrap();
        assert!((v - 0.5 / 3.0).abs() < 1e-13, "{v}");
    }

    #[test]
    fn tree_matches_exact_routes() {
        let quad = Quadrature::for_dim(1);
        let fs = [
            linear_ramp(1, 1.0, 10.0).unwrap(),
            tent(1, 1.0, 1.0, vec![0.3]).unwrap(),
            sharp1_bump().unwrap(),
            sharp2_fdelta(0.5).unwrap(),
        ];
        for f in &fs {
            for q in [iv(-1.0, 1.0), iv(0.0, 0.5), iv(-0.7, 2.3)] {
                let exact = omega_exact(f, &q).unwrap();
                let tree = OmegaTree::build(f, &q.lo, edge_of(&q), quad.extra_depth, quad.gauss_points).omega(0, 0);
                assert!((tree - exact).abs() <= 1e-6 * exact.max(1e-12), "{}: {tree} vs {exact}", f.label());
            }
        }
    }

    #[test]
    fn tree_descendants_match_exact() {
        let f = tent(1, 1.0, 1.0, vec![0.3]).unwrap();
        let tree = OmegaTree::build(&f, &[-1.0], 2.0, 12, 4);
        for d in 0..=2u32 {
            for z in 0..(1usize << d) {
                let e = 2.0 / (1u64 << d) as f64;
                let lo = -1.0 + z as f64 * e;
                let exact = omega_exact(&f, &iv(lo, lo + e)).unwrap();
                let got = tree.lookup(&[lo], e).unwrap();
                assert!((got - exact).abs() <= 1e-6 * exact.max(1e-12), "d={d} z={z}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn two_dim_radial_route_matches_tree() {
        let f = tent(2, 1.0, 1.0, vec![0.2, -0.1]).unwrap();
        let q = AxisBox::cube(&[-0.5, -0.5], 1.0).unwrap();
        let exact = omega_exact(&f, &q).unwrap();
        let tree = OmegaTree::build(&f, &q.lo, 1.0, 7, 4).omega(0, 0);
        assert!((tree - exact).abs() <= 2e-4 * exact, "{tree} vs {exact}");
    }
}
