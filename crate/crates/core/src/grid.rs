//! Standard and shifted dyadic grids with exact corner arithmetic.
//!
//! A cube of the grid with shift `α ∈ {0, 1/3, 2/3}^n` at generation `j` and
//! index `m` is `2^j (m + [0,1)^n + (-1)^j α)`. Shifts are stored as integer
//! thirds, so every corner is `N · 2^j / 3` for an integer numerator `N` and all
//! combinatorics stay in integer arithmetic.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Rat = Ratio<i128>;

/// Default cap on the number of cubes a window may enumerate.
pub const DEFAULT_CUBE_BUDGET: u128 = 10_000_000;

/// A grid shift, one entry in `{0, 1, 2}` (thirds) per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct Shift(Vec<u8>);

impl Shift {
    pub fn new(thirds: Vec<u8>) -> Result<Self> {
        if thirds.is_empty() {
            return Err(invalid("shift must have at least one coordinate"));
        }
        if let Some(t) = thirds.iter().find(|&&t| t > 2) {
            return Err(invalid(format!("shift coordinate {t} is not in {{0,1,2}} thirds")));
        }
        Ok(Shift(thirds))
    }

    pub fn zero(n: usize) -> Self {
        Shift(vec![0; n])
    }

    /// The same third on every coordinate.
    pub fn uniform(n: usize, third: u8) -> Result<Self> {
        Shift::new(vec![third; n])
    }

    /// All `3^n` shifts in lexicographic order of thirds.
    pub fn all(n: usize) -> Vec<Shift> {
        let mut out = Vec::with_capacity(3usize.pow(n as u32));
        let mut cur = vec![0u8; n];
        loop {
            out.push(Shift(cur.clone()));
            let mut i = n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < 2 {
                    cur[i] += 1;
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn thirds(&self) -> &[u8] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&t| t as f64 / 3.0).collect()
    }
}

impl TryFrom<Vec<u8>> for Shift {
    type Error = Error;
    fn try_from(v: Vec<u8>) -> Result<Self> {
        Shift::new(v)
    }
}

impl From<Shift> for Vec<u8> {
    fn from(s: Shift) -> Self {
        s.0
    }
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|t| match t {
                0 => "0".to_string(),
                t => format!("{t}/3"),
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A cube of a shifted dyadic grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cube {
    shift: Shift,
    j: i32,
    m: Vec<i64>,
}

/// Position of one cube relative to another.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Disjoint,
    Equal,
    PInsideQ,
    QInsideP,
    Incomparable,
}

fn pow2_rat(j: i32) -> Rat {
    if j >= 0 {
        Rat::from_integer(1i128 << j)
    } else {
        Rat::new(1, 1i128 << (-j))
    }
}

fn sign_of_generation(j: i32) -> i64 {
    if j.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Build the cube `2^j (m + [0,1)^n + (-1)^j α)`.
pub fn make_cube(shift: &Shift, j: i32, m: &[i64]) -> Result<Cube> {
    if shift.dim() != m.len() {
        return Err(Error::DimensionMismatch {
            expected: shift.dim(),
            got: m.len(),
        });
    }
    if j.abs() > 60 {
        return Err(invalid(format!("generation {j} outside the supported range [-60, 60]")));
    }
    Ok(Cube {
        shift: shift.clone(),
        j,
        m: m.to_vec(),
    })
}

impl Cube {
    pub fn shift(&self) -> &Shift {
        &self.shift
    }

    pub fn generation(&self) -> i32 {
        self.j
    }

    pub fn index(&self) -> &[i64] {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// Lower-corner numerators in units of `2^j / 3`.
    fn numerators(&self) -> impl Iterator<Item = i128> + '_ {
        let s = sign_of_generation(self.j);
        self.m
            .iter()
            .zip(self.shift.thirds())
            .map(move |(&m, &a)| 3 * m as i128 + (s * a as i64) as i128)
    }

    /// Exact lower corner.
    pub fn lower_exact(&self) -> Vec<Rat> {
        let scale = pow2_rat(self.j) / Rat::from_integer(3);
        self.numerators().map(|n| Rat::from_integer(n) * scale).collect()
    }

    /// Exact edge length `2^j`.
    pub fn edge_exact(&self) -> Rat {
        pow2_rat(self.j)
    }

    pub fn lower(&self) -> Vec<f64> {
        let scale = 2f64.powi(self.j) / 3.0;
        self.numerators().map(|n| n as f64 * scale).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        let e = self.edge();
        self.lower().into_iter().map(|a| a + e).collect()
    }

    pub fn edge(&self) -> f64 {
        2f64.powi(self.j)
    }

    pub fn volume(&self) -> f64 {
        2f64.powi(self.j * self.dim() as i32)
    }

    pub fn center(&self) -> Vec<f64> {
        let h = 0.5 * self.edge();
        self.lower().into_iter().map(|a| a + h).collect()
    }

    /// Half-open membership test.
    pub fn contains_point(&self, x: &[f64]) -> bool {
        let e = self.edge();
        self.lower()
            .iter()
            .zip(x)
            .all(|(&a, &xi)| a <= xi && xi < a + e)
    }

    pub fn to_axis(&self) -> AxisCube {
        AxisCube {
            lower: self.lower_exact(),
            edge: self.edge_exact(),
        }
    }

    /// Integer endpoints `[lo, hi)` per coordinate in units of `2^e / 3`, `e <= j`.
    fn scaled_bounds(&self, e: i32) -> Vec<(i128, i128)> {
        let f = 1i128 << (self.j - e);
        self.numerators().map(|n| (n * f, (n + 3) * f)).collect()
    }

    /// The `2^n` children, in lexicographic order of the offset bits.
    pub fn children(&self) -> Vec<Cube> {
        let n = self.dim();
        let s = sign_of_generation(self.j);
        let base: Vec<i64> = self
            .m
            .iter()
            .zip(self.shift.thirds())
            .map(|(&m, &a)| 2 * m + s * a as i64)
            .collect();
        (0..1usize << n)
            .map(|bits| {
                let m = base
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| b + ((bits >> (n - 1 - i)) & 1) as i64)
                    .collect();
                Cube {
                    shift: self.shift.clone(),
                    j: self.j - 1,
                    m,
                }
            })
            .collect()
    }

    pub fn parent(&self) -> Cube {
        // child index m = 2M + (-1)^{j+1} a + t with t in {0,1}
        let s = sign_of_generation(self.j + 1);
        let m = self
            .m
            .iter()
            .zip(self.shift.thirds())
            .map(|(&m, &a)| Integer::div_floor(&(m - s * a as i64), &2))
            .collect();
        Cube {
            shift: self.shift.clone(),
            j: self.j + 1,
            m,
        }
    }

    /// The ancestor at generation `j` (`j >= self.generation()`).
    pub fn ancestor(&self, j: i32) -> Cube {
        let mut c = self.clone();
        while c.j < j {
            c = c.parent();
        }
        c
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lower_exact();
        let e = self.edge_exact();
        let parts: Vec<String> = lo.iter().map(|a| format!("[{}, {})", a, a + e)).collect();
        write!(f, "{} in D^{}", parts.join("x"), self.shift)
    }
}

/// Exact relation between two cubes of any shifts.
pub fn relate(p: &Cube, q: &Cube) -> Result<Relation> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let e = p.j.min(q.j);
    let pb = p.scaled_bounds(e);
    let qb = q.scaled_bounds(e);
    let mut equal = true;
    let mut p_in_q = true;
    let mut q_in_p = true;
    for (&(p0, p1), &(q0, q1)) in pb.iter().zip(&qb) {
        if p1 <= q0 || q1 <= p0 {
            return Ok(Relation::Disjoint);
        }
        equal &= p0 == q0 && p1 == q1;
        p_in_q &= q0 <= p0 && p1 <= q1;
        q_in_p &= p0 <= q0 && q1 <= p1;
    }
    Ok(if equal {
        Relation::Equal
    } else if p_in_q {
        Relation::PInsideQ
    } else if q_in_p {
        Relation::QInsideP
    } else {
        Relation::Incomparable
    })
}

/// Whether `p ⊆ q` (equality included).
pub fn is_subcube(p: &Cube, q: &Cube) -> bool {
    matches!(relate(p, q), Ok(Relation::Equal | Relation::PInsideQ))
}

/// An axis-parallel half-open cube with rational corner and edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AxisCube {
    pub lower: Vec<Rat>,
    pub edge: Rat,
}

impl AxisCube {
    pub fn new(lower: Vec<Rat>, edge: Rat) -> Result<Self> {
        if lower.is_empty() {
            return Err(invalid("axis cube needs at least one coordinate"));
        }
        if edge <= Rat::zero() {
            return Err(invalid("axis cube edge must be positive"));
        }
        Ok(AxisCube { lower, edge })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// The concentric cube with `k` times the edge.
    pub fn dilate(&self, k: Rat) -> AxisCube {
        let half = Rat::new(1, 2);
        let shift = (k - Rat::one()) * self.edge * half;
        AxisCube {
            lower: self.lower.iter().map(|a| a - shift).collect(),
            edge: self.edge * k,
        }
    }

    pub fn contains(&self, other: &AxisCube) -> bool {
        self.lower
            .iter()
            .zip(&other.lower)
            .all(|(a, b)| a <= b && b + other.edge <= a + self.edge)
    }

    pub fn disjoint(&self, other: &AxisCube) -> bool {
        self.lower
            .iter()
            .zip(&other.lower)
            .any(|(a, b)| a + self.edge <= *b || b + other.edge <= *a)
    }

    pub fn volume(&self) -> Rat {
        (0..self.dim()).fold(Rat::one(), |acc, _| acc * self.edge)
    }
}

/// The unique `k` with `2^k ∈ (3l/2, 3l]`.
fn dominating_generation(l: Rat) -> i32 {
    let three_l = l * Rat::from_integer(3);
    let mut k = three_l.to_f64().unwrap_or(1.0).log2().floor() as i32;
    while pow2_rat(k) > three_l {
        k -= 1;
    }
    while pow2_rat(k + 1) <= three_l {
        k += 1;
    }
    k
}

/// The grid cube of shift `shift` and generation `k` containing the point `x`.
fn cube_containing(shift: &Shift, k: i32, x: &[Rat]) -> Cube {
    let s = sign_of_generation(k);
    let inv = pow2_rat(-k);
    let m = x
        .iter()
        .zip(shift.thirds())
        .map(|(xi, &a)| {
            let t = xi * inv - Rat::new((s * a as i64) as i128, 3);
            t.floor().to_integer() as i64
        })
        .collect();
    Cube {
        shift: shift.clone(),
        j: k,
        m,
    }
}

fn grid_cube_contains(q: &Cube, p: &AxisCube) -> bool {
    q.to_axis().contains(p)
}

/// Some shift `α` and `Q ∈ D^α` with `P ⊆ Q` and `l(Q) ∈ (3l(P)/2, 3l(P)]`.
///
/// Shifts are scanned in lexicographic order; the first hit is returned.
pub fn dominating_cube(p: &AxisCube) -> Result<(Shift, Cube)> {
    let k = dominating_generation(p.edge);
    for shift in Shift::all(p.dim()) {
        let q = cube_containing(&shift, k, &p.lower);
        if grid_cube_contains(&q, p) {
            return Ok((shift, q));
        }
    }
    Err(Error::Numerical(
        "no dominating shifted dyadic cube found".to_string(),
    ))
}

/// Every shifted dyadic cube `P ⊇ Q` with `l(P) ∈ (3l(Q)/2, 3l(Q)]`.
pub fn dominating_set(q: &AxisCube) -> Vec<Cube> {
    let k = dominating_generation(q.edge);
    Shift::all(q.dim())
        .into_iter()
        .map(|s| cube_containing(&s, k, &q.lower))
        .filter(|c| grid_cube_contains(c, q))
        .collect()
}

/// Largest number of dilated cubes `K·Q_j` sharing one dominating cube.
///
/// `base` must be pairwise disjoint cubes of a common edge length.
pub fn dom_multiplicity(base: &[AxisCube], k: Rat) -> Result<usize> {
    let first = base.first().ok_or(Error::Empty("cube family"))?;
    if k <= Rat::zero() {
        return Err(invalid("dilation factor K must be positive"));
    }
    for (i, a) in base.iter().enumerate() {
        if a.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                got: a.dim(),
            });
        }
        if a.edge != first.edge {
            return Err(invalid("cubes must share a common edge length"));
        }
        if base[..i].iter().any(|b| !a.disjoint(b)) {
            return Err(invalid("cubes must be pairwise disjoint"));
        }
    }
    let mut counts: HashMap<Cube, usize> = HashMap::new();
    for q in base {
        for p in dominating_set(&q.dilate(k)) {
            *counts.entry(p).or_default() += 1;
        }
    }
    Ok(counts.values().copied().max().unwrap_or(0))
}

/// A finite truncation of one or more shifted grids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridWindow {
    #[serde(with = "rat_vec")]
    pub lo: Vec<Rat>,
    #[serde(with = "rat_vec")]
    pub hi: Vec<Rat>,
    pub j_min: i32,
    pub j_max: i32,
    pub shifts: Vec<Shift>,
    pub budget: u128,
}

mod rat_vec {
    use super::Rat;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse::<Rat>().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl GridWindow {
    pub fn new(lo: Vec<Rat>, hi: Vec<Rat>, j_min: i32, j_max: i32, shifts: Vec<Shift>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(invalid("window box corners must have equal nonzero dimension"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(invalid("window box is empty"));
        }
        if j_min > j_max {
            return Err(invalid(format!("j_min = {j_min} exceeds j_max = {j_max}")));
        }
        if j_min < -60 || j_max > 60 {
            return Err(invalid("generations must lie in [-60, 60]"));
        }
        if shifts.is_empty() {
            return Err(Error::Empty("shift set"));
        }
        if let Some(s) = shifts.iter().find(|s| s.dim() != lo.len()) {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: s.dim(),
            });
        }
        Ok(GridWindow {
            lo,
            hi,
            j_min,
            j_max,
            shifts,
            budget: DEFAULT_CUBE_BUDGET,
        })
    }

    /// Symmetric box `[-r, r)^n` (with `r` given as a float that must be dyadic-friendly).
    pub fn symmetric(n: usize, half_width: f64, j_min: i32, j_max: i32, shifts: Vec<Shift>) -> Result<Self> {
        let r = rat_from_f64(half_width)?;
        GridWindow::new(vec![-r; n], vec![r; n], j_min, j_max, shifts)
    }

    pub fn interval(lo: f64, hi: f64, j_min: i32, j_max: i32, shifts: Vec<Shift>) -> Result<Self> {
        GridWindow::new(vec![rat_from_f64(lo)?], vec![rat_from_f64(hi)?], j_min, j_max, shifts)
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo_f64(&self) -> Vec<f64> {
        self.lo.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn hi_f64(&self) -> Vec<f64> {
        self.hi.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Box doubled about its center with one more generation on top.
    pub fn doubled(&self) -> GridWindow {
        let half = Rat::new(1, 2);
        let (lo, hi) = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| {
                let c = (a + b) * half;
                let r = b - a;
                (c - r, c + r)
            })
            .unzip();
        GridWindow {
            lo,
            hi,
            j_max: self.j_max + 1,
            ..self.clone()
        }
    }

    /// Per-coordinate inclusive index ranges of generation-`j` cubes of `shift` meeting the box.
    pub fn index_ranges(&self, shift: &Shift, j: i32) -> Vec<(i64, i64)> {
        let s = sign_of_generation(j);
        let inv = pow2_rat(-j);
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(shift.thirds())
            .map(|((lo, hi), &a)| {
                let off = Rat::new((s * a as i64) as i128, 3);
                // lower corner 2^j (m + off) < hi  and  2^j (m + 1 + off) > lo
                let m_max = (hi * inv - off).ceil().to_integer() - 1;
                let m_min = (lo * inv - off - Rat::one()).floor().to_integer() + 1;
                (m_min as i64, m_max as i64)
            })
            .collect()
    }

    /// Number of cubes the window contains.
    pub fn count(&self) -> u128 {
        let mut total: u128 = 0;
        for shift in &self.shifts {
            for j in self.j_min..=self.j_max {
                let per: u128 = self
                    .index_ranges(shift, j)
                    .iter()
                    .map(|&(a, b)| if b >= a { (b - a + 1) as u128 } else { 0 })
                    .product();
                total = total.saturating_add(per);
            }
        }
        total
    }

    fn check_budget(&self) -> Result<()> {
        let c = self.count();
        if c > self.budget {
            return Err(Error::Budget {
                requested: c,
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// Cubes of one shift and generation meeting the box, index-lexicographic.
    pub fn cubes_at(&self, shift: &Shift, j: i32) -> Vec<Cube> {
        let ranges = self.index_ranges(shift, j);
        let mut out = Vec::new();
        if ranges.iter().any(|&(a, b)| b < a) {
            return out;
        }
        let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            out.push(Cube {
                shift: shift.clone(),
                j,
                m: cur.clone(),
            });
            let mut i = cur.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < ranges[i].1 {
                    cur[i] += 1;
                    break;
                }
                cur[i] = ranges[i].0;
            }
        }
    }

    /// All cubes ordered by shift, generation descending, index lexicographic.
    pub fn enumerate(&self) -> Result<impl Iterator<Item = Cube> + '_> {
        self.check_budget()?;
        Ok(self.shifts.iter().flat_map(move |shift| {
            (self.j_min..=self.j_max)
                .rev()
                .flat_map(move |j| self.cubes_at(shift, j))
        }))
    }

    /// Whether a cube meets the box in a set of positive measure.
    pub fn meets(&self, q: &Cube) -> bool {
        let lo = q.lower_exact();
        let e = q.edge_exact();
        lo.iter()
            .zip(&self.lo)
            .zip(&self.hi)
            .all(|((a, wl), wh)| *a < *wh && a + e > *wl)
    }

    /// Whether the closure of `q` touches the boundary of the box.
    pub fn touches_boundary(&self, q: &Cube) -> bool {
        let lo = q.lower_exact();
        let e = q.edge_exact();
        lo.iter()
            .zip(&self.lo)
            .zip(&self.hi)
            .any(|((a, wl), wh)| *a <= *wl || a + e >= *wh)
    }
}

/// Exact rational from a float (exact for every finite float with a modest exponent).
pub fn rat_from_f64(x: f64) -> Result<Rat> {
    if !x.is_finite() {
        return Err(invalid(format!("non-finite coordinate {x}")));
    }
    if x == 0.0 {
        return Ok(Rat::zero());
    }
    let bits = x.to_bits();
    let sign: i128 = if bits >> 63 == 0 { 1 } else { -1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i128;
    let (mant, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1i128 << 52), exp - 1075)
    };
    // strip trailing zeros of the mantissa to keep the exponent small
    let tz = mant.trailing_zeros() as i32;
    let mant = mant >> tz;
    let e = e + tz;
    if e >= 0 {
        if e > 70 {
            return Err(invalid(format!("coordinate {x} too large for exact arithmetic")));
        }
        Ok(Rat::from_integer(sign * (mant << e)))
    } else {
        if -e > 120 {
            return Err(invalid(format!("coordinate {x} too fine for exact arithmetic")));
        }
        Ok(Rat::new(sign * mant, 1i128 << (-e)))
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
