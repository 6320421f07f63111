//! Lattice-point measure `mu_Z(U) = lim_{r -> 0} r^n #(U ∩ r Z^n)` and the
//! counting experiments built on it.
//!
//! Grid counts are exact. Boxes are half-open, `[lo, hi)` on every axis,
//! so a box whose sides are multiples of `r` holds exactly `vol / r^n`
//! points. Discs and line segments are closed.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{ceil_big, floor_big, isqrt_big, rat, Rational};
use crate::dirichlet::volume_constant;
use crate::error::{Error, Result};
use crate::fundomain::{in_cone_f, reduce_to_f, ReduceOptions};
use crate::hnf::{count_sublattices, enumerate_hnf};
use crate::matrix::IntMatrix;
use crate::par;
use crate::report::Table;

/// A region with decidable membership at rational points and a bounding box.
///
/// The box must contain every member; counting never looks outside it.
pub trait Region: Sync {
    fn dim(&self) -> usize;
    fn contains(&self, x: &[Rational]) -> bool;
    /// Closed per-axis intervals containing the region.
    fn bounding_box(&self) -> Vec<(Rational, Rational)>;
}

/// `[lo_1, hi_1) x ... x [lo_n, hi_n)`.
#[derive(Clone, Debug)]
pub struct HalfOpenBox {
    pub lo: Vec<Rational>,
    pub hi: Vec<Rational>,
}

impl HalfOpenBox {
    pub fn new(lo: Vec<Rational>, hi: Vec<Rational>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::pre("box corners must have the same positive dimension"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::pre("box corners out of order"));
        }
        Ok(HalfOpenBox { lo, hi })
    }

    pub fn unit(n: usize) -> Self {
        HalfOpenBox {
            lo: vec![rat(0); n],
            hi: vec![rat(1); n],
        }
    }

    pub fn volume(&self) -> Rational {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }
}

impl Region for HalfOpenBox {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn contains(&self, x: &[Rational]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| a <= v && v < b)
    }

    fn bounding_box(&self) -> Vec<(Rational, Rational)> {
        self.lo.iter().cloned().zip(self.hi.iter().cloned()).collect()
    }
}

/// Closed ball `|x|^2 <= radius_sq` about the origin.
#[derive(Clone, Debug)]
pub struct Ball {
    pub dim: usize,
    pub radius_sq: Rational,
}

impl Ball {
    pub fn unit_disc() -> Self {
        Ball {
            dim: 2,
            radius_sq: rat(1),
        }
    }
}

fn sq_len(x: &[Rational]) -> Rational {
    x.iter().map(|v| v * v).sum()
}

impl Region for Ball {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[Rational]) -> bool {
        sq_len(x) <= self.radius_sq
    }

    fn bounding_box(&self) -> Vec<(Rational, Rational)> {
        let r = Rational::from_integer(isqrt_big(&ceil_big(&self.radius_sq)) + 1);
        vec![(-r.clone(), r); self.dim]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Empty(pub usize);

impl Region for Empty {
    fn dim(&self) -> usize {
        self.0
    }

    fn contains(&self, _: &[Rational]) -> bool {
        false
    }

    fn bounding_box(&self) -> Vec<(Rational, Rational)> {
        vec![(rat(0), rat(0)); self.0]
    }
}

/// `U ∩ B_R` (`inside`) or `U - B_R`, with `B_R` the closed ball.
pub struct BallSplit<'a> {
    pub region: &'a dyn Region,
    pub radius_sq: Rational,
    pub inside: bool,
}

impl Region for BallSplit<'_> {
    fn dim(&self) -> usize {
        self.region.dim()
    }

    fn contains(&self, x: &[Rational]) -> bool {
        self.region.contains(x) && ((sq_len(x) <= self.radius_sq) == self.inside)
    }

    fn bounding_box(&self) -> Vec<(Rational, Rational)> {
        self.region.bounding_box()
    }
}

/// Largest number of grid points [`count_scaled_points`] will test.
pub const GRID_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCount {
    pub count: u64,
    /// `r^n * count`.
    pub n_r: Rational,
}

/// `#(U ∩ r Z^n)` and `N_r(U) = r^n #(U ∩ r Z^n)`, by testing every grid
/// point of the bounding box. Slabs along the first axis run in parallel.
pub fn count_scaled_points(region: &dyn Region, r: &Rational) -> Result<PointCount> {
    if !r.is_positive() {
        return Err(Error::pre("scale r must be positive"));
    }
    let n = region.dim();
    let ranges: Vec<(BigInt, BigInt)> = region
        .bounding_box()
        .iter()
        .map(|(lo, hi)| (ceil_big(&(lo / r)), floor_big(&(hi / r))))
        .collect();
    if ranges.len() != n {
        return Err(Error::pre("bounding box dimension differs from region"));
    }
    let mut total = 1u64;
    let mut bounds = Vec::with_capacity(n);
    for (lo, hi) in &ranges {
        let width: BigInt = (hi - lo + 1i32).max(BigInt::zero());
        let w = width.to_u64().unwrap_or(u64::MAX);
        total = total.saturating_mul(w);
        let lo = lo.to_i64().ok_or(Error::budget("grid points", "unbounded", GRID_BUDGET))?;
        bounds.push((lo, w));
    }
    if total > GRID_BUDGET {
        return Err(Error::budget("grid points", total, GRID_BUDGET));
    }
    let count: u64 = if total == 0 {
        0
    } else {
        let (lo0, w0) = bounds[0];
        let slab = total / w0;
        par::map_range(0, w0, |i| {
            let mut x: Vec<Rational> = vec![Rational::zero(); n];
            x[0] = r * rat(lo0 + i as i64);
            let mut hits = 0u64;
            for idx in 0..slab {
                let mut rest = idx;
                for (axis, &(lo, w)) in bounds.iter().enumerate().skip(1) {
                    x[axis] = r * rat(lo + (rest % w) as i64);
                    rest /= w;
                }
                if region.contains(&x) {
                    hits += 1;
                }
            }
            hits
        })
        .into_iter()
        .sum()
    };
    let n_r = r.pow(n as i32) * rat(count as i64);
    Ok(PointCount { count, n_r })
}

/// Rows `(r, count, N_r)` for a decreasing sequence of scales. Convergence
/// is reported, not asserted.
pub fn mu_z_table(region: &dyn Region, r_list: &[Rational]) -> Result<Table> {
    if r_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::pre("scales must decrease"));
    }
    let mut t = Table::new("mu-z", &["r", "count", "n_r", "n_r_float"]);
    for r in r_list {
        let c = count_scaled_points(region, r)?;
        let f = crate::arith::to_f64(&c.n_r);
        t.push(vec![r.clone().into(), c.count.into(), c.n_r.into(), f.into()]);
    }
    Ok(t)
}

/// Largest number of HNF matrices [`cone_point_count`] will reduce.
pub const CONE_BUDGET: u128 = 200_000;

/// `#(T I F ∩ M_k Z)` with `T^k = D`, counted twice: as the number of
/// sublattices of index `<= D`, and as the number of distinct cone members
/// obtained by reducing every HNF representative. The two must agree.
pub fn cone_point_count(k: usize, d: u64) -> Result<u128> {
    if k != 2 {
        return Err(Error::pre("cone point counting supports k = 2"));
    }
    if d == 0 {
        return Err(Error::pre("D must be positive"));
    }
    let expected = count_sublattices(k, d)?;
    if expected > CONE_BUDGET {
        return Err(Error::budget("cone point count", expected, CONE_BUDGET));
    }
    let opts = ReduceOptions::default();
    let hnfs: Vec<IntMatrix> = enumerate_hnf(k, d).into_iter().map(|h| h.into_matrix()).collect();
    let reps = par::try_map(&hnfs, |a| {
        let rep = reduce_to_f(a, &opts)?.rep;
        if !in_cone_f(&rep, &opts)? {
            return Err(Error::Invariant(format!("representative {rep:?} is not in the cone")));
        }
        Ok(rep)
    })?;
    let distinct = reps.into_iter().collect::<HashSet<_>>().len() as u128;
    if distinct != expected {
        return Err(Error::Invariant(format!(
            "cone count {distinct} differs from sublattice count {expected} at D = {d}"
        )));
    }
    Ok(distinct)
}

/// One row of [`volume_ratio_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeRow {
    pub t: f64,
    pub count: u128,
    pub reference: f64,
    pub ratio: f64,
}

/// Sublattice counts against `zeta(2) ... zeta(k) / k * T^k`.
pub fn volume_ratio_experiment(k: usize, t_list: &[f64]) -> Result<Vec<VolumeRow>> {
    let c = volume_constant(k)?;
    t_list
        .iter()
        .map(|&t| {
            if !(t >= 1.0) || !t.is_finite() {
                return Err(Error::pre(format!("threshold must be at least 1 (got {t})")));
            }
            let count = count_sublattices(k, t.floor() as u64)?;
            let reference = c * t.powi(k as i32);
            Ok(VolumeRow {
                t,
                count,
                reference,
                ratio: count as f64 / reference,
            })
        })
        .collect()
}

pub fn volume_table(k: usize, rows: &[VolumeRow]) -> Table {
    let mut t = Table::new("volume-ratio", &["T", "count", "reference", "ratio"]).param("k", k);
    for r in rows {
        let tc = if r.t.fract() == 0.0 {
            (r.t as u64).into()
        } else {
            r.t.into()
        };
        t.push(vec![tc, r.count.into(), r.reference.into(), r.ratio.into()]);
    }
    t
}

/// `mu_inf` of the unit parallelepiped in the diagonal directions:
/// `|det(e_11 - e_kk, ..., e_(k-1)(k-1) - e_kk, sum e_ii)| / k^2 = 1/k`.
pub fn normalization_constant(k: usize) -> Result<Rational> {
    if k == 0 {
        return Err(Error::pre("rank must be at least 1"));
    }
    let mut rows = Vec::with_capacity(k);
    for i in 0..k - 1 {
        let mut row = vec![0i64; k];
        row[i] = 1;
        row[k - 1] = -1;
        rows.push(row);
    }
    rows.push(vec![1; k]);
    let det = IntMatrix::from_rows(&rows)?.det();
    Ok(Rational::new(det.abs(), BigInt::from(k * k)))
}

/// Primitive directions of the lines through the origin with rational or
/// infinite slope, in a fixed order: by height `max(|a|, |b|)`, then by
/// `|slope|`, positive slope first. The horizontal line comes first.
pub fn rational_lines(m: usize) -> Vec<(i64, i64)> {
    let mut out = Vec::with_capacity(m);
    let mut h = 1i64;
    while out.len() < m {
        let mut level: Vec<(i64, i64)> = Vec::new();
        for a in 0..=h {
            for b in -h..=h {
                if a.max(b.abs()) != h || crate::arith::gcd_i64(a, b) != 1 {
                    continue;
                }
                if a == 0 && b != 1 {
                    continue;
                }
                level.push((a, b));
            }
        }
        // |b1|/a1 < |b2|/a2, with a = 0 (vertical) last.
        level.sort_by(|&(a1, b1), &(a2, b2)| {
            (b1.abs() * a2)
                .cmp(&(b2.abs() * a1))
                .then_with(|| (a1 == 0).cmp(&(a2 == 0)))
                .then_with(|| b2.cmp(&b1))
        });
        out.extend(level);
        h += 1;
    }
    out.truncate(m);
    out
}

/// Largest `j` with `j^2 r^2 n <= 1`, i.e. the lattice points `j r u`
/// (`|u|^2 = n`) in the closed unit disc.
fn max_multiple(r: &Rational, n: i64) -> BigInt {
    let bound = (r * r * rat(n)).recip();
    isqrt_big(&floor_big(&bound))
}

/// One line of the spike construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpikeLine {
    /// Direction of `M_i`.
    pub base: (i64, i64),
    /// Direction of `N_i`, slope `i`.
    pub spike: (i64, i64),
    pub base_points: u64,
    pub spike_points: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpikeRow {
    pub r: Rational,
    pub lines: Vec<SpikeLine>,
    /// `#(∪ L_i ∩ r Z^2)`.
    pub spike_union: u64,
    /// `#(∪ R_i ∩ r Z^2)`.
    pub base_union: u64,
    /// `#(B ∩ r Z^2)` for the full unit disc.
    pub disc: u64,
}

impl SpikeRow {
    pub fn per_line_equal(&self) -> bool {
        self.lines.iter().all(|l| l.base_points == l.spike_points)
    }
}

/// The measure-zero spike set: `R_i = B ∩ M_i` (B the closed unit disc)
/// is moved onto the line `N_i` of slope `i`, scaled by `|w_i| / |u_i|`
/// where `u_i`, `w_i` are the shortest lattice vectors on `M_i`, `N_i`.
/// Lattice points of `r Z^2` on each segment are generated and the unions
/// are deduplicated.
pub fn spike_demo(m: usize, r_list: &[Rational]) -> Result<Vec<SpikeRow>> {
    if m > 10_000 {
        return Err(Error::budget("spike lines", m, 10_000u64));
    }
    let lines = rational_lines(m);
    r_list
        .iter()
        .map(|r| {
            if !r.is_positive() {
                return Err(Error::pre("scale r must be positive"));
            }
            let mut base_set: HashSet<(i64, i64)> = HashSet::new();
            let mut spike_set: HashSet<(i64, i64)> = HashSet::new();
            let mut out = Vec::with_capacity(m);
            for (i, &(a, b)) in lines.iter().enumerate() {
                let slope = i as i64 + 1;
                let nu = a * a + b * b;
                let nw = 1 + slope * slope;
                // R_i: points j r u with j^2 r^2 |u|^2 <= 1.
                let jb = max_multiple(r, nu).to_i64().ok_or(Error::Overflow("spike count"))?;
                // L_i: half-length |w| / |u|, points j r w with j^2 r^2 |w|^2 <= |w|^2 / |u|^2.
                let half_len_sq = crate::arith::ratio(nw, nu);
                let js = isqrt_big(&floor_big(&(half_len_sq / (r * r * rat(nw)))))
                    .to_i64()
                    .ok_or(Error::Overflow("spike count"))?;
                for j in -jb..=jb {
                    base_set.insert((j * a, j * b));
                }
                for j in -js..=js {
                    spike_set.insert((j, j * slope));
                }
                out.push(SpikeLine {
                    base: (a, b),
                    spike: (1, slope),
                    base_points: (2 * jb + 1) as u64,
                    spike_points: (2 * js + 1) as u64,
                });
            }
            let disc = count_scaled_points(&Ball::unit_disc(), r)?.count;
            Ok(SpikeRow {
                r: r.clone(),
                lines: out,
                spike_union: spike_set.len() as u64,
                base_union: base_set.len() as u64,
                disc,
            })
        })
        .collect()
}

pub fn spike_table(rows: &[SpikeRow]) -> Table {
    let mut t = Table::new(
        "spike-demo",
        &[
            "r",
            "lines",
            "spike_points",
            "line_points",
            "spike_n_r",
            "line_n_r",
            "disc_n_r",
            "per_line_equal",
        ],
    );
    for row in rows {
        let r2 = &row.r * &row.r;
        t.push(vec![
            row.r.clone().into(),
            row.lines.len().into(),
            row.spike_union.into(),
            row.base_union.into(),
            (&r2 * rat(row.spike_union as i64)).into(),
            (&r2 * rat(row.base_union as i64)).into(),
            (&r2 * rat(row.disc as i64)).into(),
            row.per_line_equal().into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    #[test]
    fn grid_examples() {
        let c = count_scaled_points(&HalfOpenBox::unit(2), &ratio(1, 10)).unwrap();
        assert_eq!((c.count, c.n_r), (100, rat(1)));
        let c = count_scaled_points(&Ball::unit_disc(), &ratio(1, 2)).unwrap();
        assert_eq!((c.count, c.n_r), (13, ratio(13, 4)));
        assert_eq!(count_scaled_points(&Empty(2), &ratio(1, 3)).unwrap().count, 0);
        assert!(count_scaled_points(&Ball::unit_disc(), &rat(0)).is_err());
    }

    #[test]
    fn cone_counts() {
        let got: Vec<u128> = (1..=4).map(|d| cone_point_count(2, d).unwrap()).collect();
        assert_eq!(got, vec![1, 4, 8, 15]);
    }

    #[test]
    fn volume_rows() {
        let rows = volume_ratio_experiment(2, &[10.0]).unwrap();
        assert_eq!(rows[0].count, 87);
        assert!((rows[0].reference - 82.2467033424).abs() < 1e-9);
        assert!((rows[0].ratio - 1.0578).abs() < 1e-4);
        let rows = volume_ratio_experiment(1, &[7.5]).unwrap();
        assert_eq!(rows[0].ratio, 7.0 / 7.5);
    }

    #[test]
    fn normalization() {
        for k in 1..=6 {
            assert_eq!(normalization_constant(k).unwrap(), ratio(1, k as i64));
        }
    }

    #[test]
    fn line_order() {
        assert_eq!(
            rational_lines(8),
            vec![(1, 0), (1, 1), (1, -1), (0, 1), (2, 1), (2, -1), (1, 2), (1, -2)]
        );
    }

    #[test]
    fn spike_examples() {
        let rows = spike_demo(1, &[ratio(1, 10)]).unwrap();
        assert_eq!(rows[0].lines[0].base_points, 21);
        assert_eq!(rows[0].spike_union, 21);
        assert_eq!(rows[0].base_union, 21);
        let rows = spike_demo(0, &[ratio(1, 10)]).unwrap();
        assert_eq!((rows[0].spike_union, rows[0].base_union), (0, 0));
    }
}
