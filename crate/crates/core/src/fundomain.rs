//! The fundamental domain `F` of `Sl_k Z` acting on `Sl_k R` from the right.
//!
//! Each orbit `A Sl_k Z` has a representative nearest to the identity after
//! scaling to determinant 1. Ties are broken by comparing entries in
//! row-major order, smaller entry first. An integer matrix lies in the cone
//! `R+ F` exactly when it is its own representative.
//!
//! Distances are compared without taking roots. For `x = det^(-1/k)`,
//!
//! ```text
//! |x A g - 1|^2 = x^2 a - 2 x b + k,   a = |A g|^2,  b = tr(A g)
//! ```
//!
//! so two candidates differ in sign by `(a1 - a2) - 2 (b1 - b2) det^(1/k)`,
//! which is decided by raising both sides to the k-th power.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{rat, sqrt_lower, sqrt_upper, Rational};
use crate::error::{Error, Result};
use crate::hnf::HnfMatrix;
use crate::lattice::LatticeBasis;
use crate::matrix::IntMatrix;

/// An integer matrix with positive determinant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeElement {
    matrix: IntMatrix,
    det: u64,
}

impl ConeElement {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        let det = positive_det(&matrix)?;
        Ok(ConeElement { matrix, det })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn det(&self) -> u64 {
        self.det
    }
}

fn positive_det(m: &IntMatrix) -> Result<u64> {
    let d = m.det();
    if !d.is_positive() {
        return Err(Error::pre(format!("determinant must be positive (got {d})")));
    }
    d.to_u64().ok_or(Error::Overflow("determinant"))
}

/// Sign of `p - q * d^(1/k)` for `d > 0`.
fn sign_p_minus_qy(p: &BigInt, q: &BigInt, d: &BigInt, k: u32) -> Ordering {
    let zero = BigInt::zero();
    match (p.cmp(&zero), q.cmp(&zero)) {
        (_, Ordering::Equal) => p.cmp(&zero),
        (Ordering::Greater, Ordering::Less) | (Ordering::Equal, Ordering::Less) => {
            Ordering::Greater
        }
        (Ordering::Less, Ordering::Greater) | (Ordering::Equal, Ordering::Greater) => {
            Ordering::Less
        }
        (Ordering::Greater, Ordering::Greater) => p.pow(k).cmp(&(q.pow(k) * d)),
        (Ordering::Less, Ordering::Less) => (q.abs().pow(k) * d).cmp(&p.abs().pow(k)),
    }
}

/// Orders two matrices of equal determinant `d` by distance to the identity
/// after scaling to determinant 1. Does not break ties.
fn cmp_scaled(m1: &IntMatrix, m2: &IntMatrix, d: u64) -> Ordering {
    let k = m1.dim() as u32;
    let da = BigInt::from(m1.frobenius_sq()) - BigInt::from(m2.frobenius_sq());
    let db = BigInt::from(2) * (BigInt::from(m1.trace()) - BigInt::from(m2.trace()));
    sign_p_minus_qy(&da, &db, &BigInt::from(d), k)
}

fn check_unimodular(g: &IntMatrix, n: usize) -> Result<()> {
    if g.dim() != n {
        return Err(Error::pre("matrix sizes differ"));
    }
    if !g.det().is_one() {
        return Err(Error::pre("change of basis must have determinant 1"));
    }
    Ok(())
}

/// Compares `|A g1 / det^(1/k) - 1|` with `|A g2 / det^(1/k) - 1|` exactly.
pub fn compare_distance(a: &IntMatrix, g1: &IntMatrix, g2: &IntMatrix) -> Result<Ordering> {
    let d = positive_det(a)?;
    check_unimodular(g1, a.dim())?;
    check_unimodular(g2, a.dim())?;
    Ok(cmp_scaled(&a.mul(g1)?, &a.mul(g2)?, d))
}

/// Squared distance of `m / det^(1/k)` from the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceSq {
    /// Present when `det` is a perfect k-th power.
    pub exact: Option<Rational>,
    pub approx: f64,
}

pub fn normalized_distance_sq(m: &IntMatrix) -> Result<DistanceSq> {
    let d = positive_det(m)?;
    let k = m.dim() as u32;
    let a = m.frobenius_sq();
    let b = m.trace();
    let root = BigInt::from(d).nth_root(k);
    let exact = (root.pow(k) == BigInt::from(d)).then(|| {
        let y = Rational::from_integer(root);
        Rational::from_integer(BigInt::from(a)) / (&y * &y)
            - Rational::from_integer(BigInt::from(2 * b)) / &y
            + rat(k as i64)
    });
    Ok(DistanceSq {
        exact,
        approx: approx_distance_sq(a as f64, b as f64, (d as f64).powf(1.0 / k as f64), k),
    })
}

fn approx_distance_sq(a: f64, b: f64, y: f64, k: u32) -> f64 {
    a / (y * y) - 2.0 * b / y + k as f64
}

/// Limits for [`reduce_to_f`].
#[derive(Clone, Copy, Debug)]
pub struct ReduceOptions {
    /// Rank 3 is searched only when set.
    pub allow_rank3: bool,
    /// Largest number of lattice vectors the search may enumerate.
    pub vector_budget: u64,
    /// Largest number of partial bases the branch-and-bound may visit.
    pub node_budget: u64,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            allow_rank3: false,
            vector_budget: 200_000,
            node_budget: 20_000_000,
        }
    }
}

impl ReduceOptions {
    pub fn rank3() -> Self {
        ReduceOptions {
            allow_rank3: true,
            ..Self::default()
        }
    }
}

/// Output of [`reduce_to_f`]: `rep = A * gamma` with `det gamma = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub gamma: IntMatrix,
    pub rep: IntMatrix,
    /// Squared radius every column of every competing basis was confined to.
    pub column_bound_sq: BigInt,
    /// Number of full candidate bases compared exactly.
    pub compared: u64,
}

// Relative and absolute slack for float pruning, so exact ties are never cut.
const SLACK: f64 = 1e-9;

struct Candidate {
    coeffs: Vec<i64>,
    ambient: Vec<i64>,
    norm_sq: i128,
}

struct Search<'a> {
    k: usize,
    d: u64,
    y: f64,
    per_column: Vec<Vec<(f64, &'a Candidate)>>,
    best_rep: IntMatrix,
    best_gamma: IntMatrix,
    limit: f64,
    nodes: u64,
    node_budget: u64,
    compared: u64,
}

impl Search<'_> {
    fn limit_for(&self, m: &IntMatrix) -> f64 {
        let v = approx_distance_sq(m.frobenius_sq() as f64, m.trace() as f64, self.y, self.k as u32);
        v * (1.0 + SLACK) + SLACK
    }

    fn descend(&mut self, j: usize, partial: f64, chosen: &mut Vec<usize>) -> Result<()> {
        if j == self.k {
            return self.leaf(chosen);
        }
        for idx in 0..self.per_column[j].len() {
            let (c, _) = self.per_column[j][idx];
            if partial + c > self.limit {
                break;
            }
            self.nodes += 1;
            if self.nodes > self.node_budget {
                return Err(Error::budget("reduction nodes", self.nodes, self.node_budget));
            }
            chosen.push(idx);
            self.descend(j + 1, partial + c, chosen)?;
            chosen.pop();
        }
        Ok(())
    }

    fn leaf(&mut self, chosen: &[usize]) -> Result<()> {
        let cols: Vec<&Candidate> = chosen
            .iter()
            .enumerate()
            .map(|(j, &i)| self.per_column[j][i].1)
            .collect();
        let gamma =
            IntMatrix::from_columns(&cols.iter().map(|c| c.coeffs.clone()).collect::<Vec<_>>())?;
        if !gamma.det().is_one() {
            return Ok(());
        }
        let rep =
            IntMatrix::from_columns(&cols.iter().map(|c| c.ambient.clone()).collect::<Vec<_>>())?;
        self.compared += 1;
        let ord = cmp_scaled(&rep, &self.best_rep, self.d)
            .then_with(|| rep.entries().cmp(self.best_rep.entries()));
        if ord == Ordering::Less {
            self.limit = self.limit_for(&rep);
            self.best_rep = rep;
            self.best_gamma = gamma;
        }
        Ok(())
    }
}

fn unit_ball_volume(k: usize) -> f64 {
    match k {
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => 4.0 / 3.0 * std::f64::consts::PI,
    }
}

/// A starting basis: the better of `A` and its greedy basis with the sign fixed.
fn seed(a: &IntMatrix, lattice: &LatticeBasis, d: u64) -> Result<(IntMatrix, IntMatrix)> {
    let k = a.dim();
    let greedy = lattice.greedy_basis();
    let coords = lattice.coordinate_matrix(&greedy.vectors)?;
    let mut gamma = IntMatrix::from_columns(&coords)?;
    if gamma.det().is_negative() {
        gamma.negate_column(k - 1);
    }
    let rep = a.mul(&gamma)?;
    if cmp_scaled(&rep, a, d) == Ordering::Less {
        Ok((gamma, rep))
    } else {
        Ok((IntMatrix::identity(k), a.clone()))
    }
}

/// The representative of `A Sl_k Z` in `R+ F`, found by branch-and-bound.
///
/// Any basis `B` closer to the identity than the current best `B0` has
/// `|b_j / y - e_j| <= |B0 / y - 1|` for every column, where `y = det^(1/k)`.
/// So every column is a lattice vector of length at most
/// `(|B0 / y - 1| + 1) y`, and those are enumerated exactly.
pub fn reduce_to_f(a: &IntMatrix, opts: &ReduceOptions) -> Result<Reduction> {
    let k = a.dim();
    let d = positive_det(a)?;
    match k {
        1 | 2 => {}
        3 if opts.allow_rank3 => {}
        3 => return Err(Error::pre("rank 3 reduction must be requested explicitly")),
        _ => return Err(Error::pre(format!("reduction supports k <= 3 (got {k})"))),
    }
    if k == 1 {
        return Ok(Reduction {
            gamma: IntMatrix::identity(1),
            rep: a.clone(),
            column_bound_sq: BigInt::zero(),
            compared: 1,
        });
    }
    let lattice = LatticeBasis::from_matrix_columns(a)?;
    let y = (d as f64).powf(1.0 / k as f64);
    let (gamma0, rep0) = seed(a, &lattice, d)?;

    let dist0 = approx_distance_sq(rep0.frobenius_sq() as f64, rep0.trace() as f64, y, k as u32);
    let radius = ((dist0 * (1.0 + SLACK) + SLACK).sqrt() + 1.0) * y;
    let bound_f = (radius * radius) * (1.0 + SLACK) + 1.0;
    let estimate = unit_ball_volume(k) * radius.powi(k as i32) / d as f64;
    if !bound_f.is_finite() || estimate > opts.vector_budget as f64 {
        return Err(Error::budget(
            "reduction vectors",
            format!("~{estimate:.0} vectors within squared radius {bound_f:.0}"),
            opts.vector_budget,
        ));
    }
    let bound = BigInt::from(bound_f.ceil() as u128);
    let raw = lattice.vectors_within(&Rational::from_integer(bound.clone()));
    if raw.len() as u64 > opts.vector_budget {
        return Err(Error::budget("reduction vectors", raw.len(), opts.vector_budget));
    }
    let cands: Vec<Candidate> = raw
        .into_iter()
        .map(|(coeffs, _)| {
            let ambient = a.mul_vec(&coeffs)?;
            let norm_sq = ambient.iter().map(|&x| x as i128 * x as i128).sum();
            Ok(Candidate {
                coeffs,
                ambient,
                norm_sq,
            })
        })
        .collect::<Result<_>>()?;

    let mut search = Search {
        k,
        d,
        y,
        per_column: Vec::new(),
        best_rep: rep0.clone(),
        best_gamma: gamma0,
        limit: 0.0,
        nodes: 0,
        node_budget: opts.node_budget,
        compared: 0,
    };
    search.limit = search.limit_for(&rep0);
    for j in 0..k {
        let mut col: Vec<(f64, &Candidate)> = cands
            .iter()
            .map(|c| (c.norm_sq as f64 / (y * y) - 2.0 * c.ambient[j] as f64 / y + 1.0, c))
            .filter(|(v, _)| *v <= search.limit)
            .collect();
        col.sort_by(|x, y| x.0.total_cmp(&y.0));
        search.per_column.push(col);
    }
    search.descend(0, 0.0, &mut Vec::with_capacity(k))?;
    Ok(Reduction {
        gamma: search.best_gamma,
        rep: search.best_rep,
        column_bound_sq: bound,
        compared: search.compared,
    })
}

/// Whether `A` is the representative of its own orbit, i.e. `A` lies in `R+ F`.
pub fn in_cone_f(a: &IntMatrix, opts: &ReduceOptions) -> Result<bool> {
    Ok(reduce_to_f(a, opts)?.rep == *a)
}

/// Squared size of the sublattice spanned by the columns of `h`: the
/// sum of squared lengths of its basis lying in `R+ F`.
pub fn size_sq(h: &HnfMatrix, opts: &ReduceOptions) -> Result<Rational> {
    let rep = reduce_to_f(h.matrix(), opts)?.rep;
    Ok(Rational::from_integer(BigInt::from(rep.frobenius_sq())))
}

/// Both sides of the comparison between `minbasis` and `size`.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeBounds {
    pub minbasis_sq: Rational,
    pub size_sq: Rational,
    /// `minbasis <= size`, decided exactly.
    pub lower_holds: bool,
    /// `size <= minbasis + 2 sqrt(k) covol^(1/k)`, decided with rational
    /// outer bounds on the square and k-th roots.
    pub upper_holds: bool,
}

pub fn size_bounds(h: &HnfMatrix, opts: &ReduceOptions) -> Result<SizeBounds> {
    const BITS: u32 = 40;
    let k = h.rank();
    let size = size_sq(h, opts)?;
    let mb = h.lattice().minbasis_sq()?;
    let covol = BigInt::from(h.det());
    let scale = BigInt::one() << BITS;
    let u_lo = Rational::new((&covol * scale.pow(k as u32)).nth_root(k as u32), scale);
    let slack_lo = rat(2) * sqrt_lower(&rat(k as i64), BITS) * u_lo;
    let rhs_lo = sqrt_lower(&mb, BITS) + slack_lo;
    Ok(SizeBounds {
        lower_holds: mb <= size,
        upper_holds: sqrt_upper(&size, BITS) <= rhs_lo,
        minbasis_sq: mb,
        size_sq: size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> IntMatrix {
        IntMatrix::parse(s).unwrap()
    }

    #[test]
    fn distance_examples() {
        let a = m("49,18;0,1");
        let g1 = m("-1,-2;3,5");
        let id = IntMatrix::identity(2);
        assert_eq!(a.mul(&g1).unwrap(), m("5,-8;3,5"));
        assert_eq!(compare_distance(&a, &g1, &id).unwrap(), Ordering::Less);
        assert_eq!(compare_distance(&a, &g1, &g1).unwrap(), Ordering::Equal);
        let d1 = normalized_distance_sq(&m("5,-8;3,5")).unwrap();
        let d0 = normalized_distance_sq(&a).unwrap();
        assert_eq!(d1.exact, Some(Rational::new(81.into(), 49.into())));
        assert_eq!(d0.exact, Some(Rational::new(2124.into(), 49.into())));
        assert!(compare_distance(&a, &m("2,0;0,1"), &id).is_err());
        assert!(compare_distance(&m("0,1;1,0"), &id, &id).is_err());
    }

    #[test]
    fn sign_cases() {
        let b = |x: i64| BigInt::from(x);
        // p - q * sqrt(2)
        assert_eq!(sign_p_minus_qy(&b(3), &b(2), &b(2), 2), Ordering::Greater);
        assert_eq!(sign_p_minus_qy(&b(2), &b(2), &b(2), 2), Ordering::Less);
        assert_eq!(sign_p_minus_qy(&b(-3), &b(-2), &b(2), 2), Ordering::Less);
        assert_eq!(sign_p_minus_qy(&b(-2), &b(-2), &b(2), 2), Ordering::Greater);
        assert_eq!(sign_p_minus_qy(&b(0), &b(0), &b(2), 2), Ordering::Equal);
        // 2 - 1 * 8^(1/3) = 0
        assert_eq!(sign_p_minus_qy(&b(2), &b(1), &b(8), 3), Ordering::Equal);
        assert_eq!(sign_p_minus_qy(&b(-2), &b(-1), &b(8), 3), Ordering::Equal);
    }

    #[test]
    fn scalar_matrices_are_fixed() {
        for n in 1..6 {
            let a = IntMatrix::scalar(2, n);
            let r = reduce_to_f(&a, &ReduceOptions::default()).unwrap();
            assert_eq!(r.rep, a);
            assert_eq!(r.gamma, IntMatrix::identity(2));
        }
        let a = IntMatrix::scalar(3, 2);
        assert!(reduce_to_f(&a, &ReduceOptions::default()).is_err());
        assert_eq!(reduce_to_f(&a, &ReduceOptions::rank3()).unwrap().rep, a);
    }

    #[test]
    fn warning_matrix_reduces() {
        let a = m("49,18;0,1");
        let r = reduce_to_f(&a, &ReduceOptions::default()).unwrap();
        assert_eq!(r.rep, a.mul(&r.gamma).unwrap());
        assert_eq!(r.gamma.det(), BigInt::one());
        assert_eq!(cmp_scaled(&r.rep, &a, 49), Ordering::Less);
        assert!(!in_cone_f(&a, &ReduceOptions::default()).unwrap());
        assert!(in_cone_f(&r.rep, &ReduceOptions::default()).unwrap());
    }

    #[test]
    fn identity_and_sizes() {
        let opts = ReduceOptions::default();
        assert!(in_cone_f(&IntMatrix::identity(2), &opts).unwrap());
        let z2 = HnfMatrix::new(IntMatrix::identity(2)).unwrap();
        assert_eq!(size_sq(&z2, &opts).unwrap(), rat(2));
        for n in 1..5 {
            let h = HnfMatrix::new(IntMatrix::scalar(2, n)).unwrap();
            assert_eq!(size_sq(&h, &opts).unwrap(), rat(2 * n * n));
        }
        assert!(reduce_to_f(&m("0,1;1,0"), &opts).is_err());
        assert!(reduce_to_f(&m("1,0;0,0"), &opts).is_err());
    }

    #[test]
    fn budget_is_reported() {
        let opts = ReduceOptions {
            vector_budget: 3,
            ..ReduceOptions::default()
        };
        let err = reduce_to_f(&m("49,18;0,1"), &opts).unwrap_err();
        assert_eq!(err.kind(), "budget-exceeded");
    }

    #[test]
    fn size_bounds_small_index() {
        let h = HnfMatrix::new(m("49,18;0,1")).unwrap();
        let s = size_bounds(&h, &ReduceOptions::default()).unwrap();
        assert!(s.lower_holds && s.upper_holds);
    }
}
