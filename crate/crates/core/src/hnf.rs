//! Hermite normal forms and sublattice counting in `Z^k`.
//!
//! Finite-index sublattices of `Z^k` correspond one-to-one with integer
//! matrices in column Hermite normal form: upper triangular, positive
//! diagonal, and `0 <= A[i][j] < A[i][i]` above the diagonal. With diagonal
//! `(n_1, ..., n_k)` there are `n_1^(k-1) n_2^(k-2) ... n_k^0` such matrices,
//! which drives all of the counting below.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{checked_pow_u128, divisors, power_sums, rat, Rational};
use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;
use crate::matrix::IntMatrix;
use crate::par;

/// An integer matrix in column Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HnfMatrix(IntMatrix);

impl HnfMatrix {
    /// Validates the Hermite-normal-form invariants.
    pub fn new(m: IntMatrix) -> Result<Self> {
        let n = m.dim();
        for i in 0..n {
            if m.get(i, i) <= 0 {
                return Err(Error::pre(format!("diagonal entry {i} must be positive")));
            }
            for j in 0..n {
                let a = m.get(i, j);
                if i > j && a != 0 {
                    return Err(Error::pre("entries below the diagonal must vanish"));
                }
                if i < j && !(0..m.get(i, i)).contains(&a) {
                    return Err(Error::pre(format!(
                        "entry ({i},{j}) must lie in [0, {})",
                        m.get(i, i)
                    )));
                }
            }
        }
        Ok(HnfMatrix(m))
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.0
    }

    pub fn rank(&self) -> usize {
        self.0.dim()
    }

    pub fn diagonal(&self) -> Vec<u64> {
        (0..self.rank()).map(|i| self.0.get(i, i) as u64).collect()
    }

    /// The index `[Z^k : H]`.
    pub fn det(&self) -> u64 {
        self.diagonal().iter().product()
    }

    pub fn lattice(&self) -> LatticeBasis {
        LatticeBasis::from_matrix_columns(&self.0).expect("HNF matrices are nonsingular")
    }
}

type Work = Vec<Vec<i128>>;

fn col_axpy(m: &mut Work, dst: usize, q: i128, src: usize) -> Result<()> {
    for row in m.iter_mut() {
        let v = q
            .checked_mul(row[src])
            .and_then(|t| row[dst].checked_sub(t))
            .ok_or(Error::Overflow("hnf column operation"))?;
        row[dst] = v;
    }
    Ok(())
}

fn col_swap(m: &mut Work, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn col_negate(m: &mut Work, a: usize) {
    for row in m.iter_mut() {
        row[a] = -row[a];
    }
}

fn to_work(m: &IntMatrix) -> Work {
    m.rows()
        .into_iter()
        .map(|r| r.into_iter().map(i128::from).collect())
        .collect()
}

fn from_work(w: &Work) -> Result<IntMatrix> {
    let rows = w
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| i64::try_from(x).map_err(|_| Error::Overflow("hnf entry")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    IntMatrix::from_rows(&rows)
}

/// The Hermite normal form of `a` together with a unimodular `s` such that
/// `a * s = hnf`.
pub fn hnf_of(a: &IntMatrix) -> Result<(HnfMatrix, IntMatrix)> {
    if a.det().is_zero() {
        return Err(Error::Singular("hnf_of needs a nonzero determinant".into()));
    }
    let n = a.dim();
    let mut h = to_work(a);
    let mut s = to_work(&IntMatrix::identity(n));
    for i in (0..n).rev() {
        loop {
            let nz: Vec<usize> = (0..=i).filter(|&j| h[i][j] != 0).collect();
            if nz.len() == 1 {
                let p = nz[0];
                if p != i {
                    col_swap(&mut h, p, i);
                    col_swap(&mut s, p, i);
                }
                break;
            }
            let p = *nz.iter().min_by_key(|&&j| h[i][j].abs()).unwrap();
            for &j in &nz {
                if j != p {
                    let q = h[i][j].div_euclid(h[i][p]);
                    col_axpy(&mut h, j, q, p)?;
                    col_axpy(&mut s, j, q, p)?;
                }
            }
        }
        if h[i][i] < 0 {
            col_negate(&mut h, i);
            col_negate(&mut s, i);
        }
    }
    for j in 0..n {
        for i in (0..j).rev() {
            let q = h[i][j].div_euclid(h[i][i]);
            if q != 0 {
                col_axpy(&mut h, j, q, i)?;
                col_axpy(&mut s, j, q, i)?;
            }
        }
    }
    Ok((HnfMatrix::new(from_work(&h)?)?, from_work(&s)?))
}

/// Next diagonal tuple in lexicographic order with product `<= max_det`.
fn next_diagonal(diag: &mut [u64], max_det: u64) -> bool {
    let k = diag.len();
    for pos in (0..k).rev() {
        for d in diag[pos + 1..].iter_mut() {
            *d = 1;
        }
        diag[pos] += 1;
        let prod = diag
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d))
            .unwrap_or(u64::MAX);
        if prod <= max_det {
            return true;
        }
    }
    false
}

/// Every diagonal `(n_1..n_k)` with product `<= max_det`, lexicographically.
pub fn diagonals(k: usize, max_det: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    if k == 0 || max_det == 0 {
        return out;
    }
    let mut d = vec![1u64; k];
    loop {
        out.push(d.clone());
        if !next_diagonal(&mut d, max_det) {
            break;
        }
    }
    out
}

fn off_positions(k: usize) -> Vec<(usize, usize)> {
    (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect()
}

/// Visits every HNF matrix with the given diagonal, off-diagonal entries in
/// lexicographic (row-major) order. The visitor returns `false` to stop.
pub fn for_each_with_diagonal<F>(diag: &[u64], mut visit: F) -> bool
where
    F: FnMut(&HnfMatrix) -> bool,
{
    let k = diag.len();
    let pos = off_positions(k);
    let mut m = IntMatrix::scalar(k, 0);
    for (i, &d) in diag.iter().enumerate() {
        m.set(i, i, d as i64);
    }
    let mut off = vec![0u64; pos.len()];
    loop {
        if !visit(&HnfMatrix(m.clone())) {
            return false;
        }
        // odometer, last position fastest
        let mut advanced = false;
        for idx in (0..pos.len()).rev() {
            let (i, j) = pos[idx];
            off[idx] += 1;
            if off[idx] < diag[i] {
                m.set(i, j, off[idx] as i64);
                advanced = true;
                break;
            }
            off[idx] = 0;
            m.set(i, j, 0);
        }
        if !advanced {
            return true;
        }
    }
}

/// Streaming enumeration of all `k x k` HNF matrices with `det <= max_det`,
/// ordered by diagonal then off-diagonal entries.
pub fn for_each_hnf<F>(k: usize, max_det: u64, mut visit: F)
where
    F: FnMut(&HnfMatrix) -> bool,
{
    for d in diagonals(k, max_det) {
        if !for_each_with_diagonal(&d, &mut visit) {
            return;
        }
    }
}

/// Collected form of [`for_each_hnf`].
pub fn enumerate_hnf(k: usize, max_det: u64) -> Vec<HnfMatrix> {
    let mut out = Vec::new();
    for_each_hnf(k, max_det, |h| {
        out.push(h.clone());
        true
    });
    out
}

/// Every HNF matrix of determinant exactly `n`.
pub fn enumerate_hnf_with_det(k: usize, n: u64) -> Vec<HnfMatrix> {
    let mut out = Vec::new();
    for d in diagonals(k, n) {
        if d.iter().product::<u64>() == n {
            for_each_with_diagonal(&d, |h| {
                out.push(h.clone());
                true
            });
        }
    }
    out
}

/// Number of HNF matrices with a given diagonal, `prod n_i^(k-i)`.
pub fn hnf_count_for_diagonal(diag: &[u64]) -> Result<u128> {
    let k = diag.len();
    diag.iter().enumerate().try_fold(1u128, |acc, (i, &n)| {
        acc.checked_mul(checked_pow_u128(n, (k - 1 - i) as u32)?)
            .ok_or(Error::Overflow("hnf count"))
    })
}

/// Distinct values of `floor(t / m)` for `m >= 1`, with an index lookup.
struct FloorValues {
    t: u64,
    values: Vec<u64>,
    small: Vec<usize>,
    large: Vec<usize>,
    root: u64,
}

impl FloorValues {
    fn new(t: u64) -> Self {
        let mut values = Vec::new();
        let mut m = 1u64;
        while m <= t {
            let q = t / m;
            values.push(q);
            m = t / q + 1;
        }
        values.reverse();
        let root = crate::arith::isqrt_u64(t);
        let mut small = vec![usize::MAX; root as usize + 1];
        let mut large = vec![usize::MAX; root as usize + 2];
        for (idx, &v) in values.iter().enumerate() {
            if v <= root {
                small[v as usize] = idx;
            } else {
                large[(t / v) as usize] = idx;
            }
        }
        FloorValues { t, values, small, large, root }
    }

    fn index(&self, v: u64) -> usize {
        if v <= self.root {
            self.small[v as usize]
        } else {
            self.large[(self.t / v) as usize]
        }
    }
}

fn power_sum(m: u64, e: u32) -> Result<u128> {
    Ok(power_sums(m, e)?[e as usize])
}

/// `#{ H <= Z^k : [Z^k : H] <= t }`, exactly.
///
/// Uses `count_k(t) = sum_{n <= t} n^(k-1) count_{k-1}(floor(t/n))`, evaluated
/// bottom-up over the `O(sqrt t)` distinct floor values, with runs of equal
/// `floor(q/n)` collapsed through closed-form power sums.
pub fn count_sublattices(k: usize, t: u64) -> Result<u128> {
    if k == 0 {
        return Err(Error::pre("rank k must be at least 1"));
    }
    if t == 0 {
        return Ok(0);
    }
    let fv = FloorValues::new(t);
    let mut prev: Vec<u128> = vec![1; fv.values.len()];
    for level in 1..=k {
        let e = (level - 1) as u32;
        let prev_ref = &prev;
        let fv_ref = &fv;
        let cur: Vec<Result<u128>> = par::map(&fv.values, |&q| {
            let mut acc: u128 = 0;
            let mut n = 1u64;
            let mut below = 0u128;
            while n <= q {
                let v = q / n;
                let r = q / v;
                let upto = power_sum(r, e)?;
                let block = upto - below;
                below = upto;
                let term = block
                    .checked_mul(prev_ref[fv_ref.index(v)])
                    .ok_or(Error::Overflow("sublattice count"))?;
                acc = acc
                    .checked_add(term)
                    .ok_or(Error::Overflow("sublattice count"))?;
                n = r + 1;
            }
            Ok(acc)
        });
        prev = cur.into_iter().collect::<Result<_>>()?;
    }
    Ok(prev[fv.index(t)])
}

/// Number of sublattices of index exactly `n`: the `n`-th Dirichlet
/// coefficient of `zeta(s) zeta(s-1) ... zeta(s-k+1)`.
pub fn count_by_index(k: usize, n: u64) -> Result<u128> {
    if k == 0 || n == 0 {
        return Err(Error::pre("k and n must be positive"));
    }
    fn go(k: usize, n: u64, memo: &mut HashMap<(usize, u64), u128>) -> Result<u128> {
        if k == 0 {
            return Ok(u128::from(n == 1));
        }
        if let Some(&v) = memo.get(&(k, n)) {
            return Ok(v);
        }
        let mut acc = 0u128;
        for d in divisors(n) {
            let term = checked_pow_u128(d, (k - 1) as u32)?
                .checked_mul(go(k - 1, n / d, memo)?)
                .ok_or(Error::Overflow("count by index"))?;
            acc = acc.checked_add(term).ok_or(Error::Overflow("count by index"))?;
        }
        memo.insert((k, n), acc);
        Ok(acc)
    }
    go(k, n, &mut HashMap::new())
}

/// Largest number of HNF matrices [`count_with_short_vector`] will scan.
pub const SHORT_VECTOR_BUDGET: u128 = 2_000_000;

/// The constant `c_k = 2^k * ceil(vol(unit k-ball))` used in the
/// short-vector bound: 16 for k = 2, 40 for k = 3.
///
/// For `R >= 1` the number of nonzero integer vectors of length `<= R` is
/// below `c_k R^k`, which is what the bound needs.
pub fn short_vector_constant(k: usize) -> Result<u64> {
    match k {
        2 => Ok(16),
        3 => Ok(40),
        _ => Err(Error::pre("short-vector counting supports k = 2 or 3")),
    }
}

/// Result of [`count_with_short_vector`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortVectorCount {
    pub count: u128,
    /// `floor(T^k)`, the largest index scanned.
    pub max_index: u64,
    pub constant: u64,
    /// `c S^-k T^(k^2)`.
    pub bound: Rational,
}

/// `#{ L <= Z^k : [Z^k : L] <= T^k and min L <= T/S }` by exhaustive scan.
pub fn count_with_short_vector(k: usize, t: &Rational, s: &Rational) -> Result<ShortVectorCount> {
    let constant = short_vector_constant(k)?;
    if !t.is_positive() {
        return Err(Error::pre("T must be positive"));
    }
    if *s < rat(1) {
        return Err(Error::pre("S must be at least 1"));
    }
    let tk = t.pow(k as i32);
    let max_index = tk
        .floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::budget("short-vector scan", &tk, SHORT_VECTOR_BUDGET))?;
    let total = count_sublattices(k, max_index)?;
    if total > SHORT_VECTOR_BUDGET {
        return Err(Error::budget(
            "short-vector scan (matrices)",
            total,
            SHORT_VECTOR_BUDGET,
        ));
    }
    let radius = t / s;
    let threshold = &radius * &radius;
    let diags = diagonals(k, max_index);
    let per_diag = par::map(&diags, |d| {
        let mut n = 0u128;
        for_each_with_diagonal(d, |h| {
            if h.lattice().has_vector_within(&threshold) {
                n += 1;
            }
            true
        });
        n
    });
    let bound = Rational::from_integer(BigInt::from(constant))
        * s.pow(-(k as i32))
        * t.pow((k * k) as i32);
    Ok(ShortVectorCount {
        count: per_diag.into_iter().sum(),
        max_index,
        constant,
        bound,
    })
}

/// `true` if `s` is unimodular (det = +-1).
pub fn is_unimodular(s: &IntMatrix) -> bool {
    let d = s.det();
    d == BigInt::one() || d == -BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    fn m(s: &str) -> IntMatrix {
        IntMatrix::parse(s).unwrap()
    }

    #[test]
    fn hnf_examples() {
        let (h, s) = hnf_of(&IntMatrix::identity(3)).unwrap();
        assert_eq!(h.matrix(), &IntMatrix::identity(3));
        assert_eq!(s, IntMatrix::identity(3));

        let a = m("5,-8;3,5");
        let (h, s) = hnf_of(&a).unwrap();
        assert_eq!(h.matrix(), &m("49,18;0,1"));
        assert!(is_unimodular(&s));
        assert_eq!(&a.mul(&s).unwrap(), h.matrix());

        let neg = m("0,1;1,0");
        let (h, s) = hnf_of(&neg).unwrap();
        assert_eq!(h.matrix(), &IntMatrix::identity(2));
        assert_eq!(s.det(), BigInt::from(-1));

        assert!(matches!(hnf_of(&m("1,2;2,4")), Err(Error::Singular(_))));
    }

    #[test]
    fn hnf_validation() {
        assert!(HnfMatrix::new(m("2,2;0,1")).is_err());
        assert!(HnfMatrix::new(m("2,1;1,1")).is_err());
        assert!(HnfMatrix::new(m("2,1;0,-1")).is_err());
        assert!(HnfMatrix::new(m("2,1;0,3")).is_ok());
    }

    #[test]
    fn enumeration_examples() {
        let k1: Vec<_> = enumerate_hnf(1, 5).iter().map(|h| h.det()).collect();
        assert_eq!(k1, vec![1, 2, 3, 4, 5]);

        let k2: Vec<_> = enumerate_hnf(2, 2).into_iter().map(|h| h.into_matrix()).collect();
        assert_eq!(
            k2,
            vec![m("1,0;0,1"), m("1,0;0,2"), m("2,0;0,1"), m("2,1;0,1")]
        );

        let mut n = 0;
        for_each_with_diagonal(&[2, 3, 1], |_| {
            n += 1;
            true
        });
        assert_eq!(n, 12);
        assert_eq!(hnf_count_for_diagonal(&[2, 3, 1]).unwrap(), 12);
    }

    #[test]
    fn enumeration_stops_early() {
        let mut seen = 0;
        for_each_hnf(2, 10, |_| {
            seen += 1;
            seen < 5
        });
        assert_eq!(seen, 5);
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_sublattices(1, 7).unwrap(), 7);
        assert_eq!(count_sublattices(2, 10).unwrap(), 87);
        assert_eq!(count_sublattices(3, 2).unwrap(), 8);
        assert_eq!(count_sublattices(2, 0).unwrap(), 0);
        assert_eq!(count_by_index(2, 6).unwrap(), 12);
        assert_eq!(count_by_index(5, 1).unwrap(), 1);
        for p in [2u64, 3, 5, 7, 11, 13] {
            assert_eq!(count_by_index(2, p).unwrap(), p as u128 + 1);
            assert_eq!(enumerate_hnf_with_det(2, p).len() as u128, p as u128 + 1);
        }
    }

    #[test]
    fn count_overflow_detected() {
        assert!(matches!(count_sublattices(12, 10_000), Err(Error::Overflow(_))));
        assert!(matches!(count_by_index(40, 1 << 20), Err(Error::Overflow(_))));
    }

    #[test]
    fn short_vector_examples() {
        let r = count_with_short_vector(2, &rat(2), &rat(2)).unwrap();
        assert_eq!(r.count, 7);
        assert_eq!(r.max_index, 4);
        let r = count_with_short_vector(2, &rat(1), &rat(1)).unwrap();
        assert_eq!(r.count, 1);
        let r = count_with_short_vector(2, &rat(3), &rat(3)).unwrap();
        assert!(Rational::from_integer(BigInt::from(r.count)) <= r.bound);
        assert!(count_with_short_vector(2, &rat(1), &ratio(1, 2)).is_err());
        assert!(count_with_short_vector(4, &rat(1), &rat(1)).is_err());
        assert!(matches!(
            count_with_short_vector(2, &rat(100), &rat(1)),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
