//! Dirichlet series with nonnegative coefficients, and zeta values.
//!
//! Series are finite prefixes `a_1..a_N`; every operation that would need
//! coefficients past `N` fails instead of truncating. Zeta values come from
//! Euler–Maclaurin summation with a fixed cutoff and order, accurate to
//! about `1e-13` absolute for `s` in `[1.001, 50]`.

use std::io::Read;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{parse_rational, rat, to_f64, Rational};
use crate::error::{Error, Result};
use crate::par;
use crate::report::Table;

/// `a_1..a_N` with optional weights `lambda_n` (default `lambda_n = n`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletSeries {
    coeffs: Vec<Rational>,
    weights: Option<Vec<Rational>>,
}

impl DirichletSeries {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if let Some(n) = coeffs.iter().position(|a| a.is_negative()) {
            return Err(Error::pre(format!("coefficient a_{} is negative", n + 1)));
        }
        Ok(DirichletSeries {
            coeffs,
            weights: None,
        })
    }

    /// A generalized series `sum a_n lambda_n^(-s)`.
    pub fn with_weights(coeffs: Vec<Rational>, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != coeffs.len() {
            return Err(Error::pre("one weight per coefficient"));
        }
        if weights.first().is_some_and(|w| *w < rat(1)) {
            return Err(Error::pre("weights must start at 1 or above"));
        }
        if weights.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::pre("weights must be nondecreasing"));
        }
        let mut s = Self::new(coeffs)?;
        s.weights = Some(weights);
        Ok(s)
    }

    pub fn from_integers(coeffs: impl IntoIterator<Item = u64>) -> Self {
        Self::new(coeffs.into_iter().map(|a| Rational::from_integer(a.into())).collect())
            .expect("unsigned coefficients")
    }

    /// Coefficients of `zeta(s - j)`: `a_n = n^j`.
    pub fn shifted_zeta(j: u32, len: usize) -> Self {
        Self::new(
            (1..=len as u64)
                .map(|n| Rational::from_integer(BigInt::from(n).pow(j)))
                .collect(),
        )
        .expect("positive")
    }

    pub fn zeta(len: usize) -> Self {
        Self::shifted_zeta(0, len)
    }

    /// The unit for convolution: `a_1 = 1`, all others 0.
    pub fn delta(len: usize) -> Self {
        Self::from_integers((1..=len as u64).map(|n| u64::from(n == 1)))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `a_n`, 1-based.
    pub fn coeff(&self, n: usize) -> Option<&Rational> {
        n.checked_sub(1).and_then(|i| self.coeffs.get(i))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn weight(&self, n: usize) -> Rational {
        match &self.weights {
            Some(w) => w[n - 1].clone(),
            None => rat(n as i64),
        }
    }

    pub fn is_ordinary(&self) -> bool {
        self.weights.is_none()
    }

    /// `A(T) = sum of a_n over lambda_n <= T`. Fails if `T` reaches past the prefix.
    pub fn summatory(&self, t: &Rational) -> Result<Rational> {
        let n = self.len();
        if n == 0 || *t > self.weight(n) {
            return Err(Error::pre(format!(
                "threshold {t} lies beyond the stored prefix of length {n}"
            )));
        }
        let mut acc = Rational::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            if self.weight(i + 1) > *t {
                break;
            }
            acc += a;
        }
        Ok(acc)
    }

    /// `A(T_i)` for increasing thresholds.
    pub fn summatory_table(&self, thresholds: &[Rational]) -> Result<Vec<(Rational, Rational)>> {
        if thresholds.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::pre("thresholds must increase"));
        }
        thresholds
            .iter()
            .map(|t| Ok((t.clone(), self.summatory(t)?)))
            .collect()
    }

    /// Dirichlet convolution, first `len` coefficients.
    pub fn convolve(&self, other: &DirichletSeries, len: usize) -> Result<DirichletSeries> {
        if !self.is_ordinary() || !other.is_ordinary() {
            return Err(Error::pre("convolution needs ordinary series"));
        }
        if self.len() < len || other.len() < len {
            return Err(Error::pre(format!(
                "convolution to length {len} needs both prefixes that long"
            )));
        }
        let coeffs = par::map_range(1, len as u64 + 1, |n| {
            let mut c = Rational::zero();
            let mut d = 1u64;
            while d * d <= n {
                if n % d == 0 {
                    let e = n / d;
                    c += &self.coeffs[d as usize - 1] * &other.coeffs[e as usize - 1];
                    if e != d {
                        c += &self.coeffs[e as usize - 1] * &other.coeffs[d as usize - 1];
                    }
                }
                d += 1;
            }
            c
        });
        DirichletSeries::new(coeffs)
    }

    /// `sum_{from <= n <= to} a_n lambda_n^(-s)` in floating point.
    pub fn partial_sum(&self, s: f64, from: usize, to: usize) -> Result<f64> {
        if from == 0 || to > self.len() {
            return Err(Error::pre("range must lie within the stored prefix"));
        }
        let mut acc = Neumaier::default();
        for n in from..=to {
            acc.add(to_f64(&self.coeffs[n - 1]) * to_f64(&self.weight(n)).powf(-s));
        }
        Ok(acc.sum())
    }

    /// Reads a two-column CSV `n,a_n` with `n = 1, 2, ...` in order.
    pub fn from_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let mut coeffs = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() != 2 {
                return Err(Error::Parse(format!("row {} must have two fields", i + 1)));
            }
            let n: usize = rec[0]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad index {:?}", &rec[0])))?;
            if n != i + 1 {
                return Err(Error::Parse(format!("expected n = {}, found {n}", i + 1)));
            }
            coeffs.push(parse_rational(&rec[1])?);
        }
        Self::new(coeffs)
    }
}

/// Compensated summation.
#[derive(Default, Clone, Copy, Debug)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

// B_2, B_4, ..., B_26.
const BERNOULLI: [(f64, f64); 13] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
];

const EM_CUTOFF: u32 = 30;
const EM_ORDER: usize = 12;

/// A zeta value with a bound on the Euler–Maclaurin remainder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaValue {
    pub value: f64,
    /// Magnitude of the first omitted correction term, which bounds the
    /// remainder for real `s > 1`.
    pub remainder_bound: f64,
}

/// Hurwitz zeta `sum_{n >= 0} (n + q)^(-s)` for real `s > 1`, `q > 0`.
pub fn hurwitz_zeta_with_bound(s: f64, q: f64) -> Result<ZetaValue> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::pre(format!("zeta needs s > 1 (got {s})")));
    }
    if !(q > 0.0) {
        return Err(Error::pre(format!("Hurwitz shift must be positive (got {q})")));
    }
    let mut acc = Neumaier::default();
    for n in 0..EM_CUTOFF {
        acc.add((n as f64 + q).powf(-s));
    }
    let x = EM_CUTOFF as f64 + q;
    let xs = x.powf(-s);
    acc.add(x * xs / (s - 1.0));
    acc.add(0.5 * xs);
    // Terms B_2j / (2j)! * s (s+1) ... (s+2j-2) * x^(-s-2j+1).
    let mut rising = s; // s (s+1) ... (s+2j-2)
    let mut fact = 2.0; // (2j)!
    let mut pow = xs / x; // x^(-s-2j+1)
    let mut next = 0.0;
    for (j, &(bn, bd)) in BERNOULLI.iter().enumerate() {
        let term = bn / bd / fact * rising * pow;
        if j < EM_ORDER {
            acc.add(term);
        } else {
            next = term.abs();
        }
        let m = 2.0 * (j as f64 + 1.0);
        rising *= (s + m - 1.0) * (s + m);
        fact *= (m + 1.0) * (m + 2.0);
        pow /= x * x;
    }
    Ok(ZetaValue {
        value: acc.sum(),
        remainder_bound: next,
    })
}

pub fn hurwitz_zeta(s: f64, q: f64) -> Result<f64> {
    Ok(hurwitz_zeta_with_bound(s, q)?.value)
}

pub fn riemann_zeta_with_bound(s: f64) -> Result<ZetaValue> {
    hurwitz_zeta_with_bound(s, 1.0)
}

pub fn riemann_zeta(s: f64) -> Result<f64> {
    hurwitz_zeta(s, 1.0)
}

/// `zeta(s) zeta(s-1) ... zeta(s-k+1)`, the generating function of
/// sublattice counts of `Z^k`. Needs `s > k`.
pub fn subgroup_zeta(k: usize, s: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::pre("rank must be at least 1"));
    }
    if !(s > k as f64) {
        return Err(Error::pre(format!("series diverges for s <= k (s = {s}, k = {k})")));
    }
    (0..k).try_fold(1.0, |acc, i| Ok(acc * riemann_zeta(s - i as f64)?))
}

/// `zeta(2) zeta(3) ... zeta(k) / k`; 1 for `k = 1`.
pub fn volume_constant(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::pre("rank must be at least 1"));
    }
    let p = (2..=k).try_fold(1.0, |acc, j| Ok::<_, Error>(acc * riemann_zeta(j as f64)?))?;
    Ok(p / k as f64)
}

/// `sigma(n)` for `n <= limit` by sieve (index 0 unused).
pub fn sigma_sieve(limit: usize) -> Vec<u64> {
    let mut s = vec![0u64; limit + 1];
    for d in 1..=limit {
        for m in (d..=limit).step_by(d) {
            s[m] += d as u64;
        }
    }
    s
}

/// `sum_{n <= T} sigma(n)` via `sum_{d <= T} d * floor(T/d)`, grouped over
/// blocks where `floor(T/d)` is constant.
pub fn sigma_summatory(t: u64) -> u128 {
    let mut acc = 0u128;
    let mut d = 1u64;
    while d <= t {
        let q = t / d;
        let hi = t / q;
        let block = (hi as u128 * (hi as u128 + 1) - (d as u128 - 1) * d as u128) / 2;
        acc += block * q as u128;
        d = hi + 1;
    }
    acc
}

/// Error of `sum_{n <= T} sigma(n)` against its main term `zeta(2) T^2 / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductErrorRow {
    pub t: u64,
    pub summatory: u128,
    pub error: f64,
    /// `error / (T (1 + log T))`.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductErrorTable {
    pub rows: Vec<ProductErrorRow>,
    /// Supremum of `|normalized|` over every `T` from 1 to the largest requested.
    pub sup_normalized: f64,
    pub sup_at: u64,
}

fn product_error_row(t: u64, summatory: u128, half_zeta2: f64) -> ProductErrorRow {
    let tf = t as f64;
    let error = summatory as f64 - half_zeta2 * tf * tf;
    ProductErrorRow {
        t,
        summatory,
        error,
        normalized: error / (tf * (1.0 + tf.ln())),
    }
}

/// Error table for `zeta(s) * zeta(s-1)`, whose coefficients are `sigma(n)`.
/// Every `T` up to the largest requested is scanned for the supremum.
pub fn product_error_table(t_list: &[u64]) -> Result<ProductErrorTable> {
    if t_list.contains(&0) {
        return Err(Error::pre("thresholds must be positive"));
    }
    let max = t_list.iter().copied().max().unwrap_or(0);
    if max > 10_000_000 {
        return Err(Error::budget("sigma sieve", max, 10_000_000u64));
    }
    let half_zeta2 = riemann_zeta(2.0)? / 2.0;
    let sigma = sigma_sieve(max as usize);
    let mut prefix = 0u128;
    let mut sup = (0.0f64, 0u64);
    for t in 1..=max {
        prefix += sigma[t as usize] as u128;
        let row = product_error_row(t, prefix, half_zeta2);
        if row.normalized.abs() > sup.0 {
            sup = (row.normalized.abs(), t);
        }
    }
    let rows = t_list
        .iter()
        .map(|&t| product_error_row(t, sigma_summatory(t), half_zeta2))
        .collect();
    Ok(ProductErrorTable {
        rows,
        sup_normalized: sup.0,
        sup_at: sup.1,
    })
}

impl ProductErrorTable {
    pub fn table(&self) -> Table {
        let mut t = Table::new("dirichlet-product", &["T", "summatory", "error", "normalized"])
            .param("sup_normalized", crate::report::format_float(self.sup_normalized))
            .param("sup_at", self.sup_at);
        for r in &self.rows {
            t.push(vec![r.t.into(), r.summatory.into(), r.error.into(), r.normalized.into()]);
        }
        t
    }
}

/// Series whose behaviour at the right end of convergence is probed.
#[derive(Clone, Debug, PartialEq)]
pub enum PsiSeries {
    /// `zeta(Z^k, s)`, pole at `s = k` with residue `zeta(2) ... zeta(k)`.
    SubgroupZeta(usize),
    /// `sum_n (n + 1/2)^(-s)`: weights `lambda_n = n + 1/2`, pole at 1, residue 1.
    HalfShifted,
    /// All coefficients zero.
    Zero,
}

impl PsiSeries {
    pub fn pole(&self) -> f64 {
        match self {
            PsiSeries::SubgroupZeta(k) => *k as f64,
            PsiSeries::HalfShifted | PsiSeries::Zero => 1.0,
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s > self.pole()) {
            return Err(Error::pre(format!(
                "s = {s} lies outside the convergence region s > {}",
                self.pole()
            )));
        }
        match self {
            PsiSeries::SubgroupZeta(k) => subgroup_zeta(*k, s),
            PsiSeries::HalfShifted => hurwitz_zeta(s, 1.5),
            PsiSeries::Zero => Ok(0.0),
        }
    }

    /// The limit of `(s - pole) psi(s)` as `s` decreases to the pole.
    pub fn residue(&self) -> Result<f64> {
        match self {
            PsiSeries::SubgroupZeta(k) => Ok(volume_constant(*k)? * *k as f64),
            PsiSeries::HalfShifted => Ok(1.0),
            PsiSeries::Zero => Ok(0.0),
        }
    }
}

/// Rows `(s, (s - pole) psi(s))` for the given `s` values.
pub fn abelian_limit(psi: &PsiSeries, s_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    let k = psi.pole();
    s_list
        .iter()
        .map(|&s| Ok((s, (s - k) * psi.eval(s)?)))
        .collect()
}

pub fn abelian_table(psi: &PsiSeries, s_list: &[f64]) -> Result<Table> {
    let residue = psi.residue()?;
    let mut t = Table::new("abelian", &["s", "scaled", "residue", "error"])
        .param("pole", psi.pole());
    for (s, v) in abelian_limit(psi, s_list)? {
        t.push(vec![s.into(), v.into(), residue.into(), (v - residue).into()]);
    }
    Ok(t)
}

/// `sum_{from <= n <= to} a_n n^(-s)` for exact integer coefficients, as f64.
pub fn tail_sum(coeffs: &[u64], s: f64, from: usize, to: usize) -> Result<f64> {
    if from == 0 || to >= coeffs.len() {
        return Err(Error::pre("tail range must lie within the coefficients"));
    }
    let mut acc = Neumaier::default();
    for (n, &a) in coeffs.iter().enumerate().take(to + 1).skip(from) {
        acc.add(a as f64 * (n as f64).powf(-s));
    }
    Ok(acc.sum())
}

/// Exact rational coefficient as u64 when integral.
pub fn integer_coeff(q: &Rational) -> Option<u64> {
    q.is_integer().then(|| q.to_integer().to_u64()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summatory_examples() {
        assert_eq!(DirichletSeries::zeta(10).summatory(&rat(10)).unwrap(), rat(10));
        let sigma = DirichletSeries::from_integers(sigma_sieve(10)[1..].iter().copied());
        assert_eq!(sigma.summatory(&rat(10)).unwrap(), rat(87));
        let id = DirichletSeries::shifted_zeta(1, 10);
        assert_eq!(id.summatory(&rat(10)).unwrap(), rat(55));
        assert!(id.summatory(&rat(11)).is_err());
        assert_eq!(id.summatory(&crate::arith::ratio(19, 2)).unwrap(), rat(45));
    }

    #[test]
    fn convolution_examples() {
        let z = DirichletSeries::zeta(12);
        let c = z.convolve(&z, 12).unwrap();
        assert_eq!(c.coeff(12), Some(&rat(6)));
        let s = z.convolve(&DirichletSeries::shifted_zeta(1, 12), 12).unwrap();
        assert_eq!(s.coeff(6), Some(&rat(12)));
        let f = DirichletSeries::shifted_zeta(2, 12);
        assert_eq!(f.convolve(&DirichletSeries::delta(12), 12).unwrap(), f);
        assert!(z.convolve(&z, 13).is_err());
    }

    #[test]
    fn validation() {
        assert!(DirichletSeries::new(vec![rat(1), rat(-1)]).is_err());
        assert!(DirichletSeries::with_weights(vec![rat(1), rat(1)], vec![rat(2), rat(1)]).is_err());
        assert!(DirichletSeries::with_weights(vec![rat(1)], vec![crate::arith::ratio(1, 2)]).is_err());
    }

    #[test]
    fn zeta_values() {
        let pi = std::f64::consts::PI;
        assert!((riemann_zeta(2.0).unwrap() - pi * pi / 6.0).abs() < 1e-13);
        assert!((riemann_zeta(4.0).unwrap() - pi.powi(4) / 90.0).abs() < 1e-13);
        assert!(riemann_zeta(30.0).unwrap() - 1.0 - 2f64.powi(-30) < 1e-14);
        assert!(riemann_zeta(1.0).is_err());
        assert!(riemann_zeta(0.5).is_err());
        let b = riemann_zeta_with_bound(1.001).unwrap();
        assert!(b.remainder_bound < 1e-20);
    }

    #[test]
    fn constants() {
        assert_eq!(volume_constant(1).unwrap(), 1.0);
        assert!((volume_constant(2).unwrap() - 0.8224670334241132).abs() < 1e-13);
        // 30-digit reference values.
        assert!((volume_constant(3).unwrap() - 0.659101450099098706).abs() < 1e-13);
        assert!((subgroup_zeta(2, 3.0).unwrap() - 1.977304350297296118).abs() < 1e-12);
        assert!(subgroup_zeta(2, 2.0).is_err());
    }

    #[test]
    fn sigma_paths_agree() {
        let s = sigma_sieve(1000);
        let mut acc = 0u128;
        for t in 1..=1000u64 {
            acc += s[t as usize] as u128;
            assert_eq!(sigma_summatory(t), acc);
        }
    }

    #[test]
    fn abelian_examples() {
        let v = abelian_limit(&PsiSeries::SubgroupZeta(1), &[1.01]).unwrap();
        assert!((v[0].1 - 1.0058).abs() < 1e-4);
        let v = abelian_limit(&PsiSeries::Zero, &[1.5, 1.1]).unwrap();
        assert!(v.iter().all(|r| r.1 == 0.0));
        let v = abelian_limit(&PsiSeries::HalfShifted, &[1.0001]).unwrap();
        assert!((v[0].1 - 1.0).abs() < 1e-3);
        assert!(abelian_limit(&PsiSeries::SubgroupZeta(2), &[2.0]).is_err());
    }

    #[test]
    fn csv_import() {
        let s = DirichletSeries::from_csv("n,a\n1,1\n2,3/2\n3,0\n".as_bytes()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.coeff(2), Some(&crate::arith::ratio(3, 2)));
        assert!(DirichletSeries::from_csv("n,a\n2,1\n".as_bytes()).is_err());
        assert!(DirichletSeries::from_csv("n,a\n1,-1\n".as_bytes()).is_err());
    }
}
