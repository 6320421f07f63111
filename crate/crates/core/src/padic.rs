//! Exact p-adic local densities and the global Tamagawa product.
//!
//! Local quantities are exact rationals. Only [`tamagawa_partial`], which
//! multiplies by zeta values, is a float.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{factorize, is_prime, primes_up_to, rat, Rational};
use crate::dirichlet::riemann_zeta;
use crate::error::{Error, Result};
use crate::hnf::HnfMatrix;
use crate::par;
use crate::report::Table;

/// An exact local quantity at the prime `p` for rank `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFactor {
    pub p: u64,
    pub k: usize,
    pub value: Rational,
}

/// Largest prime accepted by [`tamagawa_partial`].
pub const PRIME_LIMIT: u64 = 1_000_000;

/// Largest number of matrices any enumeration here will visit.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::pre(format!("{p} is not prime")))
    }
}

fn check_rank(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::pre("rank must be at least 1"))
    } else {
        Ok(())
    }
}

/// `1 - p^(-j)`.
fn one_minus(p: u64, j: u32) -> Rational {
    let pj = BigInt::from(p).pow(j);
    Rational::new(&pj - 1, pj)
}

/// `mu_p(Gl_k(Z_p)) = (1 - p^-1)(1 - p^-2) ... (1 - p^-k)`.
pub fn gl_density(k: usize, p: u64) -> Result<LocalFactor> {
    check_rank(k)?;
    check_prime(p)?;
    let value = (1..=k as u32).map(|j| one_minus(p, j)).product();
    Ok(LocalFactor { p, k, value })
}

/// `#Gl_k(F_p) = (p^k - 1)(p^k - p) ... (p^k - p^(k-1))`.
pub fn gl_count_modp(k: usize, p: u64) -> Result<BigInt> {
    check_rank(k)?;
    check_prime(p)?;
    let pk = BigInt::from(p).pow(k as u32);
    Ok((0..k as u32).map(|i| &pk - BigInt::from(p).pow(i)).product())
}

/// `mu_p(Sl_k(Z_p)) = (1 - p^-2) ... (1 - p^-k)`.
pub fn sl_density(k: usize, p: u64) -> Result<LocalFactor> {
    check_rank(k)?;
    check_prime(p)?;
    let value = (2..=k as u32).map(|j| one_minus(p, j)).product();
    Ok(LocalFactor { p, k, value })
}

/// Determinant of a small integer matrix by cofactor expansion, reduced mod `m`.
fn det_mod(a: &[i64], k: usize, m: i64) -> i64 {
    fn go(a: &[i64], k: usize, rows: &mut Vec<usize>, col: usize, cols: usize, m: i64) -> i64 {
        if col == cols {
            return 1;
        }
        let mut acc = 0i64;
        let mut sign = 1i64;
        for r in 0..k {
            if rows.contains(&r) {
                continue;
            }
            let x = a[r * k + col];
            if x != 0 {
                rows.push(r);
                let minor = go(a, k, rows, col + 1, cols, m);
                rows.pop();
                acc = (acc + sign * (x * minor % m)) % m;
            }
            sign = -sign;
        }
        acc.rem_euclid(m)
    }
    go(a, k, &mut Vec::with_capacity(k), 0, k, m)
}

/// Counts `k x k` matrices over `Z / m` whose determinant satisfies `pred`.
fn count_matrices<F>(k: usize, m: u64, pred: F) -> Result<u64>
where
    F: Fn(i64) -> bool + Sync,
{
    let cells = (k * k) as u32;
    let total = m.checked_pow(cells).filter(|&t| t <= ENUMERATION_BUDGET);
    let Some(total) = total else {
        return Err(Error::budget(
            "matrix enumeration",
            format!("{m}^{cells}"),
            ENUMERATION_BUDGET,
        ));
    };
    // Split on the first entry so slabs can run in parallel.
    let per_slab = total / m;
    let counts = par::map_range(0, m, |first| {
        let mut a = vec![0i64; k * k];
        a[0] = first as i64;
        let mut hits = 0u64;
        for idx in 0..per_slab {
            let mut rest = idx;
            for cell in a.iter_mut().skip(1) {
                *cell = (rest % m) as i64;
                rest /= m;
            }
            if pred(det_mod(&a, k, m as i64)) {
                hits += 1;
            }
        }
        hits
    });
    Ok(counts.into_iter().sum())
}

/// `#Gl_k(F_p)` by exhaustive enumeration.
pub fn gl_count_enumerated(k: usize, p: u64) -> Result<u64> {
    check_rank(k)?;
    check_prime(p)?;
    count_matrices(k, p, |d| d != 0)
}

/// `#Sl_k(F_p)` by exhaustive enumeration.
pub fn sl_count_enumerated(k: usize, p: u64) -> Result<u64> {
    check_rank(k)?;
    check_prime(p)?;
    count_matrices(k, p, |d| d == 1)
}

/// `sum_J [Z_p^k : J]^(-s) = prod_{i=0}^{k-1} (1 - p^(i-s))^(-1)`, for integer `s > k - 1`.
pub fn local_zeta(k: usize, p: u64, s: i64) -> Result<LocalFactor> {
    check_rank(k)?;
    check_prime(p)?;
    if s <= k as i64 - 1 {
        return Err(Error::pre(format!("local zeta needs s > k - 1 (s = {s}, k = {k})")));
    }
    let value = (0..k as i64)
        .map(|i| one_minus(p, (s - i) as u32).recip())
        .product();
    Ok(LocalFactor { p, k, value })
}

/// `local_zeta(k, p, k) * gl_density(k, p)`, which must equal 1.
pub fn local_tamagawa_check(k: usize, p: u64) -> Result<Rational> {
    let v = local_zeta(k, p, k as i64)?.value * gl_density(k, p)?.value;
    if !v.is_one() {
        return Err(Error::Invariant(format!(
            "local Tamagawa product at p = {p}, k = {k} is {v}, not 1"
        )));
    }
    Ok(v)
}

/// Fraction of `k x k` matrices over `Z / p^n` with determinant `0 mod p^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularDensity {
    pub singular: u64,
    pub total: u64,
    pub density: Rational,
    /// The bound `k p^(-n)`.
    pub bound: Rational,
}

pub fn singular_density(k: usize, p: u64, n: u32) -> Result<SingularDensity> {
    check_rank(k)?;
    check_prime(p)?;
    if n == 0 {
        return Err(Error::pre("level n must be positive"));
    }
    let m = p
        .checked_pow(n)
        .ok_or(Error::budget("matrix enumeration", format!("{p}^{n}"), ENUMERATION_BUDGET))?;
    let singular = count_matrices(k, m, |d| d == 0)?;
    let total = m.pow((k * k) as u32);
    Ok(SingularDensity {
        singular,
        total,
        density: Rational::new(singular.into(), total.into()),
        bound: Rational::new((k as u64).into(), m.into()),
    })
}

/// `[Z^k : H] = prod_p [Z_p^k : H_p]`: the p-part of the index for each prime.
pub fn index_local_factors(h: &HnfMatrix) -> BTreeMap<u64, u64> {
    factorize(h.det())
        .into_iter()
        .map(|(p, e)| (p, p.pow(e)))
        .collect()
}

fn product_tree(mut xs: Vec<BigInt>) -> BigInt {
    if xs.is_empty() {
        return BigInt::one();
    }
    while xs.len() > 1 {
        let pairs: Vec<&[BigInt]> = xs.chunks(2).collect();
        xs = par::map(&pairs, |c| if c.len() == 2 { &c[0] * &c[1] } else { c[0].clone() });
    }
    xs.pop().expect("one element left")
}

/// `num / den` as f64 without forming the reduced fraction.
fn quotient_f64(num: &BigInt, den: &BigInt) -> f64 {
    let shift = num.bits() as i64 - den.bits() as i64;
    // Keep about 64 significant bits in the integer quotient.
    let s = 64 - shift;
    let q = if s >= 0 {
        (num << s as u64) / den
    } else {
        num / (den << (-s) as u64)
    };
    q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-s as i32)
}

/// `prod_{p <= P} (1 - p^-j)` exactly, as (numerator, denominator), unreduced.
fn euler_partial(primes: &[u64], j: u32) -> (BigInt, BigInt) {
    let nums = par::map(primes, |&p| BigInt::from(p).pow(j) - 1);
    let dens = par::map(primes, |&p| BigInt::from(p).pow(j));
    (product_tree(nums), product_tree(dens))
}

fn check_tamagawa_args(k: usize, cutoff: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::pre("rank must be at least 2"));
    }
    if cutoff < 2 {
        return Err(Error::pre("prime cutoff must be at least 2"));
    }
    if cutoff > PRIME_LIMIT {
        return Err(Error::budget("prime sieve", cutoff, PRIME_LIMIT));
    }
    Ok(())
}

/// `k mu_inf(Sl_k R / Sl_k Z) prod_{p <= P} mu_p(Sl_k Z_p)
///  = prod_{j=2}^k zeta(j) prod_{p <= P} (1 - p^-j)`.
///
/// The Euler factors are multiplied exactly and converted once.
pub fn tamagawa_partial(k: usize, cutoff: u64) -> Result<f64> {
    check_tamagawa_args(k, cutoff)?;
    let primes = primes_up_to(cutoff);
    let mut acc = 1.0;
    for j in 2..=k as u32 {
        let (num, den) = euler_partial(&primes, j);
        acc *= riemann_zeta(j as f64)? * quotient_f64(&num, &den);
    }
    Ok(acc)
}

/// Rows `(p, sl_density(k, p), running product)`. The running product is
/// accumulated in floating point; its last entry matches [`tamagawa_partial`]
/// to about `1e-12`.
pub fn tamagawa_table(k: usize, cutoff: u64) -> Result<Table> {
    check_tamagawa_args(k, cutoff)?;
    let mut t = Table::new("tamagawa", &["p", "factor", "partial_product"])
        .param("k", k)
        .param("cutoff", cutoff);
    let mut running = (2..=k).try_fold(1.0, |a, j| Ok::<_, Error>(a * riemann_zeta(j as f64)?))?;
    for p in primes_up_to(cutoff) {
        let f = sl_density(k, p)?.value;
        running *= crate::arith::to_f64(&f);
        t.push(vec![p.into(), f.into(), running.into()]);
    }
    Ok(t)
}

/// `sum_{m <= levels} c_k(p^m) p^(-ms)`, with `c_k` counted from HNF enumeration.
pub fn local_zeta_partial(k: usize, p: u64, s: i64, levels: u32) -> Result<Rational> {
    check_rank(k)?;
    check_prime(p)?;
    let mut acc = Rational::zero();
    for m in 0..=levels {
        let index = p.checked_pow(m).ok_or(Error::Overflow("prime power"))?;
        let c = crate::hnf::enumerate_hnf_with_det(k, index).len() as i64;
        let w = Rational::new(BigInt::one(), BigInt::from(index).pow(s as u32));
        acc += rat(c) * w;
    }
    Ok(acc)
}
