//! Small exact-arithmetic helpers: rationals, integer roots, primes, power sums.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_big(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

/// Parses "a/b", "a" or a finite decimal such as "2.5" into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let mag = int_part.abs() * &scale + frac_part;
        let num = if neg { -mag } else { mag };
        return Ok(Rational::new(num, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Formats as "a/b", always with an explicit denominator.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// floor(sqrt(n)) for n >= 0.
pub fn isqrt_big(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative number");
    n.sqrt()
}

pub fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

/// Exact floor(n^(1/k)) for n >= 0.
pub fn iroot_u64(n: u64, k: u32) -> u64 {
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    let pow = |x: u64| (x as u128).checked_pow(k).unwrap_or(u128::MAX);
    while r > 0 && pow(r) > n as u128 {
        r -= 1;
    }
    while pow(r + 1) <= n as u128 {
        r += 1;
    }
    r
}

/// A rational lower bound for sqrt(q) with absolute error below 2^-bits.
pub fn sqrt_lower(q: &Rational, bits: u32) -> Rational {
    assert!(!q.is_negative());
    let scale = BigInt::one() << bits;
    let scaled = (q * Rational::from_integer(&scale * &scale)).floor().to_integer();
    Rational::new(isqrt_big(&scaled), scale)
}

/// A rational upper bound for sqrt(q) with absolute error below 2^-bits.
pub fn sqrt_upper(q: &Rational, bits: u32) -> Rational {
    let lo = sqrt_lower(q, bits);
    if &lo * &lo == *q {
        lo
    } else {
        lo + Rational::new(BigInt::one(), BigInt::one() << bits)
    }
}

pub fn floor_big(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

pub fn ceil_big(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Sieve of Eratosthenes: all primes <= limit.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Trial-division factorization, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of n in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

fn binomial_table(n: usize) -> Vec<Vec<u128>> {
    let mut c = vec![vec![0u128; n + 1]; n + 1];
    for i in 0..=n {
        c[i][0] = 1;
        for j in 1..=i {
            c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
        }
    }
    c
}

/// Power sums `S_e(m) = 1^e + ... + m^e` for e = 0..=max_exp, via the
/// binomial recurrence `(e+1) S_e = (m+1)^(e+1) - 1 - sum_{j<e} C(e+1,j) S_j`.
pub fn power_sums(m: u64, max_exp: u32) -> Result<Vec<u128>> {
    let of = || Error::Overflow("power sum");
    let c = binomial_table(max_exp as usize + 1);
    let mut sums: Vec<u128> = Vec::with_capacity(max_exp as usize + 1);
    let m1 = m as u128 + 1;
    for e in 0..=max_exp as usize {
        let mut acc = m1.checked_pow(e as u32 + 1).ok_or_else(of)? - 1;
        for (j, s) in sums.iter().enumerate() {
            let term = c[e + 1][j].checked_mul(*s).ok_or_else(of)?;
            acc = acc.checked_sub(term).ok_or_else(of)?;
        }
        debug_assert_eq!(acc % (e as u128 + 1), 0);
        sums.push(acc / (e as u128 + 1));
    }
    Ok(sums)
}

pub fn checked_pow_u128(base: u64, exp: u32) -> Result<u128> {
    (base as u128)
        .checked_pow(exp)
        .ok_or(Error::Overflow("integer power"))
}
