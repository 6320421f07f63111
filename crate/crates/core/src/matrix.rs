//! Square integer matrices with overflow-checked arithmetic.

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// A square integer matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::pre("matrix must have at least one row"));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::pre("matrix must be square"));
        }
        Ok(IntMatrix {
            n,
            data: rows.concat(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1)
    }

    pub fn scalar(n: usize, c: i64) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = c;
        }
        IntMatrix { n, data }
    }

    pub fn from_columns(cols: &[Vec<i64>]) -> Result<Self> {
        let n = cols.len();
        let mut m = Self::scalar(n.max(1), 0);
        if n == 0 || cols.iter().any(|c| c.len() != n) {
            return Err(Error::pre("column list must form a square matrix"));
        }
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    /// Parses "a,b;c,d" (rows separated by semicolons).
    pub fn parse(s: &str) -> Result<Self> {
        let rows: Vec<Vec<i64>> = s
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<i64>()
                            .map_err(|_| Error::Parse(format!("bad matrix entry {x:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Self::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.n + j] = v;
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[i64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.n != other.n {
            return Err(Error::pre("dimension mismatch in matrix product"));
        }
        let n = self.n;
        let mut out = Self::scalar(n, 0);
        for i in 0..n {
            for j in 0..n {
                let mut acc: i128 = 0;
                for l in 0..n {
                    acc += self.get(i, l) as i128 * other.get(l, j) as i128;
                }
                out.set(i, j, narrow(acc)?);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        (0..self.n)
            .map(|i| {
                let acc: i128 = (0..self.n)
                    .map(|j| self.get(i, j) as i128 * v[j] as i128)
                    .sum();
                narrow(acc)
            })
            .collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        let mut a: Vec<Vec<BigInt>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        det_bareiss(&mut a, n)
    }

    pub fn det_i64(&self) -> Result<i64> {
        i64::try_from(self.det()).map_err(|_| Error::Overflow("determinant"))
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> i128 {
        self.data.iter().map(|&x| x as i128 * x as i128).sum()
    }

    pub fn trace(&self) -> i128 {
        (0..self.n).map(|i| self.get(i, i) as i128).sum()
    }

    pub fn negate_column(&mut self, j: usize) {
        for i in 0..self.n {
            let v = self.get(i, j);
            self.set(i, j, -v);
        }
    }

    /// Compact "a,b;c,d" form, the inverse of [`IntMatrix::parse`].
    pub fn to_compact(&self) -> String {
        self.rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }
}

pub(crate) fn narrow(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow("matrix entry"))
}

pub(crate) fn det_bareiss(a: &mut [Vec<BigInt>], n: usize) -> BigInt {
    use num_traits::{One, Zero};
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_compact())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}
