//! Exact lattice arithmetic over the rationals.
//!
//! A [`LatticeBasis`] is a list of linearly independent rational vectors in
//! some ambient space with the standard inner product. Everything here is
//! exact: lengths, covolumes and the `alpha_i` of the greedy basis are kept
//! as squared rationals, and square roots only appear in display helpers.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{floor_big, rat, ratio, to_f64, Rational};
use crate::error::{Error, Result};

/// A rank-`r` lattice in rational `n`-space, `r <= n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBasis {
    vectors: Vec<Vec<Rational>>,
    gram: Vec<Vec<Rational>>,
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[Rational]) -> Rational {
    dot(a, a)
}

fn axpy(y: &mut [Rational], a: &Rational, x: &[Rational]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Gram–Schmidt data of a Gram matrix: `mu[i][j]` (j < i) and squared
/// lengths `b[i]` of the orthogonalized vectors.
#[derive(Clone, Debug)]
pub(crate) struct GramSchmidt {
    mu: Vec<Vec<Rational>>,
    b: Vec<Rational>,
}

impl GramSchmidt {
    /// Fails with `Singular` unless the Gram matrix is positive definite.
    pub(crate) fn new(gram: &[Vec<Rational>]) -> Result<Self> {
        let r = gram.len();
        let mut mu = vec![vec![Rational::zero(); r]; r];
        let mut b: Vec<Rational> = Vec::with_capacity(r);
        for i in 0..r {
            for j in 0..i {
                let mut v = gram[i][j].clone();
                for l in 0..j {
                    v -= &mu[j][l] * &mu[i][l] * &b[l];
                }
                mu[i][j] = v / &b[j];
            }
            let mut bi = gram[i][i].clone();
            for l in 0..i {
                bi -= &mu[i][l] * &mu[i][l] * &b[l];
            }
            if !bi.is_positive() {
                return Err(Error::Singular(
                    "Gram matrix is not positive definite".into(),
                ));
            }
            b.push(bi);
        }
        Ok(GramSchmidt { mu, b })
    }

    pub(crate) fn det(&self) -> Rational {
        self.b.iter().fold(Rational::one(), |acc, x| acc * x)
    }
}

/// Visits every nonzero integer vector `x` with `x^T G x <= bound`, where the
/// Gram–Schmidt data describes `G`. The visitor returns `false` to stop.
/// Returns `false` if stopped early.
pub(crate) fn enumerate_short<F>(gs: &GramSchmidt, bound: &Rational, mut visit: F) -> bool
where
    F: FnMut(&[i64], &Rational) -> bool,
{
    let r = gs.b.len();
    if r == 0 || bound.is_negative() {
        return true;
    }
    let mut x = vec![0i64; r];
    enumerate_level(gs, bound, r - 1, &mut x, &Rational::zero(), &mut visit)
}

fn enumerate_level<F>(
    gs: &GramSchmidt,
    bound: &Rational,
    i: usize,
    x: &mut [i64],
    partial: &Rational,
    visit: &mut F,
) -> bool
where
    F: FnMut(&[i64], &Rational) -> bool,
{
    let r = x.len();
    let mut c = Rational::zero();
    for j in i + 1..r {
        if x[j] != 0 {
            c += &gs.mu[j][i] * rat(x[j]);
        }
    }
    let rem = bound - partial;
    if rem.is_negative() {
        return true;
    }
    let bi = &gs.b[i];
    let fits = |xi: i64| -> bool {
        let t = rat(xi) + &c;
        bi * &t * &t <= rem
    };
    // Float estimate of the admissible interval, then exact correction at both ends.
    let cf = to_f64(&c);
    let rad = (to_f64(&rem) / to_f64(bi)).max(0.0).sqrt();
    let mut lo = (-cf - rad).floor() as i64;
    let mut hi = (-cf + rad).ceil() as i64;
    while fits(lo - 1) {
        lo -= 1;
    }
    while lo <= hi && !fits(lo) {
        lo += 1;
    }
    while fits(hi + 1) {
        hi += 1;
    }
    while hi >= lo && !fits(hi) {
        hi -= 1;
    }
    for xi in lo..=hi {
        x[i] = xi;
        let t = rat(xi) + &c;
        let p = partial + bi * &t * &t;
        if i == 0 {
            if x.iter().any(|&v| v != 0) && !visit(x, &p) {
                x[i] = 0;
                return false;
            }
        } else if !enumerate_level(gs, bound, i - 1, x, &p, visit) {
            x[i] = 0;
            return false;
        }
    }
    x[i] = 0;
    true
}

/// Result of [`LatticeBasis::shortest_vector`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortVector {
    /// Ambient coordinates.
    pub vector: Vec<Rational>,
    /// Coordinates with respect to the basis.
    pub coefficients: Vec<i64>,
    pub norm_sq: Rational,
}

/// Output of the greedy economical-basis procedure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyBasis {
    pub vectors: Vec<Vec<Rational>>,
    /// `alpha_i^2 = covol(L_i / L_{i-1})^2`.
    pub alpha_sq: Vec<Rational>,
}

impl GreedyBasis {
    pub fn alphas(&self) -> Vec<f64> {
        self.alpha_sq.iter().map(|a| to_f64(a).sqrt()).collect()
    }

    /// Sum of squared lengths of the greedy vectors.
    pub fn norm_sum_sq(&self) -> Rational {
        self.vectors.iter().map(|v| norm_sq(v)).sum()
    }
}

/// `L / Zv` realized inside `v`'s orthogonal complement, plus the data needed
/// to lift its elements back to `L`.
#[derive(Clone, Debug)]
struct QuotientData {
    v: Vec<Rational>,
    /// Lattice vectors completing `v` to a basis of `L`.
    complement: Vec<Vec<Rational>>,
    projected: LatticeBasis,
}

fn to_rational_vec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

fn lex_cmp(a: &[Rational], b: &[Rational]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn canonical_sign(v: &mut [Rational]) {
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

impl LatticeBasis {
    pub fn new(vectors: Vec<Vec<Rational>>) -> Result<Self> {
        let r = vectors.len();
        if r == 0 {
            return Err(Error::pre("a lattice needs at least one basis vector"));
        }
        let n = vectors[0].len();
        if vectors.iter().any(|v| v.len() != n) {
            return Err(Error::pre("basis vectors must share one ambient dimension"));
        }
        if r > n {
            return Err(Error::Singular(format!(
                "{r} vectors in dimension {n} cannot be independent"
            )));
        }
        let gram: Vec<Vec<Rational>> = (0..r)
            .map(|i| (0..r).map(|j| dot(&vectors[i], &vectors[j])).collect())
            .collect();
        GramSchmidt::new(&gram)?;
        Ok(LatticeBasis { vectors, gram })
    }

    /// Each inner slice is one basis vector.
    pub fn from_integer_vectors(vectors: &[Vec<i64>]) -> Result<Self> {
        Self::new(vectors.iter().map(|v| to_rational_vec(v)).collect())
    }

    /// The lattice spanned by the columns of an integer matrix.
    pub fn from_matrix_columns(m: &crate::matrix::IntMatrix) -> Result<Self> {
        Self::from_integer_vectors(&m.columns())
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    pub fn gram(&self) -> &[Vec<Rational>] {
        &self.gram
    }

    fn gs(&self) -> GramSchmidt {
        GramSchmidt::new(&self.gram).expect("validated at construction")
    }

    /// The lattice `cL`.
    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        Self::new(
            self.vectors
                .iter()
                .map(|v| v.iter().map(|x| x * c).collect())
                .collect(),
        )
    }

    /// Squared covolume, `det(gram)`.
    pub fn covol_sq(&self) -> Rational {
        self.gs().det()
    }

    pub fn combination(&self, coeffs: &[i64]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.ambient_dim()];
        for (c, v) in coeffs.iter().zip(&self.vectors) {
            if *c != 0 {
                axpy(&mut out, &rat(*c), v);
            }
        }
        out
    }

    /// Rational coordinates of `x` in this basis, or `None` if `x` is outside the span.
    pub fn span_coordinates(&self, x: &[Rational]) -> Option<Vec<Rational>> {
        if x.len() != self.ambient_dim() {
            return None;
        }
        let rhs: Vec<Rational> = self.vectors.iter().map(|b| dot(b, x)).collect();
        let c = solve(&self.gram, &rhs)?;
        let mut back = vec![Rational::zero(); self.ambient_dim()];
        for (ci, b) in c.iter().zip(&self.vectors) {
            axpy(&mut back, ci, b);
        }
        (back == x).then_some(c)
    }

    /// Integer coordinates of a lattice vector.
    pub fn lattice_coordinates(&self, x: &[Rational]) -> Result<Vec<i64>> {
        let c = self.span_coordinates(x).ok_or(Error::NotInLattice)?;
        c.iter()
            .map(|ci| {
                if ci.is_integer() {
                    ci.to_integer().to_i64().ok_or(Error::Overflow("lattice coordinate"))
                } else {
                    Err(Error::NotInLattice)
                }
            })
            .collect()
    }

    /// Whether some nonzero lattice vector has squared length `<= bound`.
    pub fn has_vector_within(&self, bound: &Rational) -> bool {
        let mut found = false;
        enumerate_short(&self.gs(), bound, |_, _| {
            found = true;
            false
        });
        found
    }

    /// All nonzero coefficient vectors with squared length `<= bound`.
    pub fn vectors_within(&self, bound: &Rational) -> Vec<(Vec<i64>, Rational)> {
        let mut out = Vec::new();
        enumerate_short(&self.gs(), bound, |x, q| {
            out.push((x.to_vec(), q.clone()));
            true
        });
        out
    }

    /// A nonzero vector of globally minimal length. Among minimizers the one with
    /// positive first nonzero coordinate and lexicographically smallest
    /// ambient coordinates is returned.
    pub fn shortest_vector(&self) -> ShortVector {
        let bound = self
            .gram
            .iter()
            .enumerate()
            .map(|(i, row)| row[i].clone())
            .min()
            .expect("rank >= 1");
        let candidates = self.vectors_within(&bound);
        let best = candidates
            .iter()
            .map(|(_, q)| q)
            .min()
            .expect("basis vectors lie within the bound")
            .clone();
        candidates
            .into_iter()
            .filter(|(_, q)| *q == best)
            .map(|(x, q)| {
                let mut v = self.combination(&x);
                let mut coeffs = x;
                let before = v.clone();
                canonical_sign(&mut v);
                if v != before {
                    coeffs.iter_mut().for_each(|c| *c = -*c);
                }
                ShortVector {
                    vector: v,
                    coefficients: coeffs,
                    norm_sq: q,
                }
            })
            .min_by(|a, b| lex_cmp(&a.vector, &b.vector))
            .expect("nonempty")
    }

    /// Squared length of the shortest nonzero vector.
    pub fn min_sq(&self) -> Rational {
        self.shortest_vector().norm_sq
    }

    fn quotient_data(&self, v: &[Rational]) -> Result<QuotientData> {
        if self.rank() < 2 {
            return Err(Error::pre("quotient needs rank >= 2"));
        }
        let coeffs = self.lattice_coordinates(v)?;
        let g = coeffs.iter().fold(0i64, |g, &c| g.gcd(&c));
        if g != 1 {
            return Err(Error::NotPrimitive);
        }
        let mut c: Vec<BigInt> = coeffs.iter().map(|&x| BigInt::from(x)).collect();
        let mut basis = self.vectors.clone();
        // Unimodular column operations until the coefficient vector is e_i.
        loop {
            let nz: Vec<usize> = (0..c.len()).filter(|&i| !c[i].is_zero()).collect();
            if nz.len() == 1 {
                break;
            }
            let i = *nz.iter().min_by_key(|&&i| c[i].abs()).unwrap();
            for &j in &nz {
                if j == i {
                    continue;
                }
                let q = c[j].div_floor(&c[i]);
                let step = &q * &c[i];
                c[j] -= step;
                let bj = basis[j].clone();
                axpy(&mut basis[i], &Rational::from_integer(q), &bj);
            }
        }
        let i = (0..c.len()).find(|&i| !c[i].is_zero()).unwrap();
        if c[i].is_negative() {
            for x in basis[i].iter_mut() {
                *x = -x.clone();
            }
        }
        basis.swap(0, i);
        debug_assert_eq!(basis[0], v);
        let vv = norm_sq(v);
        let complement: Vec<Vec<Rational>> = basis[1..].to_vec();
        let projected: Vec<Vec<Rational>> = complement
            .iter()
            .map(|b| {
                let mut p = b.clone();
                axpy(&mut p, &(-(dot(b, v) / &vv)), v);
                p
            })
            .collect();
        Ok(QuotientData {
            v: v.to_vec(),
            complement,
            projected: LatticeBasis::new(projected)?,
        })
    }

    /// `L / Zv` with the induced inner product on the orthogonal complement of `v`.
    pub fn quotient(&self, v: &[Rational]) -> Result<LatticeBasis> {
        Ok(self.quotient_data(v)?.projected)
    }

    /// A shortest vector of `L` projecting to `wbar` in `L / Zv`.
    pub fn minimal_lift(&self, v: &[Rational], wbar: &[Rational]) -> Result<Vec<Rational>> {
        let qd = self.quotient_data(v)?;
        lift_with(&qd, wbar)
    }

    /// The greedy basis: a shortest vector, then minimal lifts of the greedy
    /// basis of the quotient.
    pub fn greedy_basis(&self) -> GreedyBasis {
        let sv = self.shortest_vector();
        if self.rank() == 1 {
            return GreedyBasis {
                vectors: vec![sv.vector],
                alpha_sq: vec![sv.norm_sq],
            };
        }
        let qd = self
            .quotient_data(&sv.vector)
            .expect("shortest vectors are primitive");
        let inner = qd.projected.greedy_basis();
        let mut vectors = vec![sv.vector];
        for w in &inner.vectors {
            vectors.push(lift_with(&qd, w).expect("greedy vectors lie in the quotient"));
        }
        let mut alpha_sq = vec![sv.norm_sq];
        alpha_sq.extend(inner.alpha_sq);
        GreedyBasis { vectors, alpha_sq }
    }

    /// Integer change-of-basis matrix (rows = coordinates of each given vector).
    pub fn coordinate_matrix(&self, vectors: &[Vec<Rational>]) -> Result<Vec<Vec<i64>>> {
        vectors.iter().map(|v| self.lattice_coordinates(v)).collect()
    }

    /// Exact minimum of `sum |v_i|^2` over all bases. Rank at most 3.
    pub fn minbasis_sq(&self) -> Result<Rational> {
        let r = self.rank();
        if r > 3 {
            return Err(Error::pre(format!(
                "exact minbasis is limited to rank <= 3 (got rank {r})"
            )));
        }
        let greedy = self.greedy_basis();
        let mut best = greedy.norm_sum_sq();
        let min = greedy.alpha_sq[0].clone();
        if r == 1 {
            return Ok(min);
        }
        let bound = &best - &min * rat(r as i64 - 1);
        let mut cands: Vec<(Vec<i64>, Rational)> = self
            .vectors_within(&bound)
            .into_iter()
            .filter(|(x, _)| x.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0))
            .collect();
        cands.sort_by(|a, b| a.1.cmp(&b.1));
        let n = cands.len();
        if r == 2 {
            for i in 0..n {
                if &cands[i].1 * rat(2) > best {
                    break;
                }
                for j in i + 1..n {
                    let s = &cands[i].1 + &cands[j].1;
                    if s > best {
                        break;
                    }
                    let (a, b) = (&cands[i].0, &cands[j].0);
                    let det = a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128;
                    if det.abs() == 1 {
                        best = s;
                    }
                }
            }
        } else {
            for i in 0..n {
                if &cands[i].1 * rat(3) > best {
                    break;
                }
                for j in i + 1..n {
                    let s2 = &cands[i].1 + &cands[j].1;
                    if &s2 + &cands[j].1 > best {
                        break;
                    }
                    let (a, b) = (&cands[i].0, &cands[j].0);
                    let cross = [
                        a[1] as i128 * b[2] as i128 - a[2] as i128 * b[1] as i128,
                        a[2] as i128 * b[0] as i128 - a[0] as i128 * b[2] as i128,
                        a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128,
                    ];
                    for l in j + 1..n {
                        let s = &s2 + &cands[l].1;
                        if s > best {
                            break;
                        }
                        let c = &cands[l].0;
                        let det: i128 = cross
                            .iter()
                            .zip(c)
                            .map(|(x, &y)| x * y as i128)
                            .sum();
                        if det.abs() == 1 {
                            best = s;
                            break;
                        }
                    }
                }
            }
        }
        Ok(best)
    }
}

fn lift_with(qd: &QuotientData, wbar: &[Rational]) -> Result<Vec<Rational>> {
    let coords = qd.projected.lattice_coordinates(wbar)?;
    let mut w = vec![Rational::zero(); qd.v.len()];
    for (c, b) in coords.iter().zip(&qd.complement) {
        if *c != 0 {
            axpy(&mut w, &rat(*c), b);
        }
    }
    let vv = norm_sq(&qd.v);
    let t_star = -(dot(&w, &qd.v) / vv);
    let t = floor_big(&(t_star + ratio(1, 2)));
    axpy(&mut w, &Rational::from_integer(t), &qd.v);
    Ok(w)
}

/// Solves `m x = rhs` for square nonsingular `m` by exact Gaussian elimination.
pub(crate) fn solve(m: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for j in col..=n {
            a[col][j] = &a[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..=n {
                    let v = &f * &a[col][j];
                    a[r][j] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}
