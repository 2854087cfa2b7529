//! Rational scalars and dense exact linear algebra.
//!
//! Everything here is deterministic: elimination always pivots on the first
//! nonzero entry of the current column, so identical inputs give identical
//! echelon forms on every platform.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d`, reduced. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// "p/q", or "p" when q = 1.
pub fn fmt_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(p)?, q))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// Serde adapter writing rationals as "p/q" strings.
pub mod rational_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod rational_vec_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(fmt_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub fn rationals_to_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(fmt_rational).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Result of [`Mat::rref`].
#[derive(Debug, Clone)]
pub struct Rref {
    pub mat: Mat,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diag(entries: &[Rational]) -> Self {
        let mut m = Mat::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Matrix unit with a single 1 at `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        m[(i, j)] = Rational::one();
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(rows: usize, cols: &[Vec<Rational>]) -> Self {
        let mut m = Mat::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Rational) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn trace(&self) -> Rational {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)].clone()).sum()
    }

    /// tr(self · other) without forming the product.
    pub fn trace_mul(&self, other: &Mat) -> Rational {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = Rational::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let b = &other[(k, i)];
                if !b.is_zero() {
                    acc += a * b;
                }
            }
        }
        acc
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `self · other − other · self`.
    pub fn commutator(&self, other: &Mat) -> Mat {
        &(self * other) - &(other * self)
    }

    pub fn pow(&self, k: u32) -> Mat {
        let mut acc = Mat::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Reduced row echelon form with deterministic first-nonzero pivoting.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            if !inv.is_one() {
                for j in c..m.cols {
                    if !m[(r, j)].is_zero() {
                        m[(r, j)] *= &inv;
                    }
                }
            }
            let pivot_row: Vec<(usize, Rational)> = (c..m.cols)
                .filter(|&j| !m[(r, j)].is_zero())
                .map(|j| (j, m[(r, j)].clone()))
                .collect();
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for (j, pv) in &pivot_row {
                    let delta = &factor * pv;
                    m[(i, *j)] -= delta;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { mat: m, rank: r, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Null space `{v : self · v = 0}`.
    pub fn kernel(&self) -> Subspace {
        let Rref { mat, pivots, .. } = self.rref();
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -mat[(row, free)].clone();
            }
            basis.push(v);
        }
        Subspace::from_spanning(self.cols, basis)
    }

    /// One solution of `self · x = b`, free variables set to zero.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        let sols = self.solve_many(&[b.to_vec()])?;
        Ok(sols.into_iter().next().unwrap())
    }

    /// Solves against several right-hand sides sharing one elimination.
    pub fn solve_many(&self, bs: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
        self.solve_impl(bs, false)
    }

    /// Like [`Mat::solve_many`] but requires full column rank, reporting
    /// `RankDeficient` otherwise; one elimination serves both checks.
    pub fn solve_unique(&self, bs: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
        self.solve_impl(bs, true)
    }

    fn solve_impl(&self, bs: &[Vec<Rational>], unique: bool) -> Result<Vec<Vec<Rational>>> {
        let n = self.cols;
        let k = bs.len();
        let mut aug = Mat::zeros(self.rows, n + k);
        for i in 0..self.rows {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for (t, b) in bs.iter().enumerate() {
                assert_eq!(b.len(), self.rows);
                aug[(i, n + t)] = b[i].clone();
            }
        }
        let Rref { mat, pivots, .. } = aug.rref();
        let rank = pivots.iter().filter(|&&p| p < n).count();
        if unique && rank < n {
            return Err(Error::RankDeficient { rank, expected: n });
        }
        if pivots.iter().any(|&p| p >= n) {
            return Err(Error::NoSolution);
        }
        Ok((0..k)
            .map(|t| {
                let mut x = vec![Rational::zero(); n];
                for (row, &p) in pivots.iter().enumerate() {
                    x[p] = mat[(row, n + t)].clone();
                }
                x
            })
            .collect())
    }

    pub fn inverse(&self) -> Result<Mat> {
        assert!(self.is_square());
        let n = self.rows;
        let cols: Vec<Vec<Rational>> = (0..n)
            .map(|j| (0..n).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        if self.rank() < n {
            return Err(Error::NoSolution);
        }
        let sols = self.solve_many(&cols)?;
        Ok(Mat::from_cols(n, &sols))
    }

    pub fn det(&self) -> Rational {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &piv;
                for j in c..n {
                    let d = &f * &m[(c, j)];
                    m[(i, j)] -= d;
                }
            }
        }
        det
    }

    /// `ker(self − c·I)`.
    pub fn eigenspace(&self, c: &Rational) -> Subspace {
        assert!(self.is_square());
        let mut shifted = self.clone();
        for i in 0..self.rows {
            shifted[(i, i)] -= c;
        }
        shifted.kernel()
    }

    /// Monic minimal polynomial, coefficients from the constant term up.
    ///
    /// Found as the first linear dependency in the Krylov sequence
    /// `I, M, M², …` of flattened powers.
    pub fn minpoly(&self) -> Vec<Rational> {
        assert!(self.is_square());
        let n = self.rows;
        let mut powers: Vec<Vec<Rational>> = vec![Mat::identity(n).data];
        let mut cur = Mat::identity(n);
        loop {
            cur = &cur * self;
            let d = powers.len();
            let a = Mat::from_cols(n * n, &powers);
            match a.solve(&cur.data) {
                Ok(x) => {
                    let mut p: Vec<Rational> = x.into_iter().map(|c| -c).collect();
                    p.push(Rational::one());
                    return p;
                }
                Err(_) => {
                    powers.push(cur.data.clone());
                    assert!(d <= n, "Cayley-Hamilton bound exceeded");
                }
            }
        }
    }

    /// True when the minimal polynomial has no repeated roots.
    pub fn minpoly_squarefree(&self) -> bool {
        let p = self.minpoly();
        let dp = uni_derivative(&p);
        uni_gcd(&p, &dp).len() <= 1
    }
}

fn uni_trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn uni_derivative(p: &[Rational]) -> Vec<Rational> {
    uni_trim(p.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect())
}

fn uni_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = uni_trim(a.to_vec());
    let b = uni_trim(b.to_vec());
    let lead = b.last().expect("division by zero polynomial").clone();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        r = uni_trim(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

/// Monic gcd of two dense univariate polynomials (empty = zero polynomial).
pub(crate) fn uni_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut a = uni_trim(a.to_vec());
    let mut b = uni_trim(b.to_vec());
    while !b.is_empty() {
        let r = uni_rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(lead) = a.last().cloned() {
        for c in &mut a {
            *c /= &lead;
        }
    }
    a
}

impl Index<(usize, usize)> for Mat {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(fmt_rational).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Mat {
    /// Rows as "p/q" strings, for JSON reports.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| rationals_to_strings(self.row(i))).collect()
    }
}

/// A linear subspace of `Q^ambient_dim`, stored by its reduced echelon basis.
///
/// The echelon basis is canonical, so `==` is subspace equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace::from_spanning(ambient_dim, Mat::identity(ambient_dim).row_vecs())
    }

    pub fn from_spanning(ambient_dim: usize, vectors: Vec<Vec<Rational>>) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(ambient_dim);
        }
        assert!(vectors.iter().all(|v| v.len() == ambient_dim));
        let Rref { mat, rank, .. } = Mat::from_rows(vectors).rref();
        Subspace { ambient_dim, basis: (0..rank).map(|i| mat.row(i).to_vec()).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Coefficients of `v` against the stored echelon basis.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if self.basis.is_empty() {
            return is_zero_vec(v).then(Vec::new);
        }
        Mat::from_cols(self.ambient_dim, &self.basis).solve(v).ok()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::from_spanning(self.ambient_dim, vs)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        if self.basis.is_empty() || other.basis.is_empty() {
            return Subspace::zero(self.ambient_dim);
        }
        // a·A = b·B  <=>  [A^T | -B^T] (a, b) = 0
        let mut cols = self.basis.clone();
        cols.extend(other.basis.iter().map(|v| v.iter().map(|x| -x).collect()));
        let ker = Mat::from_cols(self.ambient_dim, &cols).kernel();
        let k = self.basis.len();
        let vecs = ker
            .basis()
            .iter()
            .map(|coef| {
                let mut v = vec![Rational::zero(); self.ambient_dim];
                for (c, b) in coef[..k].iter().zip(&self.basis) {
                    if c.is_zero() {
                        continue;
                    }
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi += c * bi;
                    }
                }
                v
            })
            .collect();
        Subspace::from_spanning(self.ambient_dim, vecs)
    }

    /// True when `self ⊕ other` is the whole ambient space.
    pub fn is_complement(&self, other: &Subspace) -> bool {
        self.dim() + other.dim() == self.ambient_dim && self.sum(other).dim() == self.ambient_dim
    }
}

/// Largest absolute numerator/denominator bit size, for diagnostics.
pub fn max_bits(v: &[Rational]) -> u64 {
    v.iter()
        .map(|q| q.numer().abs().bits().max(q.denom().bits()))
        .max()
        .unwrap_or(0)
}
