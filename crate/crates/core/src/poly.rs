//! Sparse multivariate polynomials over Q and exact interpolation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{fmt_rational, int, parse_rational, Mat, Rational};
use crate::sampling::{self, stream};

pub type Exponents = Vec<u32>;

/// A polynomial in `nvars` variables with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = SparsePoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        SparsePoly::monomial(e, Rational::one())
    }

    pub fn monomial(exps: Exponents, coef: Rational) -> Self {
        let mut p = SparsePoly::zero(exps.len());
        p.add_term(exps, coef);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Self {
        let mut p = SparsePoly::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exps: Exponents, coef: Rational) {
        assert_eq!(exps.len(), self.nvars, "exponent vector length");
        if coef.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(coef);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// The graded degree when every term has the same one.
    pub fn graded_degree(&self, vars: &GradedVars) -> Option<Rational> {
        let mut degs = self.terms.keys().map(|e| vars.degree_of(e));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn scale(&self, c: &Rational) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(self.nvars);
        }
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> SparsePoly {
        let mut acc = SparsePoly::constant(self.nvars, Rational::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars, "point length");
        let maxe: Vec<u32> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<Rational>> = point
            .iter()
            .zip(&maxe)
            .map(|(x, &m)| {
                let mut v = Vec::with_capacity(m as usize + 1);
                v.push(Rational::one());
                for k in 0..m as usize {
                    let next = &v[k] * x;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= &powers[i][k as usize];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn partial(&self, var: usize) -> SparsePoly {
        let mut out = SparsePoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c * int(e[var] as i64));
        }
        out
    }

    pub fn gradient(&self) -> Vec<SparsePoly> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// Substitutes `subs[i]` for variable `i`.
    pub fn compose(&self, subs: &[SparsePoly]) -> SparsePoly {
        assert_eq!(subs.len(), self.nvars);
        let target = subs.first().map_or(0, SparsePoly::nvars);
        let mut cache: BTreeMap<(usize, u32), SparsePoly> = BTreeMap::new();
        let mut out = SparsePoly::zero(target);
        for (e, c) in &self.terms {
            let mut t = SparsePoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let p = cache.entry((i, k)).or_insert_with(|| subs[i].pow(k)).clone();
                t = &t * &p;
            }
            out = &out + &t;
        }
        out
    }

    /// Terms in graded-lexicographic order (total degree, then exponents).
    pub fn canonical_terms(&self) -> Vec<(&Exponents, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        v
    }

    pub fn to_json(&self, names: &[String]) -> PolyJson {
        assert_eq!(names.len(), self.nvars);
        PolyJson {
            vars: names.to_vec(),
            terms: self
                .canonical_terms()
                .into_iter()
                .map(|(e, c)| TermJson { exps: e.clone(), coef: fmt_rational(c) })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<SparsePoly> {
        let n = j.vars.len();
        let mut p = SparsePoly::zero(n);
        for t in &j.terms {
            if t.exps.len() != n {
                return Err(Error::Parse("term arity differs from vars".into()));
            }
            p.add_term(t.exps.clone(), parse_rational(&t.coef)?);
        }
        Ok(p)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.canonical_terms().into_iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| if x == 1 { names[i].clone() } else { format!("{}^{}", names[i], x) })
                .collect();
            if mono.is_empty() {
                out.push_str(&fmt_rational(&a));
            } else {
                if !a.is_one() {
                    out.push_str(&fmt_rational(&a));
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

/// Parses expressions such as `-5/6*(140*w6*w3^2 + 35 w5 w3)` over the
/// given variable names. Juxtaposition multiplies; division only by constants.
pub fn parse_poly(src: &str, names: &[&str]) -> Result<SparsePoly> {
    let mut p = Parser { s: src.as_bytes(), i: 0, names, nvars: names.len() };
    let out = p.expr()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    names: &'a [&'a str],
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.i, String::from_utf8_lossy(self.s)))
    }

    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<SparsePoly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.i += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.i += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.i += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SparsePoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.i += 1;
                    acc = &acc * &self.power()?;
                }
                Some(b'/') => {
                    self.i += 1;
                    let d = self.power()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(self.err("division by a non-constant"));
                    }
                    acc = acc.scale(&(Rational::one() / d.coefficient(&vec![0; self.nvars])));
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<SparsePoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            self.skip_ws();
            let start = self.i;
            while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                self.i += 1;
            }
            let k: u32 = std::str::from_utf8(&self.s[start..self.i])
                .unwrap()
                .parse()
                .map_err(|_| self.err("bad exponent"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SparsePoly> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                let v = parse_rational(std::str::from_utf8(&self.s[start..self.i]).unwrap())?;
                Ok(SparsePoly::constant(self.nvars, v))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_alphanumeric() {
                    self.i += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                let k = self.names.iter().position(|n| *n == name).ok_or_else(|| self.err("unknown variable"))?;
                Ok(SparsePoly::var(self.nvars, k))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

/// Default variable names `u1, u2, …`.
pub fn u_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("u{i}")).collect()
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&u_names(self.nvars)))
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&u_names(self.nvars)))
    }
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.scale(&int(-1))
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = SparsePoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

/// JSON form `{"vars": [...], "terms": [{"exps": [...], "coef": "p/q"}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub coef: String,
}

/// Positive half-integer weights, stored doubled.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedVars {
    doubled: Vec<u32>,
}

impl GradedVars {
    pub fn new(weights: &[Rational]) -> Result<Self> {
        let doubled = weights
            .iter()
            .map(|w| {
                let d = w * int(2);
                if !d.is_integer() || !d.is_positive() {
                    return Err(Error::InvalidWeights(format!("{w} is not a positive half-integer")));
                }
                d.to_integer().to_u32().ok_or_else(|| Error::InvalidWeights(format!("{w} too large")))
            })
            .collect::<Result<_>>()?;
        Ok(GradedVars { doubled })
    }

    pub fn uniform(n: usize) -> Self {
        GradedVars { doubled: vec![2; n] }
    }

    pub fn nvars(&self) -> usize {
        self.doubled.len()
    }

    pub fn weight(&self, i: usize) -> Rational {
        Rational::new(self.doubled[i].into(), 2.into())
    }

    pub fn weights(&self) -> Vec<Rational> {
        (0..self.nvars()).map(|i| self.weight(i)).collect()
    }

    pub fn degree_of(&self, exps: &[u32]) -> Rational {
        let d: u64 = exps.iter().zip(&self.doubled).map(|(&e, &w)| e as u64 * w as u64).sum();
        Rational::new(d.into(), 2.into())
    }

    /// All exponent vectors of exactly the given graded degree, in lexicographic order.
    pub fn monomials(&self, degree: &Rational) -> Vec<Exponents> {
        let d2 = degree * int(2);
        if !d2.is_integer() || d2.is_negative() {
            return Vec::new();
        }
        let target = d2.to_integer().to_u64().expect("degree too large");
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.nvars()];
        self.enumerate(0, target, &mut cur, &mut out);
        out.sort();
        out
    }

    fn enumerate(&self, i: usize, remaining: u64, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        if i == self.nvars() {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let w = self.doubled[i] as u64;
        let mut k = 0;
        while k * w <= remaining {
            cur[i] = k as u32;
            self.enumerate(i + 1, remaining - k * w, cur, out);
            k += 1;
        }
        cur[i] = 0;
    }
}

/// Knobs for quasihomogeneous interpolation.
#[derive(Debug, Clone)]
pub struct InterpConfig {
    pub seed: u64,
    /// Extra agreement points checked after the solve.
    pub extra_points: usize,
    /// Seed blocks tried when the sample matrix is rank deficient.
    pub max_blocks: usize,
}

impl Default for InterpConfig {
    fn default() -> Self {
        InterpConfig { seed: 0, extra_points: 3, max_blocks: 6 }
    }
}

/// Lagrange/Newton interpolation through distinct abscissae; dense
/// coefficients from the constant term up, length = number of samples.
pub fn interp_univariate_coeffs(samples: &[(Rational, Rational)]) -> Result<Vec<Rational>> {
    let n = samples.len();
    for i in 0..n {
        for j in i + 1..n {
            if samples[i].0 == samples[j].0 {
                return Err(Error::DuplicateAbscissa(samples[i].0.clone()));
            }
        }
    }
    // divided differences
    let xs: Vec<&Rational> = samples.iter().map(|s| &s.0).collect();
    let mut dd: Vec<Rational> = samples.iter().map(|s| s.1.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    // Horner expansion of the Newton form
    let mut coeffs = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        // coeffs <- coeffs * (x - xs[i]) + dd[i]
        let mut next = vec![Rational::zero(); n];
        for k in 0..n {
            if coeffs[k].is_zero() {
                continue;
            }
            if k + 1 < n {
                next[k + 1] += &coeffs[k];
            }
            next[k] -= &coeffs[k] * xs[i];
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    Ok(coeffs)
}

/// Univariate interpolant as a one-variable `SparsePoly`.
pub fn interp_univariate(samples: &[(Rational, Rational)]) -> Result<SparsePoly> {
    let c = interp_univariate_coeffs(samples)?;
    Ok(SparsePoly::from_terms(1, c.into_iter().enumerate().map(|(k, x)| (vec![k as u32], x))))
}

/// Reconstructs a quasihomogeneous polynomial of the given graded degree
/// from an exact evaluator.
///
/// The monomial basis of that degree is solved for through seeded integer
/// sample points, then checked at `cfg.extra_points` further points. A
/// mismatch there means the oracle is not of the declared degree.
pub fn interp_quasihomogeneous<F>(
    degree: &Rational,
    vars: &GradedVars,
    oracle: F,
    cfg: &InterpConfig,
) -> Result<SparsePoly>
where
    F: Fn(&[Rational]) -> Result<Rational> + Sync,
{
    let n = vars.nvars();
    let monos = vars.monomials(degree);
    let k = monos.len();
    let mut last_err = None;
    for block in 0..cfg.max_blocks as u64 {
        let pts = sampling::points(cfg.seed, stream::INTERP + block, n, k + cfg.extra_points);
        let values: Result<Vec<Rational>> = pts.par_iter().map(|p| oracle(p)).collect();
        let values = match values {
            Ok(v) => v,
            Err(e @ Error::SingularExtension { .. }) => {
                last_err = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let poly = if k == 0 {
            SparsePoly::zero(n)
        } else {
            let rows: Vec<Vec<Rational>> =
                pts[..k].iter().map(|p| monos.iter().map(|e| monomial_value(e, p)).collect()).collect();
            let a = Mat::from_rows(rows);
            let coef = match a.solve_unique(&[values[..k].to_vec()]) {
                Ok(mut c) => c.pop().expect("one right-hand side"),
                Err(Error::RankDeficient { .. }) => {
                    last_err = Some(Error::SingularSystem { blocks: block as usize + 1 });
                    continue;
                }
                Err(e) => return Err(e),
            };
            SparsePoly::from_terms(n, monos.iter().cloned().zip(coef))
        };
        for (p, v) in pts[k..].iter().zip(&values[k..]) {
            if &poly.eval(p) != v {
                return Err(Error::VerificationFailed { degree: degree.clone(), point: p.clone() });
            }
        }
        return Ok(poly);
    }
    Err(match last_err {
        Some(Error::SingularSystem { .. }) | None => Error::SingularSystem { blocks: cfg.max_blocks },
        Some(e) => e,
    })
}

fn monomial_value(e: &[u32], p: &[Rational]) -> Rational {
    let mut v = Rational::one();
    for (x, &k) in p.iter().zip(e) {
        for _ in 0..k {
            v *= x;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    fn u(n: usize, i: usize) -> SparsePoly {
        SparsePoly::var(n, i)
    }

    #[test]
    fn parse_examples() {
        let names = ["u1", "u2", "u6"];
        let p = parse_poly("u1 + 3 u6^2", &names).unwrap();
        assert_eq!(p, &u(3, 0) + &u(3, 2).pow(2).scale(&int(3)));
        let q = parse_poly("-5/6*(2 u1 u2 - u6) + 1/2", &names).unwrap();
        let expect = &(&(&u(3, 0) * &u(3, 1)).scale(&rat(-5, 3)) + &u(3, 2).scale(&rat(5, 6))) + &SparsePoly::constant(3, rat(1, 2));
        assert_eq!(q, expect);
        assert!(parse_poly("u1 / u2", &names).is_err());
        assert!(parse_poly("u9", &names).is_err());
        assert!(parse_poly("(u1", &names).is_err());
    }

    #[test]
    fn eval_examples() {
        let n = 8;
        let p = &u(n, 0) + &u(n, 5).pow(2).scale(&int(3));
        let mut pt = vec![int(0); n];
        pt[0] = int(1);
        pt[5] = int(2);
        assert_eq!(p.eval(&pt), int(13));
        assert_eq!(SparsePoly::zero(n).eval(&pt), int(0));
        let q = &u(n, 2) * &u(n, 7);
        pt[2] = int(2);
        pt[7] = rat(1, 2);
        assert_eq!(q.eval(&pt), int(1));
    }

    #[test]
    fn partial_examples() {
        let n = 8;
        let p = &u(n, 0) + &u(n, 5).pow(2).scale(&int(3));
        assert_eq!(p.partial(5), u(n, 5).scale(&int(6)));
        assert!(SparsePoly::constant(n, int(4)).partial(3).is_zero());
        let q = &u(n, 0).pow(2) * &u(n, 1);
        assert_eq!(q.partial(0), (&u(n, 0) * &u(n, 1)).scale(&int(2)));
    }

    #[test]
    fn univariate_examples() {
        let c = interp_univariate_coeffs(&[(int(0), int(1)), (int(1), int(1))]).unwrap();
        assert_eq!(c, vec![int(1), int(0)]);
        let c = interp_univariate_coeffs(&[(int(0), int(0)), (int(1), int(1)), (int(2), int(4))]).unwrap();
        assert_eq!(c, vec![int(0), int(0), int(1)]);
        let (c0, c1) = (rat(3, 7), rat(-5, 2));
        let c = interp_univariate_coeffs(&[(int(0), c0.clone()), (int(1), &c0 + &c1)]).unwrap();
        assert_eq!(c, vec![c0, c1]);
        assert!(matches!(
            interp_univariate(&[(int(1), int(0)), (int(1), int(2))]),
            Err(Error::DuplicateAbscissa(_))
        ));
    }

    #[test]
    fn quasihomogeneous_examples() {
        let cfg = InterpConfig::default();
        let target = &u(2, 0).pow(2) + &u(2, 1).pow(2);
        let got = interp_quasihomogeneous(&int(2), &GradedVars::uniform(2), |p| Ok(target.eval(p)), &cfg)
            .unwrap();
        assert_eq!(got, target);

        let gv = GradedVars::new(&[int(2), int(1)]).unwrap();
        let target = &u(2, 0) + &u(2, 1).pow(2).scale(&int(5));
        let got = interp_quasihomogeneous(&int(2), &gv, |p| Ok(target.eval(p)), &cfg).unwrap();
        assert_eq!(got, target);

        let gv = GradedVars::new(&[rat(1, 2), int(1)]).unwrap();
        let cubic = &u(2, 1).pow(3) + &u(2, 0).pow(2);
        let r = interp_quasihomogeneous(&rat(5, 2), &gv, |p| Ok(cubic.eval(p)), &cfg);
        assert!(matches!(r, Err(Error::VerificationFailed { .. })));
    }

    #[test]
    fn monomial_enumeration() {
        let gv = GradedVars::new(&[rat(1, 2), int(1), rat(3, 2)]).unwrap();
        let m = gv.monomials(&rat(3, 2));
        // u1^3, u1 u2, u3
        assert_eq!(m.len(), 3);
        for e in &m {
            assert_eq!(gv.degree_of(e), rat(3, 2));
        }
        assert!(gv.monomials(&int(-1)).is_empty());
        assert_eq!(gv.monomials(&int(0)), vec![vec![0, 0, 0]]);
        assert!(GradedVars::new(&[rat(1, 3)]).is_err());
        assert!(GradedVars::new(&[int(0)]).is_err());
    }

    #[test]
    fn compose_and_json() {
        let p = &u(2, 0).pow(2) + &u(2, 1).scale(&rat(-1, 3));
        let subs = vec![&u(3, 1) + &u(3, 2), u(3, 0)];
        let c = p.compose(&subs);
        let pt = vec![int(2), int(3), int(-1)];
        assert_eq!(c.eval(&pt), p.eval(&[int(2), int(2)]));
        let names = u_names(2);
        let j = p.to_json(&names);
        let s = serde_json::to_string(&j).unwrap();
        assert_eq!(s, r#"{"vars":["u1","u2"],"terms":[{"exps":[0,1],"coef":"-1/3"},{"exps":[2,0],"coef":"1"}]}"#);
        assert_eq!(SparsePoly::from_json(&j).unwrap(), p);
        assert_eq!(p.display_with(&names), "u1^2 - 1/3*u2");
    }

    fn arb_poly(nvars: usize) -> impl Strategy<Value = SparsePoly> {
        proptest::collection::vec((proptest::collection::vec(0u32..3, nvars), -5i64..=5, 1i64..4), 0..6)
            .prop_map(move |ts| SparsePoly::from_terms(nvars, ts.into_iter().map(|(e, n, d)| (e, rat(n, d)))))
    }

    fn arb_quasi(gv: GradedVars, degree: Rational) -> impl Strategy<Value = SparsePoly> {
        let monos = gv.monomials(&degree);
        let n = gv.nvars();
        proptest::collection::vec(-4i64..=4, monos.len()).prop_map(move |cs| {
            SparsePoly::from_terms(n, monos.iter().cloned().zip(cs.into_iter().map(int)))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn arithmetic_agrees_with_evaluation(a in arb_poly(3), b in arb_poly(3), seed in 0u64..100) {
            for p in sampling::points(seed, 0, 3, 10) {
                prop_assert_eq!((&a + &b).eval(&p), a.eval(&p) + b.eval(&p));
                prop_assert_eq!((&a * &b).eval(&p), a.eval(&p) * b.eval(&p));
                prop_assert_eq!((&a - &b).eval(&p), a.eval(&p) - b.eval(&p));
            }
        }

        #[test]
        fn json_roundtrip(a in arb_poly(4)) {
            let j = a.to_json(&u_names(4));
            let s = serde_json::to_string(&j).unwrap();
            let back: PolyJson = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(SparsePoly::from_json(&back).unwrap(), a);
        }

        #[test]
        fn interp_roundtrip(p in arb_quasi(GradedVars::new(&[rat(1,2), int(1), rat(3,2), int(2)]).unwrap(), int(3))) {
            let gv = GradedVars::new(&[rat(1,2), int(1), rat(3,2), int(2)]).unwrap();
            let got = interp_quasihomogeneous(&int(3), &gv, |x| Ok(p.eval(x)), &InterpConfig::default()).unwrap();
            prop_assert_eq!(got, p);
        }
    }
}
