//! Matrix realizations of sl(n) and so(n) with their invariant forms.
//!
//! so(n) is realized as `{X : XᵀS + SX = 0}` with `S` the antidiagonal of
//! ones, which keeps the Cartan subalgebra diagonal.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{int, Mat, Rational, Subspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    A,
    B,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    #[default]
    Killing,
    Trace,
}

/// `⟨x, y⟩ = scale · tr(xy)` in the defining representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantForm {
    pub kind: FormKind,
    pub scale: Rational,
}

/// An element of a [`LieAlgebra`]: its ambient matrix and basis coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct Element {
    matrix: Mat,
    coords: Vec<Rational>,
}

impl Element {
    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({:?})", self.matrix)
    }
}

pub struct LieAlgebra {
    family: Family,
    n: usize,
    basis: Vec<Mat>,
    rank: usize,
    form: InvariantForm,
    killing_scale: Rational,
    gram: Mat,
    coord_positions: Vec<(usize, usize)>,
    /// Sparse rows of the inverse of the basis restricted to `coord_positions`.
    coord_rows: Vec<Vec<(usize, Rational)>>,
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieAlgebra({})", self.descriptor())
    }
}

/// Antidiagonal matrix of ones.
pub fn antidiagonal(n: usize) -> Mat {
    let mut s = Mat::zeros(n, n);
    for i in 0..n {
        s[(i, n - 1 - i)] = Rational::one();
    }
    s
}

pub fn build_sl(n: usize) -> Result<LieAlgebra> {
    if n < 2 {
        return Err(Error::InvalidAlgebra(format!("sl({n}) needs n >= 2")));
    }
    let mut basis = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                basis.push(Mat::unit(n, i, j));
            }
        }
    }
    for i in 0..n - 1 {
        basis.push(&Mat::unit(n, i, i) - &Mat::unit(n, i + 1, i + 1));
    }
    // diag(n-1, n-3, ..., 1-n) has distinct eigenvalues
    let regular = Mat::diag(&(0..n).map(|i| int(n as i64 - 1 - 2 * i as i64)).collect::<Vec<_>>());
    LieAlgebra::assemble(Family::A, n, basis, int(2 * n as i64), &regular)
}

pub fn build_so(n: usize) -> Result<LieAlgebra> {
    if n < 5 {
        return Err(Error::InvalidAlgebra(format!("so({n}) needs n >= 5")));
    }
    let mut basis = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i + j + 2 <= n {
                basis.push(&Mat::unit(n, i, j) - &Mat::unit(n, n - 1 - j, n - 1 - i));
            }
        }
    }
    let k = n / 2;
    let mut d = vec![Rational::zero(); n];
    for i in 0..k {
        d[i] = int(i as i64 + 1);
        d[n - 1 - i] = int(-(i as i64) - 1);
    }
    let family = if n % 2 == 1 { Family::B } else { Family::D };
    LieAlgebra::assemble(family, n, basis, int(n as i64 - 2), &Mat::diag(&d))
}

/// Parses "sl:5", "so:8", ... with the requested invariant form.
pub fn build(descriptor: &str, form: FormKind) -> Result<LieAlgebra> {
    let (kind, n) = descriptor
        .split_once(':')
        .ok_or_else(|| Error::InvalidAlgebra(descriptor.to_string()))?;
    let n: usize = n.trim().parse().map_err(|_| Error::InvalidAlgebra(descriptor.to_string()))?;
    let alg = match kind.trim() {
        "sl" => build_sl(n)?,
        "so" => build_so(n)?,
        _ => return Err(Error::InvalidAlgebra(descriptor.to_string())),
    };
    Ok(alg.with_form(form))
}

impl LieAlgebra {
    fn assemble(family: Family, n: usize, basis: Vec<Mat>, killing: Rational, regular: &Mat) -> Result<Self> {
        let dim = basis.len();
        let flat = Mat::from_rows(basis.iter().map(|b| b.entries().to_vec()).collect());
        let rr = flat.rref();
        if rr.rank != dim {
            return Err(Error::Invariant("basis is linearly dependent".into()));
        }
        let coord_positions: Vec<(usize, usize)> = rr.pivots.iter().map(|&p| (p / n, p % n)).collect();
        let mut sub = Mat::zeros(dim, dim);
        for (k, &(i, j)) in coord_positions.iter().enumerate() {
            for (a, b) in basis.iter().enumerate() {
                sub[(k, a)] = b[(i, j)].clone();
            }
        }
        let inv = sub.inverse()?;
        let coord_rows = (0..dim)
            .map(|a| {
                (0..dim)
                    .filter(|&k| !inv[(a, k)].is_zero())
                    .map(|k| (k, inv[(a, k)].clone()))
                    .collect()
            })
            .collect();
        let mut alg = LieAlgebra {
            family,
            n,
            basis,
            rank: 0,
            form: InvariantForm { kind: FormKind::Killing, scale: killing.clone() },
            killing_scale: killing,
            gram: Mat::zeros(0, 0),
            coord_positions,
            coord_rows,
        };
        alg.gram = alg.compute_gram();
        let reg = alg.element(regular)?;
        alg.rank = alg.centralizer(&reg).dim();
        alg.verify_killing_scale()?;
        Ok(alg)
    }

    /// Same algebra with another invariant form.
    pub fn with_form(mut self, kind: FormKind) -> Self {
        let scale = match kind {
            FormKind::Killing => self.killing_scale.clone(),
            FormKind::Trace => Rational::one(),
        };
        self.form = InvariantForm { kind, scale };
        self.gram = self.compute_gram();
        self
    }

    fn compute_gram(&self) -> Mat {
        let d = self.dim();
        let mut g = Mat::zeros(d, d);
        for a in 0..d {
            for b in a..d {
                let v = self.form_mat(&self.basis[a], &self.basis[b]);
                g[(b, a)] = v.clone();
                g[(a, b)] = v;
            }
        }
        g
    }

    /// Checks `tr(ad_x ad_y) = c · tr(xy)` on two pairs.
    fn verify_killing_scale(&self) -> Result<()> {
        let d = self.dim();
        let pairs = [(0, d - 1), (d - 1, d - 1)];
        for (a, b) in pairs {
            let x = self.basis_element(a);
            let y = self.basis_element(b);
            let lhs = (&self.ad_matrix(&x) * &self.ad_matrix(&y)).trace();
            let rhs = &self.killing_scale * x.matrix.trace_mul(&y.matrix);
            if lhs != rhs {
                return Err(Error::Invariant(format!("Killing scale mismatch {lhs} vs {rhs}")));
            }
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn ambient_size(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn form_info(&self) -> &InvariantForm {
        &self.form
    }

    pub fn killing_scale(&self) -> &Rational {
        &self.killing_scale
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    pub fn descriptor(&self) -> String {
        match self.family {
            Family::A => format!("sl:{}", self.n),
            _ => format!("so:{}", self.n),
        }
    }

    /// Exponents ν_1 ≤ … ≤ ν_r of the Lie algebra.
    pub fn exponents(&self) -> Vec<u32> {
        let r = self.rank as u32;
        let mut e: Vec<u32> = match self.family {
            Family::A => (1..=r).collect(),
            Family::B => (1..=r).map(|i| 2 * i - 1).collect(),
            Family::D => {
                let mut v: Vec<u32> = (1..r).map(|i| 2 * i - 1).collect();
                v.push(r - 1);
                v
            }
        };
        e.sort();
        e
    }

    /// The symmetric matrix defining so(n); `None` for sl(n).
    pub fn orthogonal_form(&self) -> Option<Mat> {
        (self.family != Family::A).then(|| antidiagonal(self.n))
    }

    pub fn is_member(&self, m: &Mat) -> bool {
        if m.rows() != self.n || !m.is_square() {
            return false;
        }
        let c = self.coords_unchecked(m);
        self.matrix_of(&c) == *m
    }

    fn coords_unchecked(&self, m: &Mat) -> Vec<Rational> {
        let vals: Vec<&Rational> = self.coord_positions.iter().map(|&(i, j)| &m[(i, j)]).collect();
        self.coord_rows
            .iter()
            .map(|row| {
                let mut acc = Rational::zero();
                for (k, c) in row {
                    if !vals[*k].is_zero() {
                        acc += c * vals[*k];
                    }
                }
                acc
            })
            .collect()
    }

    fn matrix_of(&self, coords: &[Rational]) -> Mat {
        let mut m = Mat::zeros(self.n, self.n);
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            m = &m + &b.scale(c);
        }
        m
    }

    /// Wraps an ambient matrix, verifying membership.
    pub fn element(&self, m: &Mat) -> Result<Element> {
        if m.rows() != self.n || !m.is_square() {
            return Err(Error::NotInAlgebra);
        }
        let coords = self.coords_unchecked(m);
        if self.matrix_of(&coords) != *m {
            return Err(Error::NotInAlgebra);
        }
        Ok(Element { matrix: m.clone(), coords })
    }

    pub fn from_coords(&self, coords: &[Rational]) -> Element {
        assert_eq!(coords.len(), self.dim());
        Element { matrix: self.matrix_of(coords), coords: coords.to_vec() }
    }

    pub fn basis_element(&self, a: usize) -> Element {
        let mut c = vec![Rational::zero(); self.dim()];
        c[a] = Rational::one();
        Element { matrix: self.basis[a].clone(), coords: c }
    }

    pub fn zero(&self) -> Element {
        self.from_coords(&vec![Rational::zero(); self.dim()])
    }

    /// Coordinates of an ambient matrix already known to lie in the algebra.
    pub(crate) fn trusted(&self, m: Mat) -> Element {
        let coords = self.coords_unchecked(&m);
        debug_assert_eq!(self.matrix_of(&coords), m);
        Element { matrix: m, coords }
    }

    pub fn add(&self, x: &Element, y: &Element) -> Element {
        Element {
            matrix: &x.matrix + &y.matrix,
            coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, x: &Element, c: &Rational) -> Element {
        Element { matrix: x.matrix.scale(c), coords: x.coords.iter().map(|a| a * c).collect() }
    }

    /// `[x, y]`, with the result's membership verified.
    pub fn bracket(&self, x: &Element, y: &Element) -> Result<Element> {
        self.element(&x.matrix.commutator(&y.matrix))
    }

    pub(crate) fn bracket_fast(&self, x: &Element, y: &Element) -> Element {
        self.trusted(x.matrix.commutator(&y.matrix))
    }

    pub fn form(&self, x: &Element, y: &Element) -> Rational {
        self.form_mat(&x.matrix, &y.matrix)
    }

    pub fn form_mat(&self, x: &Mat, y: &Mat) -> Rational {
        &self.form.scale * x.trace_mul(y)
    }

    /// Form against coordinate vectors: `xᵀ G y`.
    pub fn form_coords(&self, x: &[Rational], y: &[Rational]) -> Rational {
        crate::exact::dot(x, &self.gram.mul_vec(y))
    }

    /// Matrix of `y ↦ [x, y]` in the algebra basis (columns are images).
    pub fn ad_matrix(&self, x: &Element) -> Mat {
        let cols: Vec<Vec<Rational>> = self
            .basis
            .iter()
            .map(|b| self.coords_unchecked(&x.matrix.commutator(b)))
            .collect();
        Mat::from_cols(self.dim(), &cols)
    }

    pub fn centralizer(&self, x: &Element) -> Subspace {
        self.ad_matrix(x).kernel()
    }

    pub fn is_regular_semisimple(&self, x: &Element) -> bool {
        self.centralizer(x).dim() == self.rank && x.matrix.minpoly_squarefree()
    }

    /// Element of a coordinate subspace vector.
    pub fn element_of(&self, v: &[Rational]) -> Element {
        self.from_coords(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::sampling;

    fn diag(v: &[i64]) -> Mat {
        Mat::diag(&v.iter().map(|&x| int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn dimensions_and_ranks() {
        let sl5 = build_sl(5).unwrap();
        assert_eq!((sl5.dim(), sl5.rank()), (24, 4));
        let sl2 = build_sl(2).unwrap();
        assert_eq!((sl2.dim(), sl2.rank()), (3, 1));
        let so8 = build_so(8).unwrap();
        assert_eq!((so8.dim(), so8.rank()), (28, 4));
        let so9 = build_so(9).unwrap();
        assert_eq!((so9.dim(), so9.rank()), (36, 4));
        assert!(build_so(4).is_err());
        assert!(build_sl(1).is_err());
        assert!(build("gl:3", FormKind::Killing).is_err());
    }

    #[test]
    fn so_membership() {
        for n in [5, 8, 9] {
            let alg = build_so(n).unwrap();
            let s = antidiagonal(n);
            for b in alg.basis() {
                assert!((&(&b.transpose() * &s) + &(&s * b)).is_zero());
            }
            assert_eq!(alg.orthogonal_form().unwrap(), s);
        }
        assert!(build_sl(3).unwrap().orthogonal_form().is_none());
    }

    #[test]
    fn killing_scales() {
        let sl5 = build_sl(5).unwrap();
        assert_eq!(sl5.killing_scale(), &int(10));
        let e12 = sl5.element(&Mat::unit(5, 0, 1)).unwrap();
        let e21 = sl5.element(&Mat::unit(5, 1, 0)).unwrap();
        assert_eq!(sl5.form(&e12, &e21), int(10));
        assert_eq!(build_so(9).unwrap().killing_scale(), &int(7));
        let tr = build("sl:5", FormKind::Trace).unwrap();
        assert_eq!(tr.form(&tr.element(&Mat::unit(5, 0, 1)).unwrap(), &tr.element(&Mat::unit(5, 1, 0)).unwrap()), int(1));
    }

    #[test]
    fn bracket_examples() {
        let sl2 = build_sl(2).unwrap();
        let e12 = sl2.element(&Mat::unit(2, 0, 1)).unwrap();
        let e21 = sl2.element(&Mat::unit(2, 1, 0)).unwrap();
        assert!(sl2.bracket(&e12, &e12).unwrap().is_zero());
        let h = sl2.bracket(&e12, &e21).unwrap();
        assert_eq!(h.matrix(), &diag(&[1, -1]));
        assert!(sl2.element(&Mat::identity(2)).is_err());
    }

    #[test]
    fn ad_and_centralizer() {
        let sl5 = build_sl(5).unwrap();
        assert!(sl5.ad_matrix(&sl5.zero()).is_zero());
        assert_eq!(sl5.centralizer(&sl5.zero()).dim(), 24);
        let reg = sl5.element(&diag(&[2, 1, 0, -1, -2])).unwrap();
        assert!(sl5.is_regular_semisimple(&reg));
        assert_eq!(sl5.centralizer(&reg).dim(), 4);
        let nil = sl5.element(&(&Mat::unit(5, 0, 1) + &Mat::unit(5, 1, 2))).unwrap();
        assert!(!sl5.is_regular_semisimple(&nil));
        // ad_h eigenvalues for h = diag(1,0,-1,1/2,-1/2)
        let h = sl5
            .element(&Mat::diag(&[int(1), int(0), int(-1), rat(1, 2), rat(-1, 2)]))
            .unwrap();
        let ad = sl5.ad_matrix(&h);
        let mut total = 0;
        for k in -4..=4 {
            total += ad.eigenspace(&rat(k, 2)).dim();
        }
        assert_eq!(total, 24);
    }

    #[test]
    fn jacobi_and_invariance() {
        for alg in [build_sl(3).unwrap(), build_so(5).unwrap()] {
            let d = alg.dim();
            let b: Vec<Element> = (0..d).map(|a| alg.basis_element(a)).collect();
            for i in 0..d {
                for j in 0..d {
                    let bij = alg.bracket(&b[i], &b[j]).unwrap();
                    for k in 0..d {
                        let t1 = alg.bracket_fast(&b[i], &alg.bracket_fast(&b[j], &b[k]));
                        let t2 = alg.bracket_fast(&b[j], &alg.bracket_fast(&b[k], &b[i]));
                        let t3 = alg.bracket_fast(&b[k], &bij);
                        assert!(alg.add(&alg.add(&t1, &t2), &t3).is_zero());
                        assert_eq!(alg.form(&bij, &b[k]), alg.form(&b[i], &alg.bracket_fast(&b[j], &b[k])));
                        assert_eq!(alg.form(&b[i], &b[k]), alg.form(&b[k], &b[i]));
                    }
                }
            }
            assert_eq!(alg.gram().rank(), d);
        }
    }

    #[test]
    fn killing_certificate_random_pairs() {
        for alg in [build_sl(4).unwrap(), build_so(8).unwrap(), build_so(9).unwrap()] {
            let mut rng = sampling::rng(0, sampling::stream::PROPERTY);
            for _ in 0..5 {
                let x = alg.from_coords(&sampling::random_vec(&mut rng, alg.dim()));
                let y = alg.from_coords(&sampling::random_vec(&mut rng, alg.dim()));
                let lhs = (&alg.ad_matrix(&x) * &alg.ad_matrix(&y)).trace();
                assert_eq!(lhs, alg.killing_scale() * x.matrix().trace_mul(y.matrix()));
            }
        }
    }

    #[test]
    fn so_closure() {
        let alg = build_so(8).unwrap();
        for i in 0..alg.dim() {
            for j in 0..alg.dim() {
                let c = alg.basis()[i].commutator(&alg.basis()[j]);
                assert!(alg.is_member(&c));
            }
        }
    }

    #[test]
    fn exponent_lists() {
        assert_eq!(build_sl(5).unwrap().exponents(), vec![1, 2, 3, 4]);
        assert_eq!(build_so(8).unwrap().exponents(), vec![1, 3, 3, 5]);
        assert_eq!(build_so(9).unwrap().exponents(), vec![1, 3, 5, 7]);
    }
}
