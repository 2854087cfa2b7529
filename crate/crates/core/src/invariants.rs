//! Generators of the invariant ring: power traces and the Pfaffian.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::Result;
use crate::exact::{int, Mat, Rational};
use crate::liealg::{antidiagonal, Element, Family, LieAlgebra};
use crate::poly::interp_univariate_coeffs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    PowerTrace(u32),
    Pfaffian,
}

/// `P(X) = value(X) / scale`, homogeneous of degree `degree`.
#[derive(Debug, Clone)]
pub struct InvariantGenerator {
    pub label: String,
    pub degree: u32,
    pub kind: GeneratorKind,
    pub scale: Rational,
    form: Option<Mat>,
}

impl InvariantGenerator {
    pub fn power_trace(k: u32, scale: Rational) -> Self {
        InvariantGenerator { label: format!("tr^{k}"), degree: k, kind: GeneratorKind::PowerTrace(k), scale, form: None }
    }

    /// `Pf(S X)` for the antidiagonal form `S` of size `2k`.
    pub fn pfaffian(n: usize) -> Self {
        InvariantGenerator {
            label: "pf".into(),
            degree: (n / 2) as u32,
            kind: GeneratorKind::Pfaffian,
            scale: Rational::one(),
            form: Some(antidiagonal(n)),
        }
    }

    pub fn eval_mat(&self, x: &Mat) -> Rational {
        let v = match self.kind {
            GeneratorKind::PowerTrace(k) => x.pow(k - 1).trace_mul(x),
            GeneratorKind::Pfaffian => pfaffian(&(self.form.as_ref().expect("pfaffian form") * x)),
        };
        v / &self.scale
    }

    pub fn eval(&self, x: &Element) -> Rational {
        self.eval_mat(x.matrix())
    }

    /// Exponent `ν = degree − 1`.
    pub fn exponent(&self) -> u32 {
        self.degree - 1
    }
}

/// Pfaffian of an antisymmetric matrix by first-row expansion with memoization.
pub fn pfaffian(a: &Mat) -> Rational {
    let n = a.rows();
    if n % 2 == 1 {
        return Rational::zero();
    }
    assert!(n <= 62, "pfaffian size");
    fn go(a: &Mat, mask: u64, memo: &mut HashMap<u64, Rational>) -> Rational {
        if mask == 0 {
            return Rational::one();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut total = Rational::zero();
        let mut sign = true;
        let mut m = rest;
        while m != 0 {
            let j = m.trailing_zeros() as usize;
            m &= m - 1;
            let aij = &a[(i, j)];
            if !aij.is_zero() {
                let sub = go(a, rest & !(1 << j), memo);
                if sign {
                    total += aij * sub;
                } else {
                    total -= aij * sub;
                }
            }
            sign = !sign;
        }
        memo.insert(mask, total.clone());
        total
    }
    go(a, (1u64 << n) - 1, &mut HashMap::new())
}

/// Ordered generators with non-decreasing exponents.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    pub alg: Arc<LieAlgebra>,
    pub gens: Vec<InvariantGenerator>,
    gram_inverse: Mat,
}

/// Power traces (and the Pfaffian in even orthogonal rank), sorted by degree.
/// For sl(n) the quadratic generator is normalized to `tr(X²)/(2n)`.
pub fn generators(alg: Arc<LieAlgebra>) -> Result<QuotientMap> {
    let n = alg.ambient_size();
    let mut gens = match alg.family() {
        Family::A => (2..=n as u32)
            .map(|k| {
                let scale = if k == 2 { alg.killing_scale().clone() } else { Rational::one() };
                InvariantGenerator::power_trace(k, scale)
            })
            .collect::<Vec<_>>(),
        Family::B => (1..=(n / 2) as u32).map(|i| InvariantGenerator::power_trace(2 * i, Rational::one())).collect(),
        Family::D => {
            let mut g: Vec<_> =
                (1..(n / 2) as u32).map(|i| InvariantGenerator::power_trace(2 * i, Rational::one())).collect();
            g.push(InvariantGenerator::pfaffian(n));
            g
        }
    };
    gens.sort_by_key(|g| (g.degree, g.kind == GeneratorKind::Pfaffian));
    QuotientMap::new(alg, gens)
}

impl QuotientMap {
    pub fn new(alg: Arc<LieAlgebra>, gens: Vec<InvariantGenerator>) -> Result<Self> {
        let gram_inverse = alg.gram().inverse()?;
        Ok(QuotientMap { alg, gens, gram_inverse })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.gens.iter().map(|g| g.degree).collect()
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.gens.iter().map(InvariantGenerator::exponent).collect()
    }

    /// Element with the given directional derivatives along the basis.
    pub fn from_directional(&self, d: &[Rational]) -> Element {
        self.alg.from_coords(&self.gram_inverse.mul_vec(d))
    }

    /// `∇P(x)`, defined by `d/dt P(x + t q)|₀ = ⟨∇P(x), q⟩`.
    pub fn gradient(&self, i: usize, x: &Element) -> Element {
        self.shifted_gradients(i, x, None).pop().expect("nonempty")
    }

    /// Gradients of the λ-coefficients of `P_i(x + λK)`, indexed by the power
    /// of λ from 0 to `deg P_i`. Without `K` only the plain gradient is returned.
    pub fn shifted_gradients(&self, i: usize, x: &Element, k: Option<&Element>) -> Vec<Element> {
        let g = &self.gens[i];
        let deg = g.degree as i64;
        let alg = &self.alg;
        let lambdas: Vec<Rational> = if k.is_some() { (0..=deg).map(int).collect() } else { vec![int(0)] };
        // directional derivative along each basis vector at each λ
        let per_basis: Vec<Vec<Rational>> = (0..alg.dim())
            .into_par_iter()
            .map(|a| {
                let b = alg.basis_element(a);
                let samples_at = |lam: &Rational| {
                    let base = match k {
                        Some(k) => x.matrix() + &k.matrix().scale(lam),
                        None => x.matrix().clone(),
                    };
                    let samples: Vec<(Rational, Rational)> = (0..=deg)
                        .map(|t| {
                            let t = int(t);
                            (t.clone(), g.eval_mat(&(&base + &b.matrix().scale(&t))))
                        })
                        .collect();
                    interp_univariate_coeffs(&samples).expect("distinct abscissae")[1].clone()
                };
                let d: Vec<(Rational, Rational)> = lambdas.iter().map(|l| (l.clone(), samples_at(l))).collect();
                if k.is_some() {
                    interp_univariate_coeffs(&d).expect("distinct abscissae")
                } else {
                    vec![d[0].1.clone()]
                }
            })
            .collect();
        let ncoef = per_basis[0].len();
        (0..ncoef)
            .map(|j| {
                let d: Vec<Rational> = per_basis.iter().map(|v| v[j].clone()).collect();
                self.from_directional(&d)
            })
            .collect()
    }

    /// `dim span{∇P_i(x)}`.
    pub fn quotient_rank(&self, x: &Element) -> usize {
        let rows: Vec<Vec<Rational>> = (0..self.len()).map(|i| self.gradient(i, x).coords().to_vec()).collect();
        Mat::from_rows(rows).rank()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::liealg::{build_sl, build_so};
    use crate::sampling::{self, stream};

    fn random_element(alg: &LieAlgebra, seed: u64) -> Element {
        let mut r = sampling::rng(seed, stream::PROPERTY);
        alg.from_coords(&sampling::random_vec(&mut r, alg.dim()))
    }

    /// `I + t E` for an off-diagonal unit; conjugation by it preserves sl(n).
    fn unipotent(n: usize, i: usize, j: usize, t: i64) -> (Mat, Mat) {
        let e = Mat::unit(n, i, j);
        (&Mat::identity(n) + &e.scale(&int(t)), &Mat::identity(n) - &e.scale(&int(t)))
    }

    #[test]
    fn degrees_per_family() {
        let q = generators(Arc::new(build_sl(5).unwrap())).unwrap();
        assert_eq!(q.degrees(), vec![2, 3, 4, 5]);
        let q = generators(Arc::new(build_so(8).unwrap())).unwrap();
        assert_eq!(q.degrees(), vec![2, 4, 4, 6]);
        assert_eq!(q.gens[2].label, "pf");
        let q = generators(Arc::new(build_so(9).unwrap())).unwrap();
        assert_eq!(q.degrees(), vec![2, 4, 6, 8]);
        assert_eq!(q.exponents(), q.alg.exponents());
    }

    #[test]
    fn homogeneity_and_invariance() {
        for alg in [build_sl(4).unwrap(), build_so(8).unwrap(), build_so(7).unwrap()] {
            let q = generators(Arc::new(alg)).unwrap();
            let alg = &q.alg;
            for seed in 0..3 {
                let x = random_element(alg, seed);
                for g in &q.gens {
                    let v = g.eval(&x);
                    for t in [2, 3, -1] {
                        let scaled = g.eval_mat(&x.matrix().scale(&int(t)));
                        assert_eq!(scaled, &v * Rational::from_integer(t.into()).pow(g.degree as i32));
                    }
                    // conjugation by an ambient unipotent of the group
                    let n = alg.ambient_size();
                    let (gm, gi) = if alg.family() == Family::A {
                        unipotent(n, 0, n - 1, 2)
                    } else {
                        // exp of a nilpotent algebra element, exact since N² = 0 here
                        let nmat = (0..alg.dim())
                            .map(|a| alg.basis_element(a).matrix().clone())
                            .find(|m| (m * m).is_zero())
                            .unwrap();
                        (&Mat::identity(n) + &nmat, &Mat::identity(n) - &nmat)
                    };
                    let conj = &(&gm * x.matrix()) * &gi;
                    assert_eq!(g.eval_mat(&conj), v, "{} on {}", g.label, alg.descriptor());
                }
            }
        }
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        let alg = build_so(8).unwrap();
        let s = antidiagonal(8);
        for seed in 0..5 {
            let x = random_element(&alg, seed);
            let sx = &s * x.matrix();
            let pf = pfaffian(&sx);
            assert_eq!(&pf * &pf, sx.det());
        }
        let j = Mat::from_int_rows(&[&[0, 1], &[-1, 0]]);
        assert_eq!(pfaffian(&j), int(1));
    }

    #[test]
    fn gradients() {
        let q = generators(Arc::new(build_sl(5).unwrap())).unwrap();
        let alg = q.alg.clone();
        for seed in 0..5 {
            let x = random_element(&alg, seed);
            for i in 0..q.len() {
                let g = q.gradient(i, &x);
                assert!(alg.bracket(&g, &x).unwrap().is_zero());
            }
            // quadratic generator: <∇P, q> = tr(x q)/5
            let g = q.gradient(0, &x);
            let y = random_element(&alg, seed + 100);
            assert_eq!(alg.form(&g, &y), x.matrix().trace_mul(y.matrix()) * rat(1, 5));
        }
        let so8 = generators(Arc::new(build_so(8).unwrap())).unwrap();
        let alg = so8.alg.clone();
        let mut diag = vec![int(0); 8];
        for (i, v) in [1, 2, 3, 5].iter().enumerate() {
            diag[i] = int(*v);
            diag[7 - i] = int(-v);
        }
        let x = alg.element(&Mat::diag(&diag)).unwrap();
        assert!(alg.is_regular_semisimple(&x));
        let g = so8.gradient(2, &x);
        assert!(!g.is_zero());
        assert!(alg.bracket(&g, &x).unwrap().is_zero());
    }

    #[test]
    fn quotient_rank_examples() {
        let q = generators(Arc::new(build_sl(5).unwrap())).unwrap();
        let alg = q.alg.clone();
        let h = alg.element(&Mat::diag(&[int(4), int(2), int(0), int(-2), int(-4)])).unwrap();
        assert_eq!(q.quotient_rank(&h), 4);
        assert_eq!(q.quotient_rank(&alg.zero()), 0);
    }
}
