//! Slodowy slice `Q = L1 + g^f`, its graded coordinates and restrictions.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{int, Mat, Rational, Subspace};
use crate::invariants::InvariantGenerator;
use crate::liealg::Element;
use crate::orbits::Sl2Data;
use crate::poly::{interp_quasihomogeneous, GradedVars, InterpConfig, SparsePoly};

#[derive(Debug, Clone)]
pub struct SlodowySlice {
    pub orbit: Arc<Sl2Data>,
    xs: Vec<Element>,
    xis: Vec<Element>,
    degrees: Vec<Rational>,
    vars: GradedVars,
}

/// Slice with the deterministic basis of `g^f`.
pub fn build_slice(d: Arc<Sl2Data>) -> Result<SlodowySlice> {
    let xs = d.slodowy_basis();
    build_slice_with_basis(d, xs)
}

/// Slice with a caller-chosen basis of `g^f` made of `ad_h` eigenvectors.
pub fn build_slice_with_basis(d: Arc<Sl2Data>, xs: Vec<Element>) -> Result<SlodowySlice> {
    let alg = &d.alg;
    let n = d.centralizer_f().dim();
    if xs.len() != n {
        return Err(Error::Invariant(format!("slice basis has {} vectors, g^f has dimension {n}", xs.len())));
    }
    let mut degrees = Vec::with_capacity(n);
    for x in &xs {
        if !d.centralizer_f().contains(x.coords()) {
            return Err(Error::Invariant("slice basis vector outside g^f".into()));
        }
        let comps = d.graded_components(x.coords());
        let (c, _) = match comps.into_iter().collect::<Vec<_>>().as_slice() {
            [single] => single.clone(),
            _ => return Err(Error::Invariant("slice basis vector is not an ad_h eigenvector".into())),
        };
        degrees.push(int(1) - c);
    }
    if Subspace::from_spanning(alg.dim(), xs.iter().map(|x| x.coords().to_vec()).collect()).dim() != n {
        return Err(Error::Invariant("slice basis is dependent".into()));
    }
    let gl = d.centralizer_l1().basis();
    let mut pairing = Mat::zeros(n, n);
    for (a, e) in gl.iter().enumerate() {
        for (b, x) in xs.iter().enumerate() {
            pairing[(a, b)] = alg.form_coords(e, x.coords());
        }
    }
    let c = pairing.inverse().map_err(|_| Error::DegeneratePairing)?;
    let xis = (0..n)
        .map(|i| {
            let mut v = vec![Rational::zero(); alg.dim()];
            for (a, e) in gl.iter().enumerate() {
                let coef = &c[(i, a)];
                if coef.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(e) {
                    *x += coef * y;
                }
            }
            alg.from_coords(&v)
        })
        .collect();
    let vars = GradedVars::new(&degrees)?;
    Ok(SlodowySlice { orbit: d, xs, xis, degrees, vars })
}

impl SlodowySlice {
    pub fn n(&self) -> usize {
        self.xs.len()
    }

    pub fn xs(&self) -> &[Element] {
        &self.xs
    }

    /// Covectors `ξ_i ∈ g^{L1}` with `⟨ξ_i, X_j⟩ = δ_ij`.
    pub fn xis(&self) -> &[Element] {
        &self.xis
    }

    pub fn degrees(&self) -> &[Rational] {
        &self.degrees
    }

    pub fn vars(&self) -> &GradedVars {
        &self.vars
    }

    /// `L1 + Σ u_j X_j`.
    pub fn embed(&self, u: &[Rational]) -> Element {
        let alg = &self.orbit.alg;
        let mut c = self.orbit.l1.coords().to_vec();
        for (uj, x) in u.iter().zip(&self.xs) {
            if uj.is_zero() {
                continue;
            }
            for (a, b) in c.iter_mut().zip(x.coords()) {
                *a += uj * b;
            }
        }
        alg.from_coords(&c)
    }

    /// `u_i = ⟨ξ_i, x − L1⟩`.
    pub fn coords(&self, x: &Element) -> Vec<Rational> {
        let alg = &self.orbit.alg;
        let diff = alg.add(x, &alg.scale(&self.orbit.l1, &int(-1)));
        self.xis.iter().map(|xi| alg.form(xi, &diff)).collect()
    }

    /// `u ↦ f(embed(u))` reconstructed at the given graded degree.
    pub fn restrict_fn<F>(&self, degree: &Rational, f: F, cfg: &InterpConfig) -> Result<SparsePoly>
    where
        F: Fn(&Mat) -> Rational + Sync,
    {
        interp_quasihomogeneous(degree, &self.vars, |u| Ok(f(self.embed(u).matrix())), cfg)
    }

    /// Restriction of an invariant generator, quasihomogeneous of its degree.
    pub fn restrict(&self, g: &InvariantGenerator, cfg: &InterpConfig) -> Result<SparsePoly> {
        self.restrict_fn(&int(g.degree as i64), |m| g.eval_mat(m), cfg)
    }

    /// Exact Jacobian rank of polynomials at a point.
    pub fn jacobian_rank(polys: &[SparsePoly], u: &[Rational]) -> usize {
        if polys.is_empty() {
            return 0;
        }
        let rows: Vec<Vec<Rational>> =
            polys.iter().map(|p| p.gradient().iter().map(|d| d.eval(u)).collect()).collect();
        Mat::from_rows(rows).rank()
    }

    /// Coordinate function `u_i` as a polynomial.
    pub fn coordinate(&self, i: usize) -> SparsePoly {
        SparsePoly::var(self.n(), i)
    }

    /// Quasihomogeneous coordinates `t_1..t_n`: the given leading functions
    /// followed by slice coordinates completing them. Completion picks, for
    /// each missing degree, the first `u_j` of that degree that raises the
    /// Jacobian rank at the test point.
    pub fn complete_coordinates(&self, leading: &[SparsePoly], u: &[Rational]) -> Result<Vec<SparsePoly>> {
        let n = self.n();
        let mut needed: Vec<Rational> = self.degrees.clone();
        for p in leading {
            let d = p
                .graded_degree(&self.vars)
                .ok_or_else(|| Error::Invariant("coordinate function vanishes".into()))?;
            let pos = needed
                .iter()
                .position(|x| *x == d)
                .ok_or_else(|| Error::Invariant(format!("no slice degree {d} left for a leading function")))?;
            needed.remove(pos);
        }
        let mut out = leading.to_vec();
        let mut rank = Self::jacobian_rank(&out, u);
        for d in needed {
            let pick = (0..n).filter(|&j| self.degrees[j] == d).find(|&j| {
                let mut trial = out.clone();
                trial.push(self.coordinate(j));
                Self::jacobian_rank(&trial, u) > rank
            });
            match pick {
                Some(j) => {
                    out.push(self.coordinate(j));
                    rank += 1;
                }
                None => return Err(Error::RankDeficient { rank, expected: n }),
            }
        }
        if rank != n {
            return Err(Error::RankDeficient { rank, expected: n });
        }
        Ok(out)
    }

    /// Pairing matrix `⟨ξ_i, X_j⟩`; the identity by construction.
    pub fn pairing(&self) -> Mat {
        let alg = &self.orbit.alg;
        let n = self.n();
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = alg.form(&self.xis[i], &self.xs[j]);
            }
        }
        m
    }

    pub fn is_dual(&self) -> bool {
        self.pairing() == Mat::identity(self.n()) && self.xis.iter().all(|x| self.orbit.centralizer_l1().contains(x.coords()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::invariants::generators;
    use crate::liealg::build_so;
    use crate::orbits::{sl2_from_partition, Partition};
    use crate::sampling::{self, stream};

    #[test]
    fn sl5_golden_embedding() {
        let s = fixtures::sl5_slice().unwrap();
        assert!(s.is_dual());
        let u: Vec<Rational> = (1..=8).map(int).collect();
        assert_eq!(s.embed(&u).matrix(), &fixtures::sl5_slice_matrix(&u));
        assert_eq!(s.coords(&s.embed(&u)), u);
        let q = generators(s.orbit.alg.clone()).unwrap();
        let p1 = s.restrict(&q.gens[0], &InterpConfig::default()).unwrap();
        let expect = &SparsePoly::var(8, 0) + &SparsePoly::var(8, 5).pow(2).scale(&int(3));
        assert_eq!(p1, expect);
        let degs: Vec<Rational> = s.degrees().to_vec();
        use crate::exact::rat;
        assert_eq!(degs, vec![int(2), rat(5, 2), rat(3, 2), int(3), int(2), int(1), rat(5, 2), rat(3, 2)]);
    }

    #[test]
    fn so8_slice() {
        let alg = Arc::new(build_so(8).unwrap());
        let d = Arc::new(sl2_from_partition(alg, &Partition::parse("5,3").unwrap()).unwrap());
        let s = build_slice(d).unwrap();
        assert_eq!(s.n(), 6);
        assert!(s.is_dual());
        let mut degs = s.degrees().to_vec();
        degs.sort();
        assert_eq!(degs, [2, 2, 2, 3, 4, 4].iter().map(|&x| int(x)).collect::<Vec<_>>());
        let q = generators(s.orbit.alg.clone()).unwrap();
        let zero = vec![int(0); 6];
        for g in &q.gens {
            let p = s.restrict(g, &InterpConfig::default()).unwrap();
            assert_eq!(p.eval(&zero), int(0));
            let pts = sampling::points(3, stream::AGREEMENT, 6, 3);
            for u in pts {
                assert_eq!(p.eval(&u), g.eval(&s.embed(&u)));
            }
        }
    }

    #[test]
    fn basis_validation() {
        let s = fixtures::sl5_slice().unwrap();
        let mut xs = s.xs().to_vec();
        xs.swap(0, 1);
        assert!(build_slice_with_basis(s.orbit.clone(), xs.clone()).is_ok());
        xs[0] = s.orbit.l1.clone();
        assert!(build_slice_with_basis(s.orbit.clone(), xs).is_err());
    }
}
