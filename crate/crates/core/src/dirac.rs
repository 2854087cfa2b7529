//! Transverse Poisson bracket on the slice through the unique covector
//! extension, and its symbolic reconstruction.
//!
//! For a covector `ξ ∈ g^{L1}` at `z ∈ Q` the extension is `v = ξ + w` with
//! `w ∈ [f, g]` and `[z + λK1, v] ∈ g^f`. The bracket of coordinate functions
//! is then `{u_i, u_j}(z) = ⟨z + λK1, [v_j, v_i]⟩`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::Zero;
use rayon::prelude::*;

use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::exact::{fmt_rational, int, rationals_to_strings, Mat, Rational, Subspace};
use crate::liealg::Element;
use crate::poly::{interp_quasihomogeneous, InterpConfig, PolyJson, SparsePoly};
use crate::sampling;
use crate::slice::SlodowySlice;

/// Which member of the pencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pencil {
    /// `B^Q`, the reduction at λ = 0.
    Transverse,
    /// `B^Q_{K1}`, the λ-linear part.
    Frozen,
}

impl Pencil {
    pub fn name(self) -> &'static str {
        match self {
            Pencil::Transverse => "transverse",
            Pencil::Frozen => "frozen",
        }
    }
}

type TableKey = (Vec<Rational>, Rational);

pub struct BracketContext {
    pub slice: Arc<SlodowySlice>,
    pub k1: Element,
    fg: Vec<Vec<Rational>>,
    im_rows: Mat,
    tables: Mutex<HashMap<TableKey, Arc<Mat>>>,
}

impl std::fmt::Debug for BracketContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BracketContext").field("k1", &self.k1).finish_non_exhaustive()
    }
}

/// λ values tried, in order, when extracting the frozen part.
const FROZEN_LAMBDAS: [i64; 4] = [1, 2, -1, 3];

fn image(alg: &crate::liealg::LieAlgebra, x: &Element) -> Subspace {
    let ad = alg.ad_matrix(x);
    Subspace::from_spanning(alg.dim(), (0..ad.cols()).map(|j| ad.col(j)).collect())
}

impl BracketContext {
    /// Certifies `g = g^{L1} ⊕ [f,g]` and `g = g^f ⊕ im ad_{L1}`.
    pub fn new(slice: Arc<SlodowySlice>, k1: Element) -> Result<Self> {
        let d = &slice.orbit;
        let alg = &d.alg;
        let fg = image(alg, &d.f);
        if !d.centralizer_l1().is_complement(&fg) {
            return Err(Error::Invariant("g^{L1} and [f,g] are not complementary".into()));
        }
        let iml = image(alg, &d.l1);
        if !d.centralizer_f().is_complement(&iml) {
            return Err(Error::Invariant("g^f and im ad_{L1} are not complementary".into()));
        }
        let n = d.centralizer_f().dim();
        let cols: Vec<Vec<Rational>> =
            d.centralizer_f().basis().iter().chain(iml.basis()).cloned().collect();
        let binv = Mat::from_cols(alg.dim(), &cols).inverse()?;
        let im_rows = Mat::from_rows(binv.row_vecs()[n..].to_vec());
        Ok(BracketContext { slice, k1, fg: fg.basis().to_vec(), im_rows, tables: Mutex::new(HashMap::new()) })
    }

    pub fn n(&self) -> usize {
        self.slice.n()
    }

    fn shifted_point(&self, u: &[Rational], lambda: &Rational) -> Element {
        let alg = &self.slice.orbit.alg;
        let z = self.slice.embed(u);
        if lambda.is_zero() {
            z
        } else {
            alg.add(&z, &alg.scale(&self.k1, lambda))
        }
    }

    /// Extensions `v` of the covectors `ξs` at `(u, λ)`, as coordinate vectors.
    pub fn extend_many(&self, u: &[Rational], lambda: &Rational, xis: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
        let alg = &self.slice.orbit.alg;
        let zp = self.shifted_point(u, lambda);
        let proj = |v: &[Rational]| {
            let b = alg.bracket_fast(&zp, &alg.from_coords(v));
            self.im_rows.mul_vec(b.coords())
        };
        let m = self.fg.len();
        let cols: Vec<Vec<Rational>> = self.fg.iter().map(|w| proj(w)).collect();
        let mat = Mat::from_cols(m, &cols);
        let rhs: Vec<Vec<Rational>> =
            xis.iter().map(|xi| proj(xi).into_iter().map(|x| -x).collect()).collect();
        let sols = mat.solve_unique(&rhs).map_err(|e| match e {
            Error::RankDeficient { .. } => Error::SingularExtension { lambda: lambda.clone() },
            e => e,
        })?;
        Ok(xis
            .iter()
            .zip(sols)
            .map(|(xi, c)| {
                let mut v = xi.clone();
                for (ck, w) in c.iter().zip(&self.fg) {
                    if ck.is_zero() {
                        continue;
                    }
                    for (a, b) in v.iter_mut().zip(w) {
                        *a += ck * b;
                    }
                }
                v
            })
            .collect())
    }

    pub fn extend_covector(&self, u: &[Rational], lambda: &Rational, xi: &Element) -> Result<Element> {
        let alg = &self.slice.orbit.alg;
        if !self.slice.orbit.centralizer_l1().contains(xi.coords()) {
            return Err(Error::Invariant("covector outside g^{L1}".into()));
        }
        let v = self.extend_many(u, lambda, &[xi.coords().to_vec()])?;
        Ok(alg.from_coords(&v[0]))
    }

    /// `{u_i, u_j}` at `(u, λ)`, cached.
    pub fn point_table(&self, u: &[Rational], lambda: &Rational) -> Result<Arc<Mat>> {
        let key = (u.to_vec(), lambda.clone());
        if let Some(t) = self.tables.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let alg = &self.slice.orbit.alg;
        let xis: Vec<Vec<Rational>> = self.slice.xis().iter().map(|x| x.coords().to_vec()).collect();
        let vs = self.extend_many(u, lambda, &xis)?;
        let zp = self.shifted_point(u, lambda);
        let vs: Vec<Element> = vs.iter().map(|v| alg.from_coords(v)).collect();
        let zv: Vec<Element> = vs.iter().map(|v| alg.bracket_fast(&zp, v)).collect();
        let n = self.n();
        let mut t = Mat::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let x = alg.form(&zv[j], &vs[i]);
                t[(j, i)] = -&x;
                t[(i, j)] = x;
            }
        }
        let t = Arc::new(t);
        self.tables.lock().unwrap().insert(key, t.clone());
        Ok(t)
    }

    /// Table of the requested pencil member at `u`.
    pub fn table(&self, u: &[Rational], which: Pencil) -> Result<Mat> {
        let t0 = self.point_table(u, &int(0))?;
        match which {
            Pencil::Transverse => Ok((*t0).clone()),
            Pencil::Frozen => {
                let mut last = None;
                for l in FROZEN_LAMBDAS {
                    let lam = int(l);
                    match self.point_table(u, &lam) {
                        Ok(tl) => return Ok((&*tl - &*t0).scale(&(int(1) / lam))),
                        Err(e @ Error::SingularExtension { .. }) => last = Some(e),
                        Err(e) => return Err(e),
                    }
                }
                Err(last.expect("at least one λ tried"))
            }
        }
    }

    /// Checks `T(λ) = T(0) + λ·T_frozen` at `u` for the given λ.
    pub fn pencil_is_linear(&self, u: &[Rational], lambda: &Rational) -> Result<bool> {
        let t0 = self.point_table(u, &int(0))?;
        let f = self.table(u, Pencil::Frozen)?;
        let tl = self.point_table(u, lambda)?;
        Ok(*tl == &*t0 + &f.scale(lambda))
    }

    /// `{F, G}(z) = ⟨z + λK1, [v_G, v_F]⟩` with `v` extending `dF = Σ ∂F/∂u_i ξ_i`.
    pub fn bracket_eval(&self, u: &[Rational], lambda: &Rational, f: &SparsePoly, g: &SparsePoly) -> Result<Rational> {
        let alg = &self.slice.orbit.alg;
        let covector = |p: &SparsePoly| {
            let mut v = vec![Rational::zero(); alg.dim()];
            for (d, xi) in p.gradient().iter().zip(self.slice.xis()) {
                let c = d.eval(u);
                if c.is_zero() {
                    continue;
                }
                for (a, b) in v.iter_mut().zip(xi.coords()) {
                    *a += &c * b;
                }
            }
            v
        };
        let vs = self.extend_many(u, lambda, &[covector(f), covector(g)])?;
        let zp = self.shifted_point(u, lambda);
        let vf = alg.from_coords(&vs[0]);
        let vg = alg.from_coords(&vs[1]);
        Ok(alg.form(&zp, &alg.bracket_fast(&vg, &vf)))
    }

    /// Evaluates `{F, G}` from the point table.
    pub fn bracket_at(&self, u: &[Rational], which: Pencil, f: &SparsePoly, g: &SparsePoly) -> Result<Rational> {
        let t = self.table(u, which)?;
        let df: Vec<Rational> = f.gradient().iter().map(|p| p.eval(u)).collect();
        let dg: Vec<Rational> = g.gradient().iter().map(|p| p.eval(u)).collect();
        Ok(quad(&t, &df, &dg))
    }

    pub fn kappa_plus_one(&self) -> Rational {
        &self.slice.orbit.kappa + int(1)
    }
}

/// `aᵀ T b`.
pub fn quad(t: &Mat, a: &[Rational], b: &[Rational]) -> Rational {
    let tb = t.mul_vec(b);
    a.iter().zip(&tb).filter(|(x, _)| !x.is_zero()).map(|(x, y)| x * y).sum()
}

/// Antisymmetric table of polynomial entries `{u_i, u_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyBracket {
    n: usize,
    entries: Vec<Vec<SparsePoly>>,
    /// Entries that needed a raised degree bound.
    pub anomalies: Vec<String>,
}

/// Reconstructs the table symbolically. Entry degrees are
/// `deg u_i + deg u_j − 1`, lowered by `κ + 1` for the frozen member.
pub fn bracket_table(ctx: &BracketContext, which: Pencil, cfg: &InterpConfig) -> Result<PolyBracket> {
    let s = &ctx.slice;
    let n = s.n();
    let shift = ctx.kappa_plus_one();
    let degree_of = |i: usize, j: usize| {
        let d = &s.degrees()[i] + &s.degrees()[j] - int(1);
        if which == Pencil::Frozen {
            d - &shift
        } else {
            d
        }
    };
    // prefill the shared first block of sample points
    let kmax = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| s.vars().monomials(&degree_of(i, j)).len())
        .max()
        .unwrap_or(0);
    let pts = sampling::points(cfg.seed, sampling::stream::INTERP, n, kmax + cfg.extra_points);
    pts.par_iter().for_each(|p| {
        let _ = ctx.table(p, which);
    });
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let results: Vec<Result<(SparsePoly, Option<String>)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let oracle = |u: &[Rational]| Ok(ctx.table(u, which)?[(i, j)].clone());
            let d = degree_of(i, j);
            match interp_quasihomogeneous(&d, s.vars(), oracle, cfg) {
                Ok(p) => Ok((p, None)),
                Err(Error::VerificationFailed { .. }) => {
                    let raised = &d + &shift;
                    let p = interp_quasihomogeneous(&raised, s.vars(), oracle, cfg)?;
                    let note = format!("entry ({},{}) needed degree {}", i + 1, j + 1, fmt_rational(&raised));
                    Ok((p, Some(note)))
                }
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut entries = vec![vec![SparsePoly::zero(n); n]; n];
    let mut anomalies = Vec::new();
    for (&(i, j), r) in pairs.iter().zip(results) {
        let (p, note) = r?;
        entries[j][i] = -&p;
        entries[i][j] = p;
        anomalies.extend(note);
    }
    Ok(PolyBracket { n, entries, anomalies })
}

impl PolyBracket {
    pub fn from_entries(entries: Vec<Vec<SparsePoly>>) -> Self {
        PolyBracket { n: entries.len(), entries, anomalies: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &SparsePoly {
        &self.entries[i][j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, p: SparsePoly) {
        self.entries[j][i] = -&p;
        self.entries[i][j] = p;
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.n).all(|i| self.entries[i][i].is_zero() && (0..self.n).all(|j| self.entries[i][j] == -&self.entries[j][i]))
    }

    pub fn eval(&self, u: &[Rational]) -> Mat {
        let mut m = Mat::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self.entries[i][j].eval(u);
            }
        }
        m
    }

    pub fn rank_at(&self, u: &[Rational]) -> usize {
        self.eval(u).rank()
    }

    /// `{F, G} = Σ ∂_iF ∂_jG {u_i, u_j}`.
    pub fn apply(&self, f: &SparsePoly, g: &SparsePoly) -> SparsePoly {
        let df = f.gradient();
        let dg = g.gradient();
        let mut out = SparsePoly::zero(self.n);
        for i in 0..self.n {
            if df[i].is_zero() {
                continue;
            }
            for j in 0..self.n {
                if dg[j].is_zero() || self.entries[i][j].is_zero() {
                    continue;
                }
                out = &out + &(&(&df[i] * &dg[j]) * &self.entries[i][j]);
            }
        }
        out
    }

    /// Matrix of brackets `{F_a, F_b}` of the given functions.
    pub fn pullback(&self, fs: &[SparsePoly]) -> Vec<Vec<SparsePoly>> {
        let m = fs.len();
        let mut out = vec![vec![SparsePoly::zero(self.n); m]; m];
        for a in 0..m {
            for b in a + 1..m {
                let p = self.apply(&fs[a], &fs[b]);
                out[b][a] = -&p;
                out[a][b] = p;
            }
        }
        out
    }

    /// Inverse of [`PolyBracket::to_json`].
    pub fn from_json(n: usize, entries: &[(usize, usize, PolyJson)]) -> Result<Self> {
        let mut t = PolyBracket::from_entries(vec![vec![SparsePoly::zero(n); n]; n]);
        for (i, j, p) in entries {
            if *i == 0 || *i >= *j || *j > n {
                return Err(Error::Parse(format!("bracket entry ({i},{j}) out of range")));
            }
            let p = SparsePoly::from_json(p)?;
            if p.nvars() != n {
                return Err(Error::Parse(format!("bracket entry ({i},{j}) has {} variables", p.nvars())));
            }
            t.set_entry(i - 1, j - 1, p);
        }
        Ok(t)
    }

    /// Upper-triangular entries `(i, j, poly)`, 1-based.
    pub fn to_json(&self, names: &[String]) -> Vec<(usize, usize, PolyJson)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .map(|(i, j)| (i + 1, j + 1, self.entries[i][j].to_json(names)))
            .collect()
    }
}

/// `{C, u_j} = 0` for every coordinate at every point.
pub fn casimir_check(ctx: &BracketContext, c: &SparsePoly, which: Pencil, seed: u64, points: &[Vec<Rational>]) -> Result<Certificate> {
    let mut cert = Certificate::new(&format!("casimir-{}", which.name()), seed, points);
    let grads = c.gradient();
    let rows: Vec<Result<Vec<Rational>>> = points
        .par_iter()
        .map(|u| {
            let t = ctx.table(u, which)?;
            let dc: Vec<Rational> = grads.iter().map(|p| p.eval(u)).collect();
            let n = ctx.n();
            Ok((0..n).map(|j| (0..n).map(|i| &dc[i] * &t[(i, j)]).sum()).collect())
        })
        .collect();
    for (u, r) in points.iter().zip(rows) {
        let r = r?;
        cert.pairs_checked += r.len();
        for (j, v) in r.iter().enumerate() {
            if !v.is_zero() {
                cert.fail(format!("{{C, u{}}} = {} at {:?}", j + 1, fmt_rational(v), rationals_to_strings(u)));
            }
        }
    }
    Ok(cert)
}

/// Cyclic Jacobi sum over all coordinate triples vanishes at each point.
pub fn jacobi_check(table: &PolyBracket, seed: u64, points: &[Vec<Rational>]) -> Certificate {
    let mut cert = Certificate::new("jacobi", seed, points);
    let n = table.n();
    let derivs: Vec<Vec<Vec<SparsePoly>>> =
        (0..n).map(|i| (0..n).map(|j| table.entry(i, j).gradient()).collect()).collect();
    for u in points {
        let pi = table.eval(u);
        let dpi: Vec<Vec<Vec<Rational>>> =
            derivs.iter().map(|r| r.iter().map(|g| g.iter().map(|p| p.eval(u)).collect()).collect()).collect();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut s = Rational::zero();
                    for l in 0..n {
                        s += &pi[(i, l)] * &dpi[j][k][l];
                        s += &pi[(j, l)] * &dpi[k][i][l];
                        s += &pi[(k, l)] * &dpi[i][j][l];
                    }
                    cert.pairs_checked += 1;
                    if !s.is_zero() {
                        cert.fail(format!("triple ({},{},{}) at {:?}", i + 1, j + 1, k + 1, rationals_to_strings(u)));
                    }
                }
            }
        }
    }
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::sampling::stream;

    fn sl5_ctx() -> BracketContext {
        let s = Arc::new(fixtures::sl5_slice().unwrap());
        let k1 = fixtures::sl5_k1(&s.orbit.alg).unwrap();
        BracketContext::new(s, k1).unwrap()
    }

    #[test]
    fn extension_basics() {
        let ctx = sl5_ctx();
        let alg = ctx.slice.orbit.alg.clone();
        let u = vec![int(0); 8];
        let v = ctx.extend_covector(&u, &int(0), &alg.zero()).unwrap();
        assert!(v.is_zero());
        for xi in ctx.slice.xis() {
            let v = ctx.extend_covector(&u, &int(0), xi).unwrap();
            let b = alg.bracket(&ctx.slice.orbit.l1, &v).unwrap();
            assert!(ctx.slice.orbit.centralizer_f().contains(b.coords()));
        }
    }

    #[test]
    fn pointwise_properties() {
        let ctx = sl5_ctx();
        let pts = sampling::points(0, stream::PROPERTY, 8, 3);
        let f = crate::poly::parse_poly("u1 u2 + 3 u5^2 - u7", &fixtures::u_vars()).unwrap();
        let g = crate::poly::parse_poly("u3^2 u8 + u4", &fixtures::u_vars()).unwrap();
        let h = crate::poly::parse_poly("u6 + u2 u3", &fixtures::u_vars()).unwrap();
        for u in &pts {
            assert!(ctx.bracket_eval(u, &int(0), &f, &f).unwrap().is_zero());
            let direct = ctx.bracket_eval(u, &int(0), &f, &g).unwrap();
            assert_eq!(direct, ctx.bracket_at(u, Pencil::Transverse, &f, &g).unwrap());
            // Leibniz
            let fg = &f * &g;
            let lhs = ctx.bracket_at(u, Pencil::Transverse, &fg, &h).unwrap();
            let rhs = f.eval(u) * ctx.bracket_at(u, Pencil::Transverse, &g, &h).unwrap()
                + g.eval(u) * ctx.bracket_at(u, Pencil::Transverse, &f, &h).unwrap();
            assert_eq!(lhs, rhs);
            assert!(ctx.pencil_is_linear(u, &int(2)).unwrap());
        }
    }

    #[test]
    fn jacobi_rejects_corruption() {
        let ctx = sl5_ctx();
        let t = bracket_table(&ctx, Pencil::Transverse, &InterpConfig::default()).unwrap();
        assert!(t.is_antisymmetric());
        let pts = sampling::points(0, stream::JACOBI, 8, 2);
        assert!(jacobi_check(&t, 0, &pts).passed());
        let mut bad = t.clone();
        let p = &bad.entry(4, 6).clone() + &SparsePoly::var(8, 1);
        bad.set_entry(4, 6, p);
        assert!(!jacobi_check(&bad, 0, &pts).passed());
    }
}
