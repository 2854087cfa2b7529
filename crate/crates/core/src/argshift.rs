//! Argument shift: λ-expansion of restricted invariants, the family T, its
//! involution and independence certificates, and the full-algebra baseline.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::certificate::Certificate;
use crate::dirac::{quad, BracketContext, Pencil};
use crate::error::{Error, Result};
use crate::exact::{fmt_rational, int, rationals_to_strings, Mat, Rational};
use crate::invariants::QuotientMap;
use crate::liealg::Element;
use crate::orbits::{sl2_from_partition, Partition};
use crate::poly::{interp_quasihomogeneous, interp_univariate_coeffs, InterpConfig, SparsePoly};
use crate::sampling::{self, stream};
use crate::slice::SlodowySlice;

/// `P_i(z + λK1) = Σ_j λ^j P̄_i^j(z)` for every generator.
#[derive(Debug, Clone)]
pub struct ShiftFamily {
    pub slice: Arc<SlodowySlice>,
    pub k1: Element,
    pub labels: Vec<String>,
    pub degrees: Vec<u32>,
    /// `coeffs[i][j] = P̄_i^j`, `j = 0..=deg P_i`; identically zero when absent.
    pub coeffs: Vec<Vec<SparsePoly>>,
}

/// A nonconstant coefficient `P̄_i^j` (0-based `i`).
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub gen: usize,
    pub j: usize,
    pub poly: SparsePoly,
}

impl Member {
    pub fn label(&self) -> String {
        format!("P{}^{}", self.gen + 1, self.j)
    }
}

/// Expands every generator along `K1` and reconstructs each λ-coefficient at
/// graded degree `deg P_i − j(κ+1)`.
pub fn shift_expand(slice: Arc<SlodowySlice>, k1: Element, q: &QuotientMap, cfg: &InterpConfig) -> Result<ShiftFamily> {
    let shift = &slice.orbit.kappa + int(1);
    let mut coeffs = Vec::with_capacity(q.len());
    for g in &q.gens {
        let deg = g.degree as i64;
        let cache: Mutex<HashMap<Vec<Rational>, Arc<Vec<Rational>>>> = Mutex::new(HashMap::new());
        let lambda_coeffs = |u: &[Rational]| -> Arc<Vec<Rational>> {
            if let Some(c) = cache.lock().unwrap().get(u) {
                return c.clone();
            }
            let z = slice.embed(u);
            let samples: Vec<(Rational, Rational)> = (0..=deg)
                .map(|l| {
                    let lam = int(l);
                    let m = z.matrix() + &k1.matrix().scale(&lam);
                    (lam, g.eval_mat(&m))
                })
                .collect();
            let c = Arc::new(interp_univariate_coeffs(&samples).expect("distinct abscissae"));
            cache.lock().unwrap().insert(u.to_vec(), c.clone());
            c
        };
        let mut row = Vec::with_capacity(deg as usize + 1);
        for j in 0..=deg as usize {
            let d = int(deg) - &shift * int(j as i64);
            let p = interp_quasihomogeneous(&d, slice.vars(), |u| Ok(lambda_coeffs(u)[j].clone()), cfg)?;
            row.push(p);
        }
        coeffs.push(row);
    }
    Ok(ShiftFamily {
        slice,
        k1,
        labels: q.gens.iter().map(|g| g.label.clone()).collect(),
        degrees: q.degrees(),
        coeffs,
    })
}

impl ShiftFamily {
    /// Top index with a nonconstant coefficient.
    pub fn gamma(&self, i: usize) -> usize {
        self.coeffs[i].iter().rposition(|p| !p.is_constant()).unwrap_or(0)
    }

    pub fn gammas(&self) -> Vec<usize> {
        (0..self.coeffs.len()).map(|i| self.gamma(i)).collect()
    }

    pub fn restriction(&self, i: usize) -> &SparsePoly {
        &self.coeffs[i][0]
    }

    pub fn top(&self, i: usize) -> &SparsePoly {
        &self.coeffs[i][self.gamma(i)]
    }

    /// `Σ λ^j P̄_i^j(u)`.
    pub fn eval_expansion(&self, i: usize, u: &[Rational], lambda: &Rational) -> Rational {
        let mut acc = Rational::zero();
        let mut pw = Rational::one();
        for c in &self.coeffs[i] {
            acc += c.eval(u) * &pw;
            pw *= lambda;
        }
        acc
    }
}

/// Deduplicated nonconstant coefficients, ordered by generator then power.
pub fn family_t(sf: &ShiftFamily) -> Vec<Member> {
    let mut out: Vec<Member> = Vec::new();
    for (i, row) in sf.coeffs.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            if p.is_constant() || out.iter().any(|m| m.poly == *p) {
                continue;
            }
            out.push(Member { gen: i, j, poly: p.clone() });
        }
    }
    out
}

pub fn check_cardinality(members: &[Member], expected: usize) -> Result<()> {
    if members.len() != expected {
        return Err(Error::CardinalityMismatch { found: members.len(), expected });
    }
    Ok(())
}

/// `s = #{ν_i ≤ κ}`.
pub fn count_s(exponents: &[u32], kappa: &Rational) -> usize {
    exponents.iter().filter(|&&v| int(v as i64) <= *kappa).count()
}

fn gradients_at(polys: &[&SparsePoly], u: &[Rational]) -> Vec<Vec<Rational>> {
    polys.iter().map(|p| p.gradient().iter().map(|d| d.eval(u)).collect()).collect()
}

/// `{F, G}(z) = 0` for all pairs under both pencil members.
pub fn involution_certificate(
    polys: &[(String, SparsePoly)],
    ctx: &BracketContext,
    seed: u64,
    npoints: usize,
) -> Result<Certificate> {
    let n = ctx.n();
    let points = sampling::points(seed, stream::INVOLUTION, n, npoints);
    let mut cert = Certificate::new("involution", seed, &points);
    let refs: Vec<&SparsePoly> = polys.iter().map(|(_, p)| p).collect();
    let results: Vec<Result<Vec<String>>> = points
        .par_iter()
        .map(|u| {
            let grads = gradients_at(&refs, u);
            let mut bad = Vec::new();
            for which in [Pencil::Transverse, Pencil::Frozen] {
                let t = ctx.table(u, which)?;
                for a in 0..refs.len() {
                    for b in a + 1..refs.len() {
                        let v = quad(&t, &grads[a], &grads[b]);
                        if !v.is_zero() {
                            bad.push(format!(
                                "{{{}, {}}}_{} = {} at {:?}",
                                polys[a].0,
                                polys[b].0,
                                which.name(),
                                fmt_rational(&v),
                                rationals_to_strings(u)
                            ));
                        }
                    }
                }
            }
            Ok(bad)
        })
        .collect();
    let pairs = refs.len() * refs.len().saturating_sub(1) / 2;
    for r in results {
        cert.pairs_checked += 2 * pairs;
        for w in r? {
            cert.fail(w);
        }
    }
    Ok(cert)
}

/// Jacobian of the family reaches rank `|T|` at some seeded point.
pub fn independence_certificate(polys: &[(String, SparsePoly)], nvars: usize, seed: u64, npoints: usize) -> Certificate {
    let points = sampling::points(seed, stream::INDEPENDENCE, nvars, npoints);
    let refs: Vec<&SparsePoly> = polys.iter().map(|(_, p)| p).collect();
    let mut best = 0;
    let mut used = Vec::new();
    for u in &points {
        used.push(u.clone());
        best = best.max(SlodowySlice::jacobian_rank(&polys.iter().map(|(_, p)| p.clone()).collect::<Vec<_>>(), u));
        if best == refs.len() {
            break;
        }
    }
    let mut cert = Certificate::new("independence", seed, &used);
    cert.pairs_checked = used.len();
    if best < refs.len() {
        cert.fail(format!("rank never reached {}: max rank {best}", refs.len()));
    }
    cert.with_detail(json!({ "functions": refs.len(), "max_rank": best }))
}

/// Labelled family members.
pub fn labelled(members: &[Member]) -> Vec<(String, SparsePoly)> {
    members.iter().map(|m| (m.label(), m.poly.clone())).collect()
}

/// Generator normalization matching printed λ-coefficients: each printed
/// `P_i` is solved for as a combination of generator monomials of its degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub gen: usize,
    /// `(generator indices of the monomial, coefficient)`.
    pub terms: Vec<(Vec<usize>, Rational)>,
}

impl Calibration {
    pub fn describe(&self, labels: &[String]) -> String {
        self.terms
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| {
                let mono: Vec<&str> = m.iter().map(|&g| labels[g].as_str()).collect();
                format!("{}*{}", fmt_rational(c), mono.join("*"))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn monomials_of_degree(degrees: &[u32], target: u32, start: usize) -> Vec<Vec<usize>> {
    if target == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for g in start..degrees.len() {
        if degrees[g] <= target {
            for mut rest in monomials_of_degree(degrees, target - degrees[g], g) {
                rest.insert(0, g);
                out.push(rest);
            }
        }
    }
    out
}

fn mul_series(a: &[SparsePoly], b: &[SparsePoly]) -> Vec<SparsePoly> {
    let n = a[0].nvars();
    let mut out = vec![SparsePoly::zero(n); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if !x.is_zero() && !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

/// Solves for each printed generator given its printed coefficients
/// `(gen, j, P̄^j)`; fails when no combination reproduces them all.
pub fn calibrate(sf: &ShiftFamily, printed: &[(usize, usize, SparsePoly)]) -> Result<Vec<Calibration>> {
    let mut gens: Vec<usize> = printed.iter().map(|(g, _, _)| *g).collect();
    gens.sort_unstable();
    gens.dedup();
    let mut out = Vec::new();
    for gi in gens {
        let target_deg = sf.degrees[gi];
        let monos = monomials_of_degree(&sf.degrees, target_deg, 0);
        let series: Vec<Vec<SparsePoly>> = monos
            .iter()
            .map(|m| {
                let mut s = sf.coeffs[m[0]].clone();
                for &g in &m[1..] {
                    s = mul_series(&s, &sf.coeffs[g]);
                }
                s
            })
            .collect();
        // one equation per (printed j, monomial in u)
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (_, j, p) in printed.iter().filter(|(g, _, _)| *g == gi) {
            let mut keys: Vec<Vec<u32>> = p.terms().map(|(e, _)| e.clone()).collect();
            for s in &series {
                if let Some(c) = s.get(*j) {
                    keys.extend(c.terms().map(|(e, _)| e.clone()));
                }
            }
            keys.sort();
            keys.dedup();
            for k in keys {
                rows.push(series.iter().map(|s| s.get(*j).map_or_else(Rational::zero, |c| c.coefficient(&k))).collect());
                rhs.push(p.coefficient(&k));
            }
        }
        let sol = Mat::from_rows(rows).solve(&rhs)?;
        out.push(Calibration { gen: gi, terms: monos.into_iter().zip(sol).collect() });
    }
    Ok(out)
}

/// Full-algebra Mishchenko–Fomenko check at a regular nilpotent with `K1 = h`.
#[derive(Debug, Clone)]
pub struct MfBaseline {
    pub functions: usize,
    pub target: usize,
    pub rank: usize,
    pub involution: Certificate,
    pub recursion: Certificate,
}

impl MfBaseline {
    pub fn passed(&self) -> bool {
        self.functions == self.target && self.rank == self.target && self.involution.passed() && self.recursion.passed()
    }
}

pub fn mf_baseline(q: &QuotientMap, seed: u64, involution_points: usize, recursion_points: usize) -> Result<MfBaseline> {
    let alg = q.alg.clone();
    let d = sl2_from_partition(alg.clone(), &Partition::new(vec![alg.ambient_size()])?)?;
    if d.centralizer_l1().dim() != alg.rank() {
        return Err(Error::Invariant("partition is not regular".into()));
    }
    let h = d.h.clone();
    let target: usize = q.exponents().iter().map(|&v| v as usize + 1).sum();
    // ∇P_i^j(x) for j = 0..=ν_i
    let shifted = |x: &Element| -> Vec<Vec<Element>> {
        (0..q.len())
            .map(|i| {
                let mut g = q.shifted_gradients(i, x, Some(&h));
                g.truncate(q.gens[i].exponent() as usize + 1);
                g
            })
            .collect()
    };
    let random = |stream_id: u64, k: usize| -> Vec<Element> {
        sampling::points(seed, stream_id, alg.dim(), k).into_iter().map(|c| alg.from_coords(&c)).collect()
    };
    let x0 = random(stream::FULL_ALGEBRA, 1).pop().expect("one point");
    let flat: Vec<Element> = shifted(&x0).into_iter().flatten().collect();
    let rank = Mat::from_rows(flat.iter().map(|g| g.coords().to_vec()).collect()).rank();

    let ipts = sampling::points(seed, stream::INVOLUTION, alg.dim(), involution_points);
    let mut involution = Certificate::new("mf-involution", seed, &ipts);
    for c in &ipts {
        let x = alg.from_coords(c);
        let grads: Vec<Element> = shifted(&x).into_iter().flatten().collect();
        for a in 0..grads.len() {
            for b in a + 1..grads.len() {
                let br = alg.bracket_fast(&grads[b], &grads[a]);
                involution.pairs_checked += 2;
                for (base, name) in [(&x, "lie-poisson"), (&h, "frozen")] {
                    let v = alg.form(base, &br);
                    if !v.is_zero() {
                        involution.fail(format!("{name} pair ({a},{b}) = {}", fmt_rational(&v)));
                    }
                }
            }
        }
    }

    let rpts = sampling::points(seed, stream::FULL_ALGEBRA + 1, alg.dim(), recursion_points);
    let mut recursion = Certificate::new("mf-recursion", seed, &rpts);
    for c in &rpts {
        let x = alg.from_coords(c);
        for (i, g) in shifted(&x).iter().enumerate() {
            let nu = q.gens[i].exponent() as usize;
            let mut check = |ok: bool, what: String| {
                recursion.pairs_checked += 1;
                if !ok {
                    recursion.fail(what);
                }
            };
            check(alg.bracket_fast(&g[0], &x).is_zero(), format!("[∇P{}(x), x] ≠ 0", i + 1));
            for j in 1..=nu {
                let s = alg.add(&alg.bracket_fast(&g[j], &x), &alg.bracket_fast(&g[j - 1], &h));
                check(s.is_zero(), format!("recursion P{} j={j}", i + 1));
            }
            check(alg.bracket_fast(&g[nu], &h).is_zero(), format!("[∇P{}^top, K1] ≠ 0", i + 1));
            check(g[nu] == q.gradient(i, &h), format!("∇P{}^top(x) ≠ ∇P{}(K1)", i + 1, i + 1));
        }
    }
    Ok(MfBaseline { functions: flat.len(), target, rank, involution, recursion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::invariants::generators;
    use crate::liealg::build_sl;

    #[test]
    fn sl5_expansion_and_calibration() {
        let s = Arc::new(fixtures::sl5_slice().unwrap());
        let k1 = fixtures::sl5_k1(&s.orbit.alg).unwrap();
        let q = generators(s.orbit.alg.clone()).unwrap();
        let sf = shift_expand(s.clone(), k1, &q, &InterpConfig::default()).unwrap();
        let fam = fixtures::sl5_family();
        assert_eq!(sf.coeffs[0][0], fam[0].1);
        // reconstruction agrees with direct evaluation
        for u in sampling::points(1, stream::AGREEMENT, 8, 4) {
            for i in 0..4 {
                let lam = int(3);
                let m = s.embed(&u).matrix() + &sf.k1.matrix().scale(&lam);
                assert_eq!(sf.eval_expansion(i, &u, &lam), q.gens[i].eval_mat(&m));
            }
        }
        assert_eq!(sf.gammas(), vec![0, 0, 1, 1]);
        let printed: Vec<(usize, usize, SparsePoly)> = fam
            .iter()
            .map(|(l, p)| {
                let g: usize = l[1..2].parse().unwrap();
                let j: usize = l[3..].parse().unwrap();
                (g - 1, j, p.clone())
            })
            .collect();
        let cal = calibrate(&sf, &printed).unwrap();
        assert_eq!(cal.len(), 4);
        assert_eq!(cal[0].terms, vec![(vec![0], int(1))]);
        let t = family_t(&sf);
        assert_eq!(t.len(), 6);
    }

    #[test]
    fn mf_sl3() {
        let q = generators(Arc::new(build_sl(3).unwrap())).unwrap();
        let r = mf_baseline(&q, 0, 3, 2).unwrap();
        assert_eq!((r.functions, r.target, r.rank), (5, 5, 5));
        assert!(r.passed(), "{:?} {:?}", r.involution.witnesses, r.recursion.witnesses);
    }

    #[test]
    fn degree_monomials() {
        assert_eq!(monomials_of_degree(&[2, 3, 4, 5], 4, 0), vec![vec![0, 0], vec![2]]);
        assert_eq!(monomials_of_degree(&[2, 3, 4, 5], 5, 0), vec![vec![0, 1], vec![3]]);
    }
}
