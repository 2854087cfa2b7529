//! Nilpotent orbits: sl2-triples from partitions, Dynkin gradings, weights,
//! cyclic elements and the opposite Cartan subalgebra.
//!
//! Triples use the halved normalization `[h, L1] = L1`, `[h, f] = -f`,
//! `[L1, f] = 2h`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, rat, Mat, Rational, Subspace};
use crate::liealg::{Element, Family, LieAlgebra};

/// Parts in non-increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidPartition { parts, reason: "parts must be positive".into() });
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    /// Parses "5,3,1".
    pub fn parse(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad partition {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn validate(&self, alg: &LieAlgebra) -> Result<()> {
        let fail = |reason: &str| Error::InvalidPartition { parts: self.parts.clone(), reason: reason.into() };
        if self.size() != alg.ambient_size() {
            return Err(fail(&format!("parts must sum to {}", alg.ambient_size())));
        }
        if alg.family() != Family::A {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for &p in &self.parts {
                *counts.entry(p).or_default() += 1;
            }
            if counts.iter().any(|(&p, &c)| p % 2 == 0 && c % 2 == 1) {
                return Err(fail("even parts need even multiplicity in so(n)"));
            }
        }
        Ok(())
    }

    pub fn descriptor(&self) -> String {
        self.parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// A nilpotent orbit representative with its triple and Dynkin grading.
#[derive(Debug, Clone)]
pub struct Sl2Data {
    pub alg: Arc<LieAlgebra>,
    pub partition: Partition,
    pub l1: Element,
    pub h: Element,
    pub f: Element,
    pub kappa: Rational,
    grading: BTreeMap<Rational, Subspace>,
    /// Columns: concatenated grading bases, used to split vectors by degree.
    grading_inverse: Mat,
    grading_order: Vec<Rational>,
    weights: Vec<Rational>,
    centralizer_l1: Subspace,
    centralizer_f: Subspace,
}

struct Triple {
    e: Mat,
    h: Mat,
    f: Mat,
}

/// Principal triple of gl(p) on `E_{i,i+1}`, with `h = diag((p-1)/2, …)`.
fn principal_gl(p: usize) -> Triple {
    let mut e = Mat::zeros(p, p);
    let mut f = Mat::zeros(p, p);
    let mut h = Mat::zeros(p, p);
    for i in 0..p {
        h[(i, i)] = rat(p as i64 - 1 - 2 * i as i64, 2);
        if i + 1 < p {
            e[(i, i + 1)] = int(1);
            f[(i + 1, i)] = int(((i + 1) * (p - 1 - i)) as i64);
        }
    }
    Triple { e, h, f }
}

/// Principal triple of so(J_p), p odd.
fn principal_so(p: usize) -> Triple {
    let k = (p - 1) / 2;
    let mut e = Mat::zeros(p, p);
    let mut f = Mat::zeros(p, p);
    let mut h = Mat::zeros(p, p);
    for i in 0..p {
        h[(i, i)] = int(k as i64 - i as i64);
        if i + 1 < p {
            let c = if i < k { 1 } else { -1 };
            e[(i, i + 1)] = int(c);
            f[(i + 1, i)] = int(((i + 1) * (p - 1 - i)) as i64 * c);
        }
    }
    Triple { e, h, f }
}

/// `X ↦ diag(X, −J Xᵀ J)`, embedding gl(p) into so(J_{2p}).
fn gl_into_so(x: &Mat) -> Mat {
    let p = x.rows();
    let j = crate::liealg::antidiagonal(p);
    let lower = -&(&(&j * &x.transpose()) * &j);
    let mut m = Mat::zeros(2 * p, 2 * p);
    for a in 0..p {
        for b in 0..p {
            m[(a, b)] = x[(a, b)].clone();
            m[(p + a, p + b)] = lower[(a, b)].clone();
        }
    }
    m
}

fn block_diag(blocks: &[Mat]) -> Mat {
    let n: usize = blocks.iter().map(Mat::rows).sum();
    let mut m = Mat::zeros(n, n);
    let mut o = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                m[(o + i, o + j)] = b[(i, j)].clone();
            }
        }
        o += b.rows();
    }
    m
}

fn triple_of_blocks(blocks: Vec<Triple>) -> Triple {
    let es: Vec<Mat> = blocks.iter().map(|t| t.e.clone()).collect();
    let hs: Vec<Mat> = blocks.iter().map(|t| t.h.clone()).collect();
    let fs: Vec<Mat> = blocks.iter().map(|t| t.f.clone()).collect();
    Triple { e: block_diag(&es), h: block_diag(&hs), f: block_diag(&fs) }
}

fn sl_triple(p: &Partition) -> Triple {
    triple_of_blocks(p.parts().iter().map(|&k| principal_gl(k)).collect())
}

/// so(n) triple: blocks are principal so(p) for odd parts and gl(p) pairs
/// for even parts, assembled in an S-orthogonal basis `P` with
/// `Pᵀ S P = blockdiag(±J)`.
fn so_triple(n: usize, p: &Partition) -> Result<Triple> {
    let unit = |i: usize| {
        let mut v = vec![Rational::zero(); n];
        v[i] = Rational::one();
        v
    };
    let mut odd = Vec::new();
    let mut even = Vec::new();
    for &k in p.parts() {
        if k % 2 == 1 {
            odd.push(k);
        } else {
            even.push(k);
        }
    }
    // hyperbolic pairs (i, n-1-i), innermost last
    let mut pairs: Vec<(Vec<Rational>, Vec<Rational>)> = (0..n / 2).map(|i| (unit(i), unit(n - 1 - i))).collect();
    let mut aniso: Vec<(Vec<Rational>, i64)> = Vec::new();
    if n % 2 == 1 {
        aniso.push((unit(n / 2), 1));
    }
    while aniso.len() < odd.len() {
        let (a, b) = pairs.pop().ok_or_else(|| Error::InvalidPartition {
            parts: p.parts().to_vec(),
            reason: "not enough hyperbolic pairs".into(),
        })?;
        let half = rat(1, 2);
        let v: Vec<Rational> = a.iter().zip(&b).map(|(x, y)| x + y * &half).collect();
        let w: Vec<Rational> = a.iter().zip(&b).map(|(x, y)| x - y * &half).collect();
        aniso.push((v, 1));
        aniso.push((w, -1));
    }
    let mut pairs = pairs.into_iter();
    let mut aniso = aniso.into_iter();
    let mut columns: Vec<Vec<Rational>> = Vec::new();
    let mut blocks = Vec::new();
    let mut expected_gram = Vec::new();
    for &k in &odd {
        let (v, sigma) = aniso.next().expect("anisotropic vector count");
        let hyp: Vec<_> = (0..(k - 1) / 2).map(|_| pairs.next().expect("pair count")).collect();
        let s = int(sigma);
        columns.extend(hyp.iter().map(|(a, _)| a.clone()));
        columns.push(v);
        columns.extend(hyp.iter().rev().map(|(_, b)| b.iter().map(|x| x * &s).collect()));
        blocks.push(principal_so(k));
        expected_gram.push(crate::liealg::antidiagonal(k).scale(&s));
    }
    for chunk in even.chunks(2) {
        let k = chunk[0];
        let hyp: Vec<_> = (0..k).map(|_| pairs.next().expect("pair count")).collect();
        columns.extend(hyp.iter().map(|(a, _)| a.clone()));
        columns.extend(hyp.iter().rev().map(|(_, b)| b.clone()));
        let t = principal_gl(k);
        blocks.push(Triple { e: gl_into_so(&t.e), h: gl_into_so(&t.h), f: gl_into_so(&t.f) });
        expected_gram.push(crate::liealg::antidiagonal(2 * k));
    }
    let pm = Mat::from_cols(n, &columns);
    let s = crate::liealg::antidiagonal(n);
    if &(&pm.transpose() * &s) * &pm != block_diag(&expected_gram) {
        return Err(Error::Invariant("orthogonal block basis is not adapted".into()));
    }
    let pinv = pm.inverse()?;
    let t = triple_of_blocks(blocks);
    let conj = |x: &Mat| &(&pm * x) * &pinv;
    Ok(Triple { e: conj(&t.e), h: conj(&t.h), f: conj(&t.f) })
}

/// sl2-triple for the orbit of the given partition.
pub fn sl2_from_partition(alg: Arc<LieAlgebra>, p: &Partition) -> Result<Sl2Data> {
    p.validate(&alg)?;
    let t = match alg.family() {
        Family::A => sl_triple(p),
        Family::B | Family::D => so_triple(alg.ambient_size(), p)?,
    };
    let l1 = alg.element(&t.e)?;
    let h = alg.element(&t.h)?;
    let f = alg.element(&t.f)?;
    Sl2Data::from_triple(alg, p.clone(), l1, h, f)
}

impl Sl2Data {
    /// Builds the orbit package from an explicit triple, checking its relations.
    pub fn from_triple(alg: Arc<LieAlgebra>, partition: Partition, l1: Element, h: Element, f: Element) -> Result<Self> {
        let hl = alg.bracket(&h, &l1)?;
        let hf = alg.bracket(&h, &f)?;
        let lf = alg.bracket(&l1, &f)?;
        if hl != l1 || hf != alg.scale(&f, &int(-1)) || lf != alg.scale(&h, &int(2)) {
            return Err(Error::Invariant("sl2 relations fail".into()));
        }
        let ad_h = alg.ad_matrix(&h);
        let bound = partition.parts()[0] as i64 - 1;
        let mut grading = BTreeMap::new();
        let mut found = 0;
        for k in -2 * bound..=2 * bound {
            let c = rat(k, 2);
            let sp = ad_h.eigenspace(&c);
            if sp.dim() > 0 {
                found += sp.dim();
                grading.insert(c, sp);
            }
        }
        if found != alg.dim() {
            return Err(Error::IncompleteDecomposition { found, dim: alg.dim() });
        }
        let kappa = grading.keys().next_back().cloned().unwrap_or_else(Rational::zero);
        let grading_order: Vec<Rational> = grading
            .iter()
            .flat_map(|(c, sp)| std::iter::repeat_n(c.clone(), sp.dim()))
            .collect();
        let cols: Vec<Vec<Rational>> = grading.values().flat_map(|sp| sp.basis().to_vec()).collect();
        let grading_inverse = Mat::from_cols(alg.dim(), &cols).inverse()?;
        let centralizer_l1 = alg.centralizer(&l1);
        let centralizer_f = alg.centralizer(&f);
        let dim_of = |c: &Rational| grading.get(c).map_or(0, Subspace::dim);
        let mut weights = Vec::new();
        for c in grading.keys().filter(|c| !c.is_negative()) {
            let mult = dim_of(c) - dim_of(&(c + int(1)));
            weights.extend(std::iter::repeat_n(c.clone(), mult));
        }
        let d = Sl2Data {
            alg,
            partition,
            l1,
            h,
            f,
            kappa,
            grading,
            grading_inverse,
            grading_order,
            weights,
            centralizer_l1,
            centralizer_f,
        };
        d.check_weight_sums()?;
        Ok(d)
    }

    fn check_weight_sums(&self) -> Result<()> {
        let total: Rational = self.weights.iter().map(|w| w * int(2) + int(1)).sum();
        if total != int(self.alg.dim() as i64) || self.weights.len() != self.centralizer_f.dim() {
            return Err(Error::Invariant("weight multiset inconsistent with dimensions".into()));
        }
        Ok(())
    }

    /// Nonzero eigenspaces of `ad_h`, keyed by eigenvalue.
    pub fn dynkin_grading(&self) -> &BTreeMap<Rational, Subspace> {
        &self.grading
    }

    pub fn graded_piece(&self, c: &Rational) -> Subspace {
        self.grading.get(c).cloned().unwrap_or_else(|| Subspace::zero(self.alg.dim()))
    }

    pub fn grading_dims(&self) -> Vec<(Rational, usize)> {
        self.grading.iter().map(|(c, s)| (c.clone(), s.dim())).collect()
    }

    /// Splits a coordinate vector into its homogeneous components.
    pub fn graded_components(&self, v: &[Rational]) -> BTreeMap<Rational, Vec<Rational>> {
        let c = self.grading_inverse.mul_vec(v);
        let mut out: BTreeMap<Rational, Vec<Rational>> = BTreeMap::new();
        let mut offset = 0;
        for (deg, sp) in &self.grading {
            let mut comp = vec![Rational::zero(); self.alg.dim()];
            for (k, b) in sp.basis().iter().enumerate() {
                let coef = &c[offset + k];
                if coef.is_zero() {
                    continue;
                }
                for (x, y) in comp.iter_mut().zip(b) {
                    *x += coef * y;
                }
            }
            offset += sp.dim();
            if comp.iter().any(|x| !x.is_zero()) {
                out.insert(deg.clone(), comp);
            }
        }
        debug_assert_eq!(offset, self.grading_order.len());
        out
    }

    /// Weights ew(L1), ascending.
    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn centralizer_l1(&self) -> &Subspace {
        &self.centralizer_l1
    }

    pub fn centralizer_f(&self) -> &Subspace {
        &self.centralizer_f
    }

    pub fn is_distinguished(&self) -> bool {
        self.graded_piece(&int(0)).dim() == self.graded_piece(&int(1)).dim()
    }

    pub fn is_even(&self) -> bool {
        self.grading.keys().all(|c| c.is_integer())
    }

    pub fn kappa_int(&self) -> Option<u32> {
        self.kappa.is_integer().then(|| self.kappa.to_integer().to_u32()).flatten()
    }

    /// First echelon basis vector of `g_{-κ}`: the minimal-degree shift.
    pub fn min_degree_k1(&self) -> Element {
        let piece = self.graded_piece(&-self.kappa.clone());
        self.alg.element_of(&piece.basis()[0])
    }

    /// Basis of `g^f` by `ad_h` eigenvalue ascending, then echelon order.
    pub fn slodowy_basis(&self) -> Vec<Element> {
        let mut out = Vec::new();
        for (c, sp) in &self.grading {
            if c.is_positive() {
                continue;
            }
            let piece = sp.intersect(&self.centralizer_f);
            out.extend(piece.basis().iter().map(|v| self.alg.element_of(v)));
        }
        out
    }
}

/// Outcome of [`classify`].
#[derive(Debug, Clone)]
pub struct Classification {
    pub distinguished: bool,
    pub semisimple_type: bool,
    pub k1: Option<Element>,
    pub candidates_tried: usize,
}

pub fn classify(d: &Sl2Data) -> Classification {
    let (k1, tried) = search_cyclic(d);
    Classification { distinguished: d.is_distinguished(), semisimple_type: k1.is_some(), k1, candidates_tried: tried }
}

/// Bounded search for `K1 ∈ g_{-κ}` with `L1 + K1` regular semisimple.
pub fn find_cyclic_k1(d: &Sl2Data) -> Result<Element> {
    search_cyclic(d).0.ok_or(Error::NotFound)
}

fn search_cyclic(d: &Sl2Data) -> (Option<Element>, usize) {
    let alg = &d.alg;
    let piece = d.graded_piece(&-d.kappa.clone());
    let basis: Vec<Element> = piece.basis().iter().map(|v| alg.element_of(v)).collect();
    let mut tried = 0;
    let mut test = |k: Element| {
        tried += 1;
        let y = alg.add(&d.l1, &k);
        alg.is_regular_semisimple(&y).then_some(k)
    };
    for b in &basis {
        if let Some(k) = test(b.clone()) {
            return (Some(k), tried);
        }
    }
    let coefs = [int(1), int(-1), int(2), int(-2)];
    let nb = basis.len();
    for size in 2..=3usize.min(nb) {
        for subset in combinations(nb, size) {
            let total = coefs.len().pow(size as u32);
            for code in 0..total {
                let mut k = alg.zero();
                let mut rest = code;
                for &idx in &subset {
                    let c = &coefs[rest % coefs.len()];
                    rest /= coefs.len();
                    k = alg.add(&k, &alg.scale(&basis[idx], c));
                }
                if let Some(k) = test(k) {
                    return (Some(k), tried);
                }
            }
        }
    }
    (None, tried)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// One basis vector `Y = L + K` of the opposite Cartan subalgebra.
#[derive(Debug, Clone)]
pub struct CartanVector {
    /// Exponent η: `L ∈ g_η`, `K ∈ g_{η-(κ+1)}`.
    pub eta: u32,
    pub y: Element,
    pub l: Element,
    pub k: Element,
}

#[derive(Debug, Clone)]
pub struct OppositeCartan {
    pub y1: Element,
    pub hprime: Subspace,
    /// `h′ ∩ ⊕_{d ≡ c} g_d` for residues `c ∈ [1, κ+1]`.
    pub residues: BTreeMap<u32, Subspace>,
    /// exx(L1), ascending.
    pub exponents: Vec<u32>,
    pub basis: Vec<CartanVector>,
    pub kappa: u32,
}

/// Opposite Cartan `h′ = g^{L1+K1}` split into w-eigenspaces.
///
/// `w = exp(2πi ad_h/(κ+1))` multiplies `g_d` by `ε^d`, so its eigenspaces
/// on `h′` are the intersections with residue classes of degrees; no
/// cyclotomic arithmetic is needed.
pub fn opposite_cartan(d: &Sl2Data, k1: &Element) -> Result<OppositeCartan> {
    let alg = &d.alg;
    let y1 = alg.add(&d.l1, k1);
    if !alg.is_regular_semisimple(&y1) {
        return Err(Error::NotRegularSemisimple);
    }
    let kappa = d
        .kappa_int()
        .filter(|_| d.is_even())
        .ok_or_else(|| Error::Normalization("grading is not integral".into()))?;
    let period = kappa as i64 + 1;
    let hprime = alg.centralizer(&y1);
    let mut residues = BTreeMap::new();
    let mut exponents = Vec::new();
    let mut basis = Vec::new();
    for c in 1..=period {
        let mut class = Subspace::zero(alg.dim());
        for (deg, sp) in d.dynkin_grading() {
            let dd = deg.to_integer().to_i64().unwrap();
            if (dd - c).rem_euclid(period) == 0 {
                class = class.sum(sp);
            }
        }
        let hc = hprime.intersect(&class);
        for v in hc.basis() {
            let comps = d.graded_components(v);
            let zero = || vec![Rational::zero(); alg.dim()];
            let l = comps.get(&int(c)).cloned().unwrap_or_else(zero);
            let k = comps.get(&int(c - period)).cloned().unwrap_or_else(zero);
            if comps.len() > 2 || comps.keys().any(|x| *x != int(c) && *x != int(c - period)) {
                return Err(Error::Invariant("opposite Cartan vector has stray degrees".into()));
            }
            basis.push(CartanVector {
                eta: c as u32,
                y: alg.element_of(v),
                l: alg.element_of(&l),
                k: alg.element_of(&k),
            });
        }
        exponents.extend(std::iter::repeat_n(c as u32, hc.dim()));
        residues.insert(c as u32, hc);
    }
    if exponents.len() != alg.rank() {
        return Err(Error::Invariant("w is not diagonalizable on h′".into()));
    }
    exponents.sort_unstable();
    Ok(OppositeCartan { y1, hprime, residues, exponents, basis, kappa })
}

/// Orders exx(L1) against exx(g) by `ν_i = η_i` (i ≤ s), `ν_i = η_i + κ + 1`
/// (i > s). Returns the ordering and `s`, or `None` when no such bijection
/// exists.
pub fn exponent_bijection(exx_l1: &[u32], nu: &[u32], kappa: u32) -> Option<(Vec<u32>, usize)> {
    let s = nu.iter().filter(|&&v| v <= kappa).count();
    let order: Vec<u32> = nu
        .iter()
        .enumerate()
        .map(|(i, &v)| if i < s { Some(v) } else { v.checked_sub(kappa + 1) })
        .collect::<Option<_>>()?;
    let mut a = order.clone();
    a.sort_unstable();
    let mut b = exx_l1.to_vec();
    b.sort_unstable();
    (a == b && order.iter().all(|&e| e >= 1)).then_some((order, s))
}

/// Partner index under `⟨Y_i, Y_{m−i+1}⟩`, `⟨Y_{m+i}, Y_{2m−i+1}⟩` (0-based).
pub fn cartan_partner(i: usize, m: usize) -> usize {
    if i < m {
        m - 1 - i
    } else {
        3 * m - 1 - i
    }
}

impl OppositeCartan {
    /// Rebuilds the basis in the given exponent order so the only nonzero
    /// pairings are `⟨Y_i, Y_partner(i)⟩ = κ + 1`, keeping `Y_1 = L1 + K1`.
    pub fn normalize(&self, d: &Sl2Data, order: &[u32]) -> Result<Vec<CartanVector>> {
        let alg = &d.alg;
        let r = order.len();
        if r % 2 == 1 || r != self.exponents.len() {
            return Err(Error::Normalization("rank must be even".into()));
        }
        let m = r / 2;
        let period = self.kappa + 1;
        let target = int(period as i64);
        for i in 0..r {
            if order[i] + order[cartan_partner(i, m)] != period {
                return Err(Error::Normalization(format!("partner exponents do not sum to {period}")));
            }
        }
        if order[0] != 1 {
            return Err(Error::Normalization("first exponent must be 1".into()));
        }
        let mut slots: Vec<Option<Vec<Rational>>> = vec![None; r];
        let mut done = vec![false; (period + 1) as usize];
        for c in 1..period {
            let c2 = period - c;
            if done[c as usize] {
                continue;
            }
            if !order.contains(&c) && !order.contains(&c2) {
                continue;
            }
            if c == c2 {
                return Err(Error::Normalization("self-paired residue class needs square roots".into()));
            }
            done[c as usize] = true;
            done[c2 as usize] = true;
            // the class holding index 0 goes first so Y_1 stays fixed
            let (c, c2) = if order[0] == c2 { (c2, c) } else { (c, c2) };
            let left: Vec<usize> = (0..r).filter(|&i| order[i] == c).collect();
            if left.is_empty() {
                continue;
            }
            let hc = &self.residues[&c];
            let hc2 = &self.residues[&c2];
            if hc.dim() != left.len() || hc2.dim() != left.len() {
                return Err(Error::Normalization("residue dimensions disagree with ordering".into()));
            }
            let mut a: Vec<Vec<Rational>> = Vec::new();
            if left[0] == 0 {
                a.push(self.y1.coords().to_vec());
            }
            for v in hc.basis() {
                if a.len() == left.len() {
                    break;
                }
                let mut trial = a.clone();
                trial.push(v.clone());
                if Subspace::from_spanning(alg.dim(), trial.clone()).dim() == trial.len() {
                    a = trial;
                }
            }
            let e = hc2.basis();
            let k = left.len();
            let mut g = Mat::zeros(k, k);
            for (p, av) in a.iter().enumerate() {
                for (q, ev) in e.iter().enumerate() {
                    g[(p, q)] = alg.form_coords(av, ev);
                }
            }
            let mt = g.inverse().map_err(|_| Error::Normalization("degenerate pairing on h′".into()))?.scale(&target);
            for (p, &i) in left.iter().enumerate() {
                let mut b = vec![Rational::zero(); alg.dim()];
                for (q, ev) in e.iter().enumerate() {
                    let coef = &mt[(q, p)];
                    if coef.is_zero() {
                        continue;
                    }
                    for (x, y) in b.iter_mut().zip(ev) {
                        *x += coef * y;
                    }
                }
                slots[i] = Some(a[p].clone());
                slots[cartan_partner(i, m)] = Some(b);
            }
        }
        slots
            .into_iter()
            .zip(order)
            .map(|(v, &eta)| {
                let v = v.ok_or_else(|| Error::Normalization("unfilled slot".into()))?;
                let comps = d.graded_components(&v);
                let zero = vec![Rational::zero(); alg.dim()];
                let l = comps.get(&int(eta as i64)).cloned().unwrap_or_else(|| zero.clone());
                let k = comps.get(&(int(eta as i64) - int(period as i64))).cloned().unwrap_or(zero);
                Ok(CartanVector { eta, y: alg.element_of(&v), l: alg.element_of(&l), k: alg.element_of(&k) })
            })
            .collect()
    }
}

/// Gram matrix `⟨Y_i, Y_j⟩`.
pub fn cartan_gram(alg: &LieAlgebra, ys: &[CartanVector]) -> Mat {
    let r = ys.len();
    let mut g = Mat::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            g[(i, j)] = alg.form(&ys[i].y, &ys[j].y);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_sl, build_so};

    fn orbit(alg: LieAlgebra, p: &str) -> Sl2Data {
        sl2_from_partition(Arc::new(alg), &Partition::parse(p).unwrap()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn sl5_matches_block_construction() {
        let d = orbit(build_sl(5).unwrap(), "3,2");
        let e = |i: usize, j: usize| Mat::unit(5, i - 1, j - 1);
        let l1 = &(&e(1, 2) + &e(2, 3)) + &e(4, 5);
        let h = Mat::diag(&[int(1), int(0), int(-1), rat(1, 2), rat(-1, 2)]);
        let f = &(&e(2, 1).scale(&int(2)) + &e(3, 2).scale(&int(2))) + &e(5, 4);
        assert_eq!(d.l1.matrix(), &l1);
        assert_eq!(d.h.matrix(), &h);
        assert_eq!(d.f.matrix(), &f);
        assert_eq!(d.kappa, int(2));
        assert_eq!(d.centralizer_l1().dim(), 8);
        assert_eq!(d.centralizer_f().dim(), 8);
        assert_eq!(d.graded_piece(&int(0)).dim(), 4);
        assert_eq!(d.graded_piece(&rat(1, 2)).dim(), 4);
        let mut w = [rat(2, 1), rat(3, 2), rat(3, 2), int(1), int(1), rat(1, 2), rat(1, 2), int(0)];
        w.sort();
        assert_eq!(d.weights(), &w[..]);
        assert!(!d.is_distinguished());
        assert_eq!(d.min_degree_k1().matrix(), &e(3, 1));
        assert!(find_cyclic_k1(&d).is_err());
        assert_eq!(d.slodowy_basis().len(), 8);
    }

    #[test]
    fn sl3_regular() {
        let d = orbit(build_sl(3).unwrap(), "3");
        assert_eq!(d.centralizer_l1().dim(), 2);
        assert!(d.is_distinguished());
        assert!(d.is_even());
        let c = classify(&d);
        assert!(c.distinguished && c.semisimple_type);
        let y = d.alg.add(&d.l1, c.k1.as_ref().unwrap());
        assert!(d.alg.is_regular_semisimple(&y));
        assert!(d.alg.is_regular_semisimple(&d.h));
    }

    #[test]
    fn so8_d4a1() {
        let d = orbit(build_so(8).unwrap(), "5,3");
        assert_eq!(d.kappa, int(3));
        assert_eq!(d.weights(), &ints(&[1, 1, 1, 2, 3, 3])[..]);
        assert_eq!(d.graded_piece(&int(0)).dim(), d.graded_piece(&int(1)).dim());
        assert!(d.is_even());
        let c = classify(&d);
        assert!(c.distinguished && c.semisimple_type);
        let k1 = c.k1.unwrap();
        let y = d.alg.add(&d.l1, &k1);
        assert_eq!(d.alg.centralizer(&y).dim(), 4);
        assert!(y.matrix().minpoly_squarefree());
        let oc = opposite_cartan(&d, &k1).unwrap();
        assert_eq!(oc.exponents, vec![1, 1, 3, 3]);
        let (order, s) = exponent_bijection(&oc.exponents, &d.alg.exponents(), 3).unwrap();
        assert_eq!(order, vec![1, 3, 3, 1]);
        assert_eq!(s, 3);
        let ys = oc.normalize(&d, &order).unwrap();
        assert_eq!(ys[0].y, oc.y1);
        let g = cartan_gram(&d.alg, &ys);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if j == cartan_partner(i, 2) { int(4) } else { int(0) };
                assert_eq!(g[(i, j)], expect, "gram ({i},{j})");
            }
        }
        for a in &ys {
            for b in &ys {
                assert!(d.alg.bracket(&a.y, &b.y).unwrap().is_zero());
            }
        }
        assert_eq!(d.slodowy_basis().len(), 6);
    }

    #[test]
    fn so9_b4a2() {
        let d = orbit(build_so(9).unwrap(), "5,3,1");
        assert_eq!(d.weights(), &ints(&[1, 1, 1, 1, 2, 2, 3, 3])[..]);
        assert!(d.is_distinguished());
        let k1 = find_cyclic_k1(&d).unwrap();
        let oc = opposite_cartan(&d, &k1).unwrap();
        assert_eq!(oc.exponents, vec![1, 1, 3, 3]);
        let (order, s) = exponent_bijection(&oc.exponents, &d.alg.exponents(), 3).unwrap();
        assert_eq!((order, s), (vec![1, 3, 1, 3], 2));
    }

    #[test]
    fn invalid_partitions() {
        let sl5 = Arc::new(build_sl(5).unwrap());
        assert!(sl2_from_partition(sl5, &Partition::parse("6").unwrap()).is_err());
        let so8 = Arc::new(build_so(8).unwrap());
        assert!(sl2_from_partition(so8.clone(), &Partition::parse("4,3,1").unwrap()).is_err());
        // even parts with even multiplicity are fine
        let d = sl2_from_partition(so8, &Partition::parse("2,2,1,1,1,1").unwrap()).unwrap();
        assert!(!d.is_distinguished());
        assert!(Partition::parse("3,x").is_err());
        assert!(Partition::new(vec![]).is_err());
    }

    #[test]
    fn triple_relations_hold_for_many_orbits() {
        let cases: Vec<(LieAlgebra, &str)> = vec![
            (build_sl(4).unwrap(), "2,2"),
            (build_sl(4).unwrap(), "3,1"),
            (build_so(7).unwrap(), "3,3,1"),
            (build_so(8).unwrap(), "3,3,1,1"),
            (build_so(8).unwrap(), "7,1"),
            (build_so(9).unwrap(), "4,4,1"),
            (build_so(9).unwrap(), "9"),
        ];
        for (alg, p) in cases {
            let d = orbit(alg, p);
            let total: Rational = d.weights().iter().map(|w| w * int(2) + int(1)).sum();
            assert_eq!(total, int(d.alg.dim() as i64));
            if d.is_distinguished() {
                assert!(d.is_even(), "{p}");
            }
            for x in d.slodowy_basis() {
                assert!(d.alg.bracket(&d.f, &x).unwrap().is_zero());
                let hx = d.alg.bracket(&d.h, &x).unwrap();
                let c = d.graded_components(x.coords());
                assert_eq!(c.len(), 1);
                let (deg, _) = c.into_iter().next().unwrap();
                assert_eq!(hx, d.alg.scale(&x, &deg));
            }
        }
    }
}
