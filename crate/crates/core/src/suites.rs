//! End-to-end pipelines for one orbit and the named verification bundles
//! built on them.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};

use crate::argshift::{
    family_t, independence_certificate, involution_certificate, labelled, mf_baseline, shift_expand, ShiftFamily,
};
use crate::certificate::Certificate;
use crate::dirac::{bracket_table, casimir_check, jacobi_check, BracketContext, Pencil, PolyBracket};
use crate::error::{Error, Result};
use crate::exact::{fmt_rational, int, rationals_to_strings, Rational};
use crate::fixtures;
use crate::invariants::{generators, QuotientMap};
use crate::liealg::{build, Element, FormKind};
use crate::orbits::{
    cartan_gram, cartan_partner, classify, exponent_bijection, opposite_cartan, sl2_from_partition, Partition, Sl2Data,
};
use crate::poly::{parse_poly, InterpConfig, SparsePoly};
use crate::sampling::{self, stream};
use crate::slice::{build_slice, SlodowySlice};

pub const SUITES: [&str; 6] = ["paper-sl5", "d4a1", "b4a2", "mf-sl3", "mf-sl4", "subregular-sl3"];

/// One named pass/fail item of a suite.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: Value) -> Self {
        Check { name: name.into(), passed, detail }
    }

    fn from_cert(name: &str, c: &Certificate) -> Self {
        Check::new(name, c.passed(), serde_json::to_value(c).expect("certificate serializes"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64, checks: Vec<Check>) -> Self {
        SuiteReport { suite: suite.into(), seed, passed: checks.iter().all(|c| c.passed), checks }
    }
}

/// Everything computed for one orbit with a chosen shift `K1`.
pub struct OrbitRun {
    pub slice: Arc<SlodowySlice>,
    pub ctx: BracketContext,
    pub q: QuotientMap,
    pub shift: ShiftFamily,
    /// Functions tested for involution; the family T unless overridden.
    pub family: Vec<(String, SparsePoly)>,
    pub transverse: PolyBracket,
    pub frozen: PolyBracket,
}

/// Cyclic `K1` when the bounded search finds one, else the
/// minimal-degree candidate.
pub fn default_k1(d: &Sl2Data) -> Element {
    classify(d).k1.unwrap_or_else(|| d.min_degree_k1())
}

impl OrbitRun {
    pub fn new(slice: Arc<SlodowySlice>, k1: Element, cfg: &InterpConfig) -> Result<Self> {
        OrbitRun::with_tables(slice, k1, cfg, None)
    }

    /// As [`OrbitRun::new`], reusing previously computed
    /// `(transverse, frozen)` tables when given.
    pub fn with_tables(
        slice: Arc<SlodowySlice>,
        k1: Element,
        cfg: &InterpConfig,
        tables: Option<(PolyBracket, PolyBracket)>,
    ) -> Result<Self> {
        let q = generators(slice.orbit.alg.clone())?;
        let shift = shift_expand(slice.clone(), k1.clone(), &q, cfg)?;
        let family = labelled(&family_t(&shift));
        let ctx = BracketContext::new(slice.clone(), k1)?;
        let (transverse, frozen) = match tables {
            Some(t) => t,
            None => (bracket_table(&ctx, Pencil::Transverse, cfg)?, bracket_table(&ctx, Pencil::Frozen, cfg)?),
        };
        Ok(OrbitRun { slice, ctx, q, shift, family, transverse, frozen })
    }

    pub fn orbit(&self) -> &Arc<Sl2Data> {
        &self.slice.orbit
    }

    pub fn from_descriptor(algebra: &str, partition: &str, form: FormKind, cfg: &InterpConfig) -> Result<Self> {
        let d = orbit_from_descriptor(algebra, partition, form)?;
        let k1 = default_k1(&d);
        let slice = Arc::new(build_slice(d)?);
        OrbitRun::new(slice, k1, cfg)
    }

    /// The sl5 `[3,2]` example with its printed slice basis and family.
    pub fn sl5_printed(form: FormKind, cfg: &InterpConfig) -> Result<Self> {
        let slice = Arc::new(fixtures::sl5_slice_with_form(form)?);
        let k1 = fixtures::sl5_k1(&slice.orbit.alg)?;
        let mut run = OrbitRun::new(slice, k1, cfg)?;
        run.family = fixtures::sl5_family().into_iter().map(|(l, p)| (l.to_string(), p)).collect();
        Ok(run)
    }

    /// Largest transverse rank over the given points.
    pub fn bracket_rank(&self, points: &[Vec<Rational>]) -> usize {
        points.iter().map(|u| self.transverse.rank_at(u)).max().unwrap_or(0)
    }

    /// `½(dim Q + corank)` at a generic point.
    pub fn integrable_count(&self, rank: usize) -> usize {
        let n = self.slice.n();
        (2 * n - rank) / 2
    }

    pub fn casimirs(&self, seed: u64, npoints: usize) -> Result<Vec<Check>> {
        let pts = sampling::points(seed, stream::CASIMIR, self.slice.n(), npoints);
        let mut out = Vec::new();
        for i in 0..self.q.len() {
            let c0 = casimir_check(&self.ctx, self.shift.restriction(i), Pencil::Transverse, seed, &pts)?;
            out.push(Check::from_cert(&format!("casimir P{}^0 transverse", i + 1), &c0));
            let g = self.shift.gamma(i);
            let ct = casimir_check(&self.ctx, self.shift.top(i), Pencil::Frozen, seed, &pts)?;
            out.push(Check::from_cert(&format!("casimir P{}^{g} frozen", i + 1), &ct));
        }
        Ok(out)
    }
}

pub fn orbit_from_descriptor(algebra: &str, partition: &str, form: FormKind) -> Result<Arc<Sl2Data>> {
    let alg = Arc::new(build(algebra, form)?);
    let p = Partition::parse(partition)?;
    Ok(Arc::new(sl2_from_partition(alg, &p)?))
}

fn test_functions(n: usize) -> Result<[SparsePoly; 3]> {
    let names: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let last = names[n - 1];
    let prev = names[n - 2];
    Ok([
        parse_poly(&format!("u1 u2 + 3 {last}^2 - u3"), &names)?,
        parse_poly(&format!("u2^2 {last} + 2 u1 - {prev}"), &names)?,
        parse_poly(&format!("{prev} + u2 u3 - 5 u1^3"), &names)?,
    ])
}

/// Antisymmetry, Leibniz, Jacobi, pointwise/symbolic agreement and
/// quasihomogeneity for both members of the pencil.
pub fn property_gates(run: &OrbitRun, seed: u64) -> Result<Vec<Check>> {
    let n = run.slice.n();
    let vars = run.slice.vars();
    let ctx = &run.ctx;
    let mut out = Vec::new();

    let pts = sampling::points(seed, stream::PROPERTY, n, 3);
    let [f, g, h] = test_functions(n)?;
    let fg = &f * &g;
    let mut witnesses = Vec::new();
    for u in &pts {
        for lam in [int(0), int(2)] {
            let a = ctx.bracket_eval(u, &lam, &f, &g)?;
            let b = ctx.bracket_eval(u, &lam, &g, &f)?;
            if a != -b || !ctx.bracket_eval(u, &lam, &h, &h)?.is_zero() {
                witnesses.push(format!("antisymmetry at λ={lam} {:?}", rationals_to_strings(u)));
            }
            let lhs = ctx.bracket_eval(u, &lam, &fg, &h)?;
            let rhs = f.eval(u) * ctx.bracket_eval(u, &lam, &g, &h)? + g.eval(u) * ctx.bracket_eval(u, &lam, &f, &h)?;
            if lhs != rhs {
                witnesses.push(format!("leibniz at λ={lam} {:?}", rationals_to_strings(u)));
            }
        }
        if !ctx.pencil_is_linear(u, &int(2))? {
            witnesses.push(format!("pencil not linear in λ at {:?}", rationals_to_strings(u)));
        }
    }
    out.push(Check::new(
        "antisymmetry and leibniz",
        witnesses.is_empty() && run.transverse.is_antisymmetric() && run.frozen.is_antisymmetric(),
        json!({ "points": pts.len(), "witnesses": witnesses }),
    ));

    let jp = sampling::points(seed, stream::JACOBI, n, 5);
    out.push(Check::from_cert("jacobi transverse", &jacobi_check(&run.transverse, seed, &jp)));
    out.push(Check::from_cert("jacobi frozen", &jacobi_check(&run.frozen, seed, &jp)));

    let ap = sampling::points(seed, stream::AGREEMENT, n, 10);
    for (which, table) in [(Pencil::Transverse, &run.transverse), (Pencil::Frozen, &run.frozen)] {
        let mut cert = Certificate::new(&format!("agreement-{}", which.name()), seed, &ap);
        for u in &ap {
            let direct = ctx.table(u, which)?;
            let symbolic = table.eval(u);
            for i in 0..n {
                for j in i + 1..n {
                    cert.pairs_checked += 1;
                    if direct[(i, j)] != symbolic[(i, j)] {
                        cert.fail(format!("entry ({},{}) at {:?}", i + 1, j + 1, rationals_to_strings(u)));
                    }
                }
            }
        }
        out.push(Check::from_cert(&format!("pointwise agreement {}", which.name()), &cert));
    }

    let shift = ctx.kappa_plus_one();
    let mut bad = Vec::new();
    for (i, row) in run.shift.coeffs.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            let want = int(run.shift.degrees[i] as i64) - &shift * int(j as i64);
            if !p.is_zero() && p.graded_degree(vars) != Some(want.clone()) {
                bad.push(format!("P{}^{j} not of degree {}", i + 1, fmt_rational(&want)));
            }
        }
    }
    for (which, table) in [(Pencil::Transverse, &run.transverse), (Pencil::Frozen, &run.frozen)] {
        for i in 0..n {
            for j in i + 1..n {
                let p = table.entry(i, j);
                let mut want = &run.slice.degrees()[i] + &run.slice.degrees()[j] - int(1);
                if which == Pencil::Frozen {
                    want -= &shift;
                }
                if !p.is_zero() && p.graded_degree(vars) != Some(want) {
                    bad.push(format!("{} entry ({},{}) not quasihomogeneous", which.name(), i + 1, j + 1));
                }
            }
        }
    }
    out.push(Check::new("quasihomogeneity", bad.is_empty(), json!({ "witnesses": bad })));
    Ok(out)
}

/// Result of comparing `{w_i, w_j}` with the printed sl5 table.
#[derive(Debug, Clone, Serialize)]
pub struct TableMatch {
    /// Single factor with computed = factor × printed, when one exists.
    pub factor: Option<String>,
    pub listed_entries: usize,
    pub zero_entries: usize,
    pub mismatches: Vec<String>,
}

impl TableMatch {
    pub fn passed(&self) -> bool {
        self.factor.is_some() && self.mismatches.is_empty()
    }
}

/// Brackets of the `w` coordinates against the printed table, up to one
/// global rational factor.
pub fn w_table_match(run: &OrbitRun) -> TableMatch {
    let w = fixtures::sl5_w_coords();
    let computed = run.transverse.pullback(&w);
    let printed = fixtures::sl5_w_bracket();
    let mut factor: Option<Rational> = None;
    let mut mismatches = Vec::new();
    let m = w.len();
    for a in 0..m {
        for b in a + 1..m {
            let c = &computed[a][b];
            let Some((_, p)) = printed.iter().find(|(k, _)| *k == (a, b)) else {
                if !c.is_zero() {
                    mismatches.push(format!("{{w{}, w{}}} should vanish", a + 1, b + 1));
                }
                continue;
            };
            let p = p.compose(&w);
            let ratio = p.terms().next().map(|(e, v)| c.coefficient(e) / v);
            let Some(r) = ratio.filter(|r| !r.is_zero()) else {
                mismatches.push(format!("{{w{}, w{}}} vanishes", a + 1, b + 1));
                continue;
            };
            let f = factor.get_or_insert_with(|| r.clone());
            if *c != p.scale(f) {
                mismatches.push(format!("{{w{}, w{}}} differs beyond the factor {}", a + 1, b + 1, fmt_rational(f)));
            }
        }
    }
    let listed = printed.len();
    TableMatch {
        factor: factor.as_ref().map(fmt_rational),
        listed_entries: listed,
        zero_entries: m * (m - 1) / 2 - listed,
        mismatches,
    }
}

/// Opposite Cartan structure checks for a semisimple-type orbit.
pub fn cartan_checks(d: &Sl2Data) -> Result<Vec<Check>> {
    let alg = &d.alg;
    let mut out = Vec::new();
    let c = classify(d);
    let Some(k1) = c.k1 else {
        out.push(Check::new("cyclic K1", false, json!({ "candidates_tried": c.candidates_tried })));
        return Ok(out);
    };
    let y1 = alg.add(&d.l1, &k1);
    out.push(Check::new(
        "cyclic K1",
        alg.is_regular_semisimple(&y1),
        json!({ "k1": rationals_to_strings(k1.coords()), "candidates_tried": c.candidates_tried }),
    ));
    let oc = opposite_cartan(d, &k1)?;
    out.push(Check::new("exponents", true, json!({ "exx": oc.exponents })));
    let nu = alg.exponents();
    let Some((order, s)) = exponent_bijection(&oc.exponents, &nu, oc.kappa) else {
        out.push(Check::new("exponent bijection", false, json!({ "exx_g": nu })));
        return Ok(out);
    };
    out.push(Check::new("exponent bijection", true, json!({ "order": order, "s": s, "exx_g": nu })));
    let r = order.len();
    let m = r / 2;
    let period = int(oc.kappa as i64 + 1);
    // antidiagonal pattern: ⟨Y_i, Y_j⟩ = 0 unless η_i + η_j = κ + 1
    let raw: Vec<_> = oc.basis.clone();
    let g0 = cartan_gram(alg, &raw);
    let anti = (0..raw.len()).all(|i| {
        (0..raw.len()).all(|j| raw[i].eta + raw[j].eta == oc.kappa + 1 || g0[(i, j)].is_zero())
    });
    out.push(Check::new("antidiagonal gram", anti && g0.rank() == r, json!({ "rank": g0.rank() })));
    let ys = oc.normalize(d, &order)?;
    let g = cartan_gram(alg, &ys);
    let mut bad = Vec::new();
    for i in 0..r {
        for j in 0..r {
            let partner = j == cartan_partner(i, m);
            let want = if partner { period.clone() } else { int(0) };
            if g[(i, j)] != want {
                bad.push(format!("<Y{}, Y{}> = {}", i + 1, j + 1, fmt_rational(&g[(i, j)])));
            }
            let lk = alg.form(&ys[i].l, &ys[j].k);
            let want = if partner { int(ys[j].eta as i64) } else { int(0) };
            if lk != want {
                bad.push(format!("<L{}, K{}> = {}", i + 1, j + 1, fmt_rational(&lk)));
            }
        }
    }
    if ys[0].y != y1 {
        bad.push("Y1 is not L1 + K1".into());
    }
    out.push(Check::new("normalization identities", bad.is_empty(), json!({ "witnesses": bad })));
    Ok(out)
}

/// Orbit-level checks shared by the slice suites.
fn slice_suite(run: &OrbitRun, seed: u64, expect: Option<(usize, usize)>, npoints: usize) -> Result<Vec<Check>> {
    let n = run.slice.n();
    let mut out = Vec::new();
    let rank = run.bracket_rank(&sampling::points(seed, stream::RANK, n, 5));
    let count = run.integrable_count(rank);
    let fam_ok = run.family.len() == count;
    out.push(Check::new(
        "family size",
        fam_ok && expect.is_none_or(|(t, r)| t == run.family.len() && r == rank),
        json!({
            "functions": run.family.iter().map(|(l, _)| l).collect::<Vec<_>>(),
            "size": run.family.len(),
            "expected": count,
            "bracket_rank": rank,
        }),
    ));
    let ind = independence_certificate(&run.family, n, seed, 5);
    out.push(Check::from_cert("independence", &ind));
    let inv = involution_certificate(&run.family, &run.ctx, seed, npoints)?;
    out.push(Check::from_cert("involution", &inv));
    out.extend(run.casimirs(seed, npoints)?);
    out.extend(property_gates(run, seed)?);
    Ok(out)
}

fn quotient_rank_check(run: &OrbitRun, expected: usize) -> Check {
    let r = run.q.quotient_rank(&run.orbit().l1);
    Check::new("quotient rank at L1", r == expected, json!({ "rank": r, "expected": expected }))
}

/// Runs a named bundle.
pub fn run_suite(name: &str, seed: u64, form: FormKind, npoints: usize) -> Result<SuiteReport> {
    let cfg = InterpConfig { seed, ..InterpConfig::default() };
    let checks = match name {
        "paper-sl5" => {
            let run = OrbitRun::sl5_printed(form, &cfg)?;
            let mut checks = golden_sl5(&run)?;
            checks.extend(slice_suite(&run, seed, Some((6, 4)), npoints)?);
            checks
        }
        "d4a1" => {
            let run = OrbitRun::from_descriptor("so:8", "5,3", form, &cfg)?;
            let mut checks = cartan_checks(run.orbit())?;
            checks.push(quotient_rank_check(&run, 3));
            checks.extend(slice_suite(&run, seed, Some((5, 2)), npoints)?);
            checks
        }
        "b4a2" => {
            let run = OrbitRun::from_descriptor("so:9", "5,3,1", form, &cfg)?;
            let mut checks = vec![quotient_rank_check(&run, 2)];
            checks.extend(slice_suite(&run, seed, Some((6, 4)), npoints)?);
            checks
        }
        "mf-sl3" | "mf-sl4" => {
            let desc = if name == "mf-sl3" { "sl:3" } else { "sl:4" };
            let q = generators(Arc::new(build(desc, form)?))?;
            let r = mf_baseline(&q, seed, npoints.min(10), 3)?;
            vec![
                Check::new(
                    "function count",
                    r.functions == r.target && r.rank == r.target,
                    json!({ "functions": r.functions, "target": r.target, "rank": r.rank }),
                ),
                Check::from_cert("involution", &r.involution),
                Check::from_cert("recursion", &r.recursion),
            ]
        }
        "subregular-sl3" => {
            let run = OrbitRun::from_descriptor("sl:3", "2,1", form, &cfg)?;
            subregular_checks(&run, seed, npoints)?
        }
        other => return Err(Error::Parse(format!("unknown suite {other}; expected one of {}", SUITES.join(", ")))),
    };
    Ok(SuiteReport::new(name, seed, checks))
}

/// Embedding, restriction and printed-table checks for sl5 `[3,2]`.
pub fn golden_sl5(run: &OrbitRun) -> Result<Vec<Check>> {
    let s = &run.slice;
    let pts = sampling::points(0, stream::VERIFY, s.n(), 5);
    let embed_ok = pts.iter().all(|u| s.embed(u).matrix() == &fixtures::sl5_slice_matrix(u));
    let p1 = s.restrict(&run.q.gens[0], &InterpConfig::default())?;
    let p1_expect = parse_poly("u1 + 3 u6^2", &fixtures::u_vars())?;
    let tm = w_table_match(run);
    Ok(vec![
        Check::new("embedding", embed_ok, json!({ "points": pts.len() })),
        Check::new("P1 restriction", p1 == p1_expect, json!({ "P1": p1.display_with(&crate::poly::u_names(8)) })),
        Check::new("w bracket table", tm.passed(), serde_json::to_value(&tm).expect("serializes")),
    ])
}

/// Casimirs and bracket rank on the subregular sl3 slice.
pub fn subregular_checks(run: &OrbitRun, seed: u64, npoints: usize) -> Result<Vec<Check>> {
    let n = run.slice.n();
    let mut checks = Vec::new();
    let pts = sampling::points(seed, stream::CASIMIR, n, npoints);
    for i in 0..run.q.len() {
        let c = casimir_check(&run.ctx, run.shift.restriction(i), Pencil::Transverse, seed, &pts)?;
        checks.push(Check::from_cert(&format!("casimir P{}^0 transverse", i + 1), &c));
    }
    let rank = run.bracket_rank(&sampling::points(seed, stream::RANK, n, 5));
    checks.push(Check::new("bracket rank", rank == 2, json!({ "rank": rank, "dim": n })));
    checks.extend(property_gates(run, seed)?);
    Ok(checks)
}
