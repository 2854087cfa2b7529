//! Report builders for each subcommand.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde_json::{json, Value};
use slodowy_core::argshift::{
    calibrate, count_s, family_t, independence_certificate, involution_certificate, labelled, shift_expand,
};
use slodowy_core::dirac::{jacobi_check, BracketContext, Pencil, PolyBracket};
use slodowy_core::exact::{fmt_rational, rationals_to_strings, Rational};
use slodowy_core::fixtures;
use slodowy_core::invariants::generators;
use slodowy_core::liealg::{Element, FormKind};
use slodowy_core::orbits::{classify, exponent_bijection, opposite_cartan, Sl2Data};
use slodowy_core::poly::{u_names, InterpConfig, PolyJson, SparsePoly};
use slodowy_core::sampling::{self, stream};
use slodowy_core::slice::{build_slice, SlodowySlice};
use slodowy_core::suites::{default_k1, orbit_from_descriptor, run_suite, w_table_match, OrbitRun, SUITES};
use slodowy_core::Error;

use crate::cache::{key_for, Cache, Lookup};

pub enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidAlgebra(_) | Error::InvalidPartition { .. } | Error::Parse(_) => Failure::Usage(e.to_string()),
            e => Failure::Internal(e.to_string()),
        }
    }
}

pub type Outcome = Result<(Value, bool), Failure>;

pub struct RunConfig {
    pub algebra: Option<String>,
    pub partition: Option<String>,
    pub form: FormKind,
    pub seed: u64,
    pub npoints: usize,
    pub lambda_max_degree: Option<usize>,
    pub cache: Option<Cache>,
    pub suite: Option<String>,
    pub paper_coords: bool,
}

impl RunConfig {
    fn interp(&self) -> InterpConfig {
        InterpConfig { seed: self.seed, ..InterpConfig::default() }
    }

    fn form_name(&self) -> &'static str {
        match self.form {
            FormKind::Killing => "killing",
            FormKind::Trace => "trace",
        }
    }

    fn descriptors(&self) -> Result<(String, String), Failure> {
        if self.paper_coords {
            let a = self.algebra.clone().unwrap_or_else(|| "sl:5".into());
            let p = self.partition.clone().unwrap_or_else(|| "3,2".into());
            if a.replace(' ', "") != "sl:5" || p.replace(' ', "") != "3,2" {
                return Err(Failure::Usage("--w-coords paper applies only to sl:5 with partition 3,2".into()));
            }
            return Ok((a, p));
        }
        match (&self.algebra, &self.partition) {
            (Some(a), Some(p)) => Ok((a.clone(), p.clone())),
            _ => Err(Failure::Usage("--algebra and --partition are required".into())),
        }
    }

    fn orbit(&self) -> Result<Arc<Sl2Data>, Failure> {
        if self.paper_coords {
            self.descriptors()?;
            return Ok(fixtures::sl5_orbit_with_form(self.form)?);
        }
        let (a, p) = self.descriptors()?;
        Ok(orbit_from_descriptor(&a, &p, self.form)?)
    }

    /// Slice and shift: the printed basis and `K1` with `--w-coords paper`, the
    /// deterministic basis and default `K1` otherwise.
    fn slice_and_k1(&self) -> Result<(Arc<SlodowySlice>, Element), Failure> {
        if self.paper_coords {
            self.descriptors()?;
            let s = Arc::new(fixtures::sl5_slice_with_form(self.form)?);
            let k1 = fixtures::sl5_k1(&s.orbit.alg)?;
            return Ok((s, k1));
        }
        let d = self.orbit()?;
        let k1 = default_k1(&d);
        Ok((Arc::new(build_slice(d)?), k1))
    }

    fn header(&self, command: &str, d: &Sl2Data) -> Value {
        json!({
            "command": command,
            "algebra": d.alg.descriptor(),
            "partition": d.partition.descriptor(),
            "form": self.form_name(),
            "seed": self.seed,
            "basis": if self.paper_coords { "paper" } else { "default" },
        })
    }
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Some(x), Value::Object(y)) = (a.as_object_mut(), b) {
        x.extend(y);
    }
    a
}

fn mat(e: &Element) -> Value {
    json!(e.matrix().to_strings())
}

fn poly(p: &SparsePoly, names: &[String]) -> Value {
    json!({ "text": p.display_with(names), "terms": p.to_json(names) })
}

fn strings(v: &[Rational]) -> Value {
    json!(rationals_to_strings(v))
}

pub fn orbit(cfg: &RunConfig) -> Outcome {
    let d = cfg.orbit()?;
    let c = classify(&d);
    let exx_g = d.alg.exponents();
    let s = count_s(&exx_g, &d.kappa);
    let mut exponents = json!({ "exx_g": exx_g, "s": s });
    if let Some(k1) = &c.k1 {
        match opposite_cartan(&d, k1) {
            Ok(oc) => {
                exponents["exx_l1"] = json!(oc.exponents);
                if let Some((order, s2)) = exponent_bijection(&oc.exponents, &exx_g, oc.kappa) {
                    exponents["order"] = json!(order);
                    exponents["s"] = json!(s2);
                }
            }
            Err(e) => exponents["exx_l1_error"] = json!(e.to_string()),
        }
    }
    let grading: Vec<Value> =
        d.grading_dims().iter().map(|(deg, dim)| json!({ "degree": fmt_rational(deg), "dim": dim })).collect();
    let body = json!({
        "triple": { "l1": mat(&d.l1), "h": mat(&d.h), "f": mat(&d.f) },
        "kappa": fmt_rational(&d.kappa),
        "grading": grading,
        "weights": strings(d.weights()),
        "distinguished": d.is_distinguished(),
        "even": d.is_even(),
        "semisimple_type": c.semisimple_type,
        "k1_search": {
            "found": c.k1.is_some(),
            "k1": c.k1.as_ref().map(mat),
            "candidates_tried": c.candidates_tried,
        },
        "exponents": exponents,
        "slice_dim": d.centralizer_f().dim(),
    });
    Ok((merge(cfg.header("orbit", &d), body), true))
}

pub fn slice(cfg: &RunConfig) -> Outcome {
    let (s, _) = cfg.slice_and_k1()?;
    let q = generators(s.orbit.alg.clone())?;
    let names = u_names(s.n());
    let mut gens = Vec::new();
    for g in &q.gens {
        let p = s.restrict(g, &cfg.interp())?;
        gens.push(json!({ "label": g.label, "degree": g.degree, "restriction": poly(&p, &names) }));
    }
    let body = json!({
        "n": s.n(),
        "degrees": strings(s.degrees()),
        "basis": s.xs().iter().map(mat).collect::<Vec<_>>(),
        "dual": s.is_dual(),
        "generators": gens,
    });
    let ok = s.is_dual();
    Ok((merge(cfg.header("slice", &s.orbit), body), ok))
}

fn tables_to_json(t: &PolyBracket, f: &PolyBracket, n: usize) -> Value {
    let names = u_names(n);
    json!({ "n": n, "transverse": t.to_json(&names), "frozen": f.to_json(&names) })
}

fn tables_from_json(v: &Value, n: usize) -> Option<(PolyBracket, PolyBracket)> {
    if v["n"].as_u64()? as usize != n {
        return None;
    }
    let read = |k: &str| -> Option<PolyBracket> {
        let entries: Vec<(usize, usize, PolyJson)> = serde_json::from_value(v[k].clone()).ok()?;
        PolyBracket::from_json(n, &entries).ok()
    };
    Some((read("transverse")?, read("frozen")?))
}

/// Runs the slice pipeline, reading and writing the bracket-table cache.
fn cached_run(cfg: &RunConfig, s: Arc<SlodowySlice>, k1: Element) -> Result<OrbitRun, Failure> {
    let d = &s.orbit;
    let Some(cache) = &cfg.cache else {
        return Ok(OrbitRun::new(s, k1, &cfg.interp())?);
    };
    let key = key_for(&json!({
        "algebra": d.alg.descriptor(),
        "partition": d.partition.descriptor(),
        "form": cfg.form_name(),
        "basis": if cfg.paper_coords { "paper" } else { "default" },
        "k1": rationals_to_strings(k1.coords()),
    }));
    let n = s.n();
    let cached = match cache.load(&key) {
        Lookup::Hit(v) => match tables_from_json(&v, n) {
            Some(t) => Some(t),
            None => {
                eprintln!("warning: cache entry {key} is malformed; recomputing");
                None
            }
        },
        Lookup::Miss => None,
        Lookup::Corrupt(why) => {
            eprintln!("warning: cache entry corrupted ({why}); recomputing");
            None
        }
    };
    let hit = cached.is_some();
    let run = OrbitRun::with_tables(s.clone(), k1.clone(), &cfg.interp(), cached)?;
    if hit && cache.should_audit(&key) {
        let fresh = OrbitRun::new(s, k1, &cfg.interp())?;
        if fresh.transverse != run.transverse || fresh.frozen != run.frozen {
            eprintln!("warning: cache audit of {key} found a stale entry; using fresh tables");
            store(cache, &key, &fresh);
            return Ok(fresh);
        }
        return Ok(run);
    }
    if !hit {
        store(cache, &key, &run);
    }
    Ok(run)
}

fn store(cache: &Cache, key: &str, run: &OrbitRun) {
    let payload = tables_to_json(&run.transverse, &run.frozen, run.slice.n());
    if let Err(e) = cache.store(key, &payload) {
        eprintln!("warning: could not write cache entry {key}: {e}");
    }
}

pub fn bracket(cfg: &RunConfig) -> Outcome {
    let (s, k1) = cfg.slice_and_k1()?;
    let run = cached_run(cfg, s, k1)?;
    let n = run.slice.n();
    let names = u_names(n);
    let seed = cfg.seed;
    let mut ok = true;
    let jp = sampling::points(seed, stream::JACOBI, n, cfg.npoints);
    let rp = sampling::points(seed, stream::RANK, n, 5);
    let mut members = serde_json::Map::new();
    for (which, table) in [(Pencil::Transverse, &run.transverse), (Pencil::Frozen, &run.frozen)] {
        let jac = jacobi_check(table, seed, &jp);
        ok &= jac.passed();
        let entries: Vec<Value> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !table.entry(i, j).is_zero())
            .map(|(i, j)| json!({ "i": i + 1, "j": j + 1, "poly": poly(table.entry(i, j), &names) }))
            .collect();
        let ranks: Vec<usize> = rp.iter().map(|u| table.rank_at(u)).collect();
        members.insert(
            which.name().into(),
            json!({ "entries": entries, "ranks": ranks, "jacobi": jac, "anomalies": table.anomalies }),
        );
    }
    let casimirs = run.casimirs(seed, cfg.npoints)?;
    ok &= casimirs.iter().all(|c| c.passed);
    let mut body = json!({
        "k1": mat(&run.ctx.k1),
        "n": n,
        "brackets": Value::Object(members),
        "casimirs": casimirs,
    });
    if cfg.paper_coords {
        let tm = w_table_match(&run);
        ok &= tm.passed();
        body["w_table"] = serde_json::to_value(&tm).expect("serializes");
    }
    Ok((merge(cfg.header("bracket", &run.slice.orbit), body), ok))
}

pub fn shift(cfg: &RunConfig) -> Outcome {
    let (s, k1) = cfg.slice_and_k1()?;
    let n = s.n();
    let names = u_names(n);
    let q = generators(s.orbit.alg.clone())?;
    let sf = shift_expand(s.clone(), k1.clone(), &q, &cfg.interp())?;
    let ctx = BracketContext::new(s.clone(), k1)?;
    let members = family_t(&sf);
    let printed: Option<Vec<(String, SparsePoly)>> = cfg
        .paper_coords
        .then(|| fixtures::sl5_family().into_iter().map(|(l, p)| (l.to_string(), p)).collect());
    let family = printed.clone().unwrap_or_else(|| labelled(&members));
    let mut coefficients = Vec::new();
    for (i, row) in sf.coeffs.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            if cfg.lambda_max_degree.is_some_and(|m| j > m) {
                continue;
            }
            coefficients.push(json!({ "label": format!("P{}^{j}", i + 1), "poly": poly(p, &names) }));
        }
    }
    let mut rank = 0;
    for u in sampling::points(cfg.seed, stream::RANK, n, 5) {
        rank = rank.max(ctx.table(&u, Pencil::Transverse)?.rank());
    }
    let expected = (2 * n - rank) / 2;
    let inv = involution_certificate(&family, &ctx, cfg.seed, cfg.npoints)?;
    let ind = independence_certificate(&family, n, cfg.seed, 5);
    let mut ok = inv.passed() && ind.passed() && family.len() == expected;
    let mut body = json!({
        "k1": mat(&ctx.k1),
        "kappa": fmt_rational(&s.orbit.kappa),
        "generators": q.gens.iter().map(|g| json!({ "label": g.label, "degree": g.degree })).collect::<Vec<_>>(),
        "gammas": sf.gammas(),
        "coefficients": coefficients,
        "family": family.iter().map(|(l, p)| json!({ "label": l, "poly": poly(p, &names) })).collect::<Vec<_>>(),
        "cardinality": { "size": family.len(), "expected": expected, "bracket_rank": rank },
        "involution": inv,
        "independence": ind,
    });
    if let Some(printed) = printed {
        let rows: Vec<(usize, usize, SparsePoly)> = printed
            .iter()
            .filter_map(|(l, p)| {
                let (g, j) = l.strip_prefix('P')?.split_once('^')?;
                Some((g.parse::<usize>().ok()? - 1, j.parse().ok()?, p.clone()))
            })
            .collect();
        match calibrate(&sf, &rows) {
            Ok(cal) => {
                let labels: Vec<String> = (1..=q.len()).map(|i| format!("P{i}")).collect();
                body["calibration"] =
                    json!(cal.iter().map(|c| json!({ "printed": labels[c.gen], "as": c.describe(&sf.labels) })).collect::<Vec<_>>());
            }
            Err(e) => {
                ok = false;
                body["calibration_error"] = json!(e.to_string());
            }
        }
    }
    Ok((merge(cfg.header("shift", &s.orbit), body), ok))
}

pub fn verify(cfg: &RunConfig) -> Outcome {
    let name = cfg
        .suite
        .as_deref()
        .ok_or_else(|| Failure::Usage(format!("--suite is required; one of {}", SUITES.join(", "))))?;
    if !SUITES.contains(&name) {
        return Err(Failure::Usage(format!("unknown suite {name}; one of {}", SUITES.join(", "))));
    }
    let r = run_suite(name, cfg.seed, cfg.form, cfg.npoints)?;
    let ok = r.passed;
    let v = merge(
        json!({ "command": "verify", "form": cfg.form_name() }),
        serde_json::to_value(&r).expect("serializes"),
    );
    Ok((v, ok))
}

/// Adds wall-clock time to a report.
pub fn timed(f: impl FnOnce() -> Outcome, timings: bool) -> Outcome {
    let start = Instant::now();
    let (mut v, ok) = f()?;
    if timings {
        v["runtime_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    Ok((v, ok))
}

pub fn cache_for(dir: Option<&Path>, rate: f64, seed: u64) -> Result<Option<Cache>, Failure> {
    dir.map(|d| Cache::new(d, rate, seed).map_err(|e| Failure::Usage(format!("cache dir {}: {e}", d.display()))))
        .transpose()
}
