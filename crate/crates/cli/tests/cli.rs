use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn slodowy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slodowy")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn strs(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

#[test]
fn orbit_so8() {
    let out = slodowy(&["orbit", "--algebra", "so:8", "--partition", "5,3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(strs(&r["weights"]), ["1", "1", "1", "2", "3", "3"]);
    assert_eq!(r["distinguished"], true);
    assert_eq!(r["semisimple_type"], true);
    assert_eq!(r["exponents"]["exx_l1"], serde_json::json!([1, 1, 3, 3]));
    assert_eq!(r["exponents"]["s"], 3);
    assert_eq!(r["slice_dim"], 6);
}

#[test]
fn orbit_sl5_not_semisimple_type() {
    let out = slodowy(&["orbit", "--algebra", "sl:5", "--partition", "3,2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["semisimple_type"], false);
    assert_eq!(r["kappa"], "2");
    assert_eq!(r["k1_search"]["found"], false);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(slodowy(&["orbit", "--algebra", "sl:5", "--partition", "6"]).status.code(), Some(2));
    assert_eq!(slodowy(&["orbit", "--algebra", "gl:5", "--partition", "5"]).status.code(), Some(2));
    assert_eq!(slodowy(&["orbit", "--algebra", "sl:5"]).status.code(), Some(2));
    assert_eq!(slodowy(&["verify"]).status.code(), Some(2));
    assert_eq!(slodowy(&["verify", "--suite", "e8"]).status.code(), Some(2));
    assert_eq!(slodowy(&["orbit", "--form", "hermitian"]).status.code(), Some(2));
    assert_eq!(slodowy(&["bracket", "--w-coords", "paper", "--algebra", "so:8"]).status.code(), Some(2));
}

#[test]
fn sl5_printed_table() {
    let out = slodowy(&["bracket", "--w-coords", "paper", "--npoints", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let tm = &r["w_table"];
    assert_eq!(tm["mismatches"], serde_json::json!([]));
    assert_eq!(tm["listed_entries"], 14);
    assert!(tm["factor"].is_string());
    assert_eq!(r["brackets"]["transverse"]["ranks"], serde_json::json!([4, 4, 4, 4, 4]));
}

#[test]
fn so8_bracket_rank() {
    let out = slodowy(&["bracket", "--algebra", "so:8", "--partition", "5,3", "--npoints", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["brackets"]["transverse"]["ranks"], serde_json::json!([2, 2, 2, 2, 2]));
    assert_eq!(r["brackets"]["transverse"]["jacobi"]["outcome"], "pass");
}

#[test]
fn output_is_reproducible() {
    let args = ["shift", "--algebra", "sl:3", "--partition", "2,1", "--seed", "7"];
    let a = slodowy(&args);
    let b = slodowy(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!(r["seed"], 7);
    assert!(r["runtime_ms"].is_null());
    let t = report(&slodowy(&[&args[..], &["--timings"]].concat()));
    assert!(t["runtime_ms"].is_u64());
}

fn only_entry(dir: &Path) -> std::path::PathBuf {
    let entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1, "{entries:?}");
    entries[0].clone()
}

#[test]
fn cache_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let base = ["bracket", "--algebra", "sl:3", "--partition", "2,1", "--npoints", "5"];
    let fresh = slodowy(&base);
    let cold = slodowy(&[&base[..], &["--cache-dir", d]].concat());
    let warm = slodowy(&[&base[..], &["--cache-dir", d]].concat());
    assert_eq!(fresh.stdout, cold.stdout);
    assert_eq!(fresh.stdout, warm.stdout);
    assert!(warm.stderr.is_empty());

    let entry = only_entry(dir.path());
    let text = fs::read_to_string(&entry).unwrap();
    fs::write(&entry, &text[..text.len() / 2]).unwrap();
    let broken = slodowy(&[&base[..], &["--cache-dir", d]].concat());
    assert_eq!(broken.status.code(), Some(0));
    assert_eq!(fresh.stdout, broken.stdout);
    assert!(String::from_utf8_lossy(&broken.stderr).contains("corrupted"));
    // the recomputed entry replaced the broken one
    assert_eq!(fs::read_to_string(&entry).unwrap(), text);
}

#[test]
fn audit_catches_stale_entry() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let base = ["bracket", "--algebra", "sl:3", "--partition", "2,1", "--npoints", "5", "--cache-dir", d];
    let fresh = slodowy(&base);
    let entry = only_entry(dir.path());
    // drop one table entry and re-sign the payload so only an audit notices
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&entry).unwrap()).unwrap();
    let table = v["payload"]["transverse"].as_array_mut().unwrap();
    let idx = table.iter().position(|e| !e[2]["terms"].as_array().unwrap().is_empty()).unwrap();
    table[idx][2]["terms"] = serde_json::json!([]);
    v["digest"] = Value::String(hex::encode(Sha256::digest(v["payload"].to_string().as_bytes())));
    fs::write(&entry, v.to_string()).unwrap();

    let unaudited = slodowy(&[&base[..], &["--cache-audit-rate", "0"]].concat());
    assert_ne!(unaudited.stdout, fresh.stdout);
    let audited = slodowy(&[&base[..], &["--cache-audit-rate", "1"]].concat());
    assert_eq!(audited.stdout, fresh.stdout);
    assert!(String::from_utf8_lossy(&audited.stderr).contains("audit"));
}

#[test]
fn verify_suites_pass() {
    for suite in ["mf-sl3", "subregular-sl3", "paper-sl5"] {
        let out = slodowy(&["verify", "--suite", suite, "--npoints", "5"]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stdout));
        let r = report(&out);
        assert_eq!(r["passed"], true);
        assert!(r["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    }
}

#[test]
fn out_and_pretty() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = slodowy(&["slice", "--w-coords", "paper", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["generators"][0]["restriction"]["text"], "3*u6^2 + u1");
    assert_eq!(strs(&r["degrees"]), ["2", "5/2", "3/2", "3", "2", "1", "5/2", "3/2"]);
    let p = slodowy(&["verify", "--suite", "mf-sl3", "--pretty"]);
    let text = String::from_utf8(p.stdout).unwrap();
    assert!(text.contains("involution") && text.contains("PASS"));
}
