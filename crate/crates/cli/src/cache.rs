//! On-disk JSON cache for bracket tables.
//!
//! Entries live in `<dir>/<key>.json` and carry a digest of their payload.
//! Unreadable or mismatching entries are reported and treated as misses.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Key over the identifying fields, independent of field order.
pub fn key_for(fields: &Value) -> String {
    let canonical = json!({ "fields": fields, "version": VERSION });
    sha256_hex(canonical.to_string().as_bytes())
}

pub enum Lookup {
    Hit(Value),
    Miss,
    Corrupt(String),
}

pub struct Cache {
    dir: PathBuf,
    audit_rate: f64,
    seed: u64,
}

impl Cache {
    pub fn new(dir: &Path, audit_rate: f64, seed: u64) -> std::io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Cache { dir: dir.to_path_buf(), audit_rate, seed })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Lookup {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => return Lookup::Corrupt(format!("{}: {e}", path.display())),
        };
        let entry: Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(e) => return Lookup::Corrupt(format!("{}: {e}", path.display())),
        };
        let payload = &entry["payload"];
        if entry["key"] != key || entry["version"] != VERSION {
            return Lookup::Corrupt(format!("{}: key or version mismatch", path.display()));
        }
        if entry["digest"] != sha256_hex(payload.to_string().as_bytes()) {
            return Lookup::Corrupt(format!("{}: digest mismatch", path.display()));
        }
        Lookup::Hit(payload.clone())
    }

    /// Writes via a temporary file in the same directory and renames it in place.
    pub fn store(&self, key: &str, payload: &Value) -> std::io::Result<()> {
        let entry = json!({
            "key": key,
            "version": VERSION,
            "digest": sha256_hex(payload.to_string().as_bytes()),
            "payload": payload,
        });
        write_atomic(&self.path(key), entry.to_string().as_bytes())
    }

    /// Deterministic per-key audit decision hitting about `audit_rate` of keys.
    pub fn should_audit(&self, key: &str) -> bool {
        let h = Sha256::digest(format!("audit:{}:{key}", self.seed).as_bytes());
        let x = u64::from_be_bytes(h[..8].try_into().expect("8 bytes"));
        (x as f64) < self.audit_rate * (u64::MAX as f64)
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}
