//! On-disk store for expensive results, keyed by a hash of their inputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Bumped whenever the payload layout changes; older entries become misses.
pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    Stale,
    Corrupt,
}

impl Lookup {
    pub fn label(self) -> &'static str {
        match self {
            Lookup::Hit => "hit",
            Lookup::Miss => "miss",
            Lookup::Stale => "stale",
            Lookup::Corrupt => "CorruptCache",
        }
    }
}

pub struct Cache {
    dir: PathBuf,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Cache {
    pub fn from_env() -> Option<Cache> {
        std::env::var_os("ORBIQRR_CACHE").filter(|v| !v.is_empty()).map(Cache::new)
    }

    pub fn new(dir: impl AsRef<Path>) -> Cache {
        Cache { dir: dir.as_ref().to_path_buf() }
    }

    /// Content key of `(kind, inputs)`; `inputs` is serialized with sorted keys.
    pub fn key(kind: &str, inputs: &Value) -> String {
        let material = json!({ "kind": kind, "inputs": inputs, "schema": SCHEMA_VERSION });
        sha256_hex(material.to_string().as_bytes())
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> (Lookup, Option<Value>) {
        let Ok(text) = fs::read_to_string(self.path(key)) else {
            return (Lookup::Miss, None);
        };
        let Ok(entry) = serde_json::from_str::<Value>(&text) else {
            return (Lookup::Corrupt, None);
        };
        if entry.get("schema").and_then(Value::as_u64) != Some(SCHEMA_VERSION) {
            return (Lookup::Stale, None);
        }
        let (Some(payload), Some(digest)) = (entry.get("payload"), entry.get("sha256").and_then(Value::as_str)) else {
            return (Lookup::Corrupt, None);
        };
        if entry.get("key").and_then(Value::as_str) != Some(key) || sha256_hex(payload.to_string().as_bytes()) != digest {
            return (Lookup::Corrupt, None);
        }
        (Lookup::Hit, Some(payload.clone()))
    }

    pub fn store(&self, key: &str, payload: &Value) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let entry = json!({
            "schema": SCHEMA_VERSION,
            "key": key,
            "sha256": sha256_hex(payload.to_string().as_bytes()),
            "payload": payload,
        });
        let tmp = self.dir.join(format!("{key}.tmp"));
        fs::write(&tmp, entry.to_string())?;
        fs::rename(tmp, self.path(key))
    }

    /// Returns the cached payload or computes, stores and returns a fresh one.
    pub fn get_or_compute<E>(
        &self,
        kind: &str,
        inputs: &Value,
        compute: impl FnOnce() -> Result<Value, E>,
    ) -> Result<(Lookup, Value), E> {
        let key = Self::key(kind, inputs);
        let (status, found) = self.load(&key);
        if let Some(v) = found {
            return Ok((status, v));
        }
        let v = compute()?;
        if let Err(e) = self.store(&key, &v) {
            eprintln!("orbiqrr: could not write cache entry {}: {e}", self.path(&key).display());
        }
        Ok((status, v))
    }
}
