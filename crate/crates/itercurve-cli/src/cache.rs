//! JSON-lines value cache.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Constant,
    P1word,
    Curveword,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Key {
    pub kind: Kind,
    pub descriptor: String,
    pub precision: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: Key,
    pub value: String,
    pub err: String,
    pub schema_version: u32,
}

pub struct Cache {
    path: PathBuf,
    entries: HashMap<Key, CacheEntry>,
}

impl Cache {
    /// Path from `ITERCURVE_CACHE`, defaulting to `./.itercurve-cache`.
    pub fn default_path() -> PathBuf {
        std::env::var_os("ITERCURVE_CACHE")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".itercurve-cache"))
    }

    pub fn open(path: PathBuf) -> Cache {
        let mut entries = HashMap::new();
        if let Ok(f) = File::open(&path) {
            for (n, line) in BufReader::new(f).lines().enumerate() {
                let Ok(line) = line else { break };
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<CacheEntry>(&line) {
                    Ok(e) if e.schema_version == SCHEMA_VERSION => {
                        entries.entry(e.key.clone()).or_insert(e);
                    }
                    Ok(_) => eprintln!(
                        "warning: {}:{}: skipping entry with another schema version",
                        path.display(),
                        n + 1
                    ),
                    Err(_) => eprintln!(
                        "warning: {}:{}: skipping corrupt cache line",
                        path.display(),
                        n + 1
                    ),
                }
            }
        }
        Cache { path, entries }
    }

    pub fn get(&self, key: &Key) -> Option<&CacheEntry> {
        self.entries.get(key)
    }

    /// Append an entry; existing keys are never rewritten.
    pub fn put(&mut self, key: Key, value: String, err: String) {
        if self.entries.contains_key(&key) {
            return;
        }
        let e = CacheEntry {
            key: key.clone(),
            value,
            err,
            schema_version: SCHEMA_VERSION,
        };
        let line = serde_json::to_string(&e).expect("cache entries serialize") + "\n";
        match OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
        {
            Ok(mut f) => {
                if f.write_all(line.as_bytes()).is_err() {
                    eprintln!("warning: could not append to {}", self.path.display());
                }
            }
            Err(_) => eprintln!("warning: could not open {}", self.path.display()),
        }
        self.entries.insert(key, e);
    }
}
