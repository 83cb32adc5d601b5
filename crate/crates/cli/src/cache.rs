//! On-disk report cache keyed by input content and run options.

use std::path::PathBuf;

use bflab::report::{Report, RunConfig, SCHEMA};
use sha2::{Digest, Sha256};

pub struct Cache {
    dir: PathBuf,
}

fn default_dir() -> Option<PathBuf> {
    if let Some(x) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(x).join("bflab"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("bflab"))
}

impl Cache {
    /// None when no usable directory exists; the run then proceeds uncached.
    pub fn open(dir: Option<PathBuf>) -> Option<Cache> {
        let dir = dir.or_else(default_dir)?;
        std::fs::create_dir_all(&dir).ok()?;
        Some(Cache { dir })
    }

    pub fn get(&self, key: &str) -> Option<Report> {
        let text = std::fs::read_to_string(self.dir.join(format!("{key}.json"))).ok()?;
        Report::from_json(&text).ok()
    }

    /// Best effort: a failed write only costs a recomputation later.
    pub fn put(&self, key: &str, r: &Report) {
        let tmp = self.dir.join(format!("{key}.tmp{}", std::process::id()));
        if std::fs::write(&tmp, r.to_json()).is_ok() {
            let _ = std::fs::rename(&tmp, self.dir.join(format!("{key}.json")));
        }
    }
}

pub fn key(text: &str, prime: u64, cfg: &RunConfig, order_cap: usize) -> String {
    let mut h = Sha256::new();
    h.update(SCHEMA.as_bytes());
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    h.update((text.len() as u64).to_le_bytes());
    h.update(text.as_bytes());
    for x in [prime, cfg.seed, cfg.samples as u64, order_cap as u64] {
        h.update(x.to_le_bytes());
    }
    h.update([cfg.check as u8, cfg.thorough as u8, cfg.exhaustive as u8]);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
