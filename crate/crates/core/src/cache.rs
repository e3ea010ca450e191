//! Content-addressed on-disk store for computed `Q_n`.
//!
//! Entries live at `<root>/v1/<first two hex>/<sha256>.json`. The key covers
//! the surface, bundle linearizations, sizes, mode and the code version, but
//! not the specialization seed: the summed value does not depend on it.
//! Writes go through a temporary file and an atomic rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::localization::{Mode, QResult};
use crate::toric::{BundleTuple, SurfaceKind};

/// Environment variable naming the cache root.
pub const CACHE_ENV: &str = "VW_CACHE_DIR";
const LAYOUT: &str = "v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CacheError {
    #[error("cache I/O at {path}: {message}")]
    Io { path: String, message: String },
    #[error("corrupt cache entry {0}")]
    Corrupt(String),
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CacheError {
    CacheError::Io { path: path.display().to_string(), message: e.to_string() }
}

#[derive(Serialize)]
struct KeyMaterial<'a> {
    surface: SurfaceKind,
    bundles: &'a BundleTuple,
    n: &'a [u32],
    mode: Mode,
    version: &'static str,
}

/// Hex sha256 identifying a computation.
pub fn cache_key(surface: SurfaceKind, bundles: &BundleTuple, n: &[u32], mode: Mode) -> String {
    let material = KeyMaterial { surface, bundles, n, mode, version: env!("CARGO_PKG_VERSION") };
    let bytes = serde_json::to_vec(&material).expect("key material serializes");
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cache {
    root: PathBuf,
}

/// Outcome of a garbage-collection pass.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GcReport {
    pub kept: usize,
    pub removed: usize,
    pub corrupt: usize,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    /// Root from [`CACHE_ENV`], if set and non-empty.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(Cache::new)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.root.join(LAYOUT).join(&key[..2]).join(format!("{key}.json"))
    }

    pub fn get(
        &self,
        surface: SurfaceKind,
        bundles: &BundleTuple,
        n: &[u32],
        mode: Mode,
    ) -> Result<Option<QResult>, CacheError> {
        let path = self.path_for(&cache_key(surface, bundles, n, mode));
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io_err(&path, e)),
        };
        match serde_json::from_str::<QResult>(&text) {
            Ok(q) if q.surface == surface && &q.bundles == bundles && q.n == n && q.mode == mode => Ok(Some(q)),
            _ => {
                log::warn!("discarding corrupt cache entry {}", path.display());
                let _ = fs::remove_file(&path);
                Ok(None)
            }
        }
    }

    pub fn put(&self, q: &QResult) -> Result<PathBuf, CacheError> {
        let path = self.path_for(&cache_key(q.surface, &q.bundles, &q.n, q.mode));
        let dir = path.parent().expect("entry has a parent");
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(dir, e))?;
        let body = serde_json::to_vec_pretty(q).map_err(|e| io_err(&path, e))?;
        tmp.write_all(&body).map_err(|e| io_err(&path, e))?;
        tmp.persist(&path).map_err(|e| io_err(&path, e.error))?;
        Ok(path)
    }

    fn entries(&self) -> Vec<PathBuf> {
        let base = self.root.join(LAYOUT);
        let Ok(shards) = fs::read_dir(&base) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for shard in shards.flatten() {
            if let Ok(files) = fs::read_dir(shard.path()) {
                out.extend(files.flatten().map(|f| f.path()));
            }
        }
        out.sort();
        out
    }

    pub fn len(&self) -> usize {
        self.entries().iter().filter(|p| p.extension().is_some_and(|e| e == "json")).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drop unreadable entries, stale temporaries, and entries older than
    /// `max_age` if given.
    pub fn gc(&self, max_age: Option<Duration>) -> Result<GcReport, CacheError> {
        let mut report = GcReport::default();
        let now = SystemTime::now();
        for path in self.entries() {
            let is_json = path.extension().is_some_and(|e| e == "json");
            let parsed = is_json
                && fs::read_to_string(&path).ok().and_then(|t| serde_json::from_str::<QResult>(&t).ok()).is_some();
            let old = match (max_age, fs::metadata(&path).and_then(|m| m.modified())) {
                (Some(age), Ok(t)) => now.duration_since(t).map(|d| d > age).unwrap_or(false),
                _ => false,
            };
            if !parsed || old {
                fs::remove_file(&path).map_err(|e| io_err(&path, e))?;
                if parsed {
                    report.removed += 1;
                } else {
                    report.corrupt += 1;
                }
            } else {
                report.kept += 1;
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::RationalFunction;
    use crate::toric::ToricSurface;

    fn sample(n: Vec<u32>, seed: u64) -> QResult {
        let s = ToricSurface::new(SurfaceKind::P2);
        QResult {
            surface: s.kind,
            bundles: BundleTuple::lift(&s, &[vec![1]]),
            n,
            mode: Mode::Refined,
            seed,
            value: RationalFunction::laurent(&[(1, 1), (-1, 1)]),
        }
    }

    #[test]
    fn round_trip_and_layout() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let q = sample(vec![1, 0], 4);
        assert!(cache.get(q.surface, &q.bundles, &q.n, q.mode).unwrap().is_none());
        let path = cache.put(&q).unwrap();
        let key = cache_key(q.surface, &q.bundles, &q.n, q.mode);
        assert_eq!(path, dir.path().join("v1").join(&key[..2]).join(format!("{key}.json")));
        assert_eq!(cache.get(q.surface, &q.bundles, &q.n, q.mode).unwrap(), Some(q.clone()));
        assert_eq!(cache.len(), 1);
    }

    #[test]
    fn key_ignores_seed_but_not_inputs() {
        let a = sample(vec![1, 0], 1);
        let b = sample(vec![1, 0], 2);
        let c = sample(vec![0, 1], 1);
        let k = |q: &QResult| cache_key(q.surface, &q.bundles, &q.n, q.mode);
        assert_eq!(k(&a), k(&b));
        assert_ne!(k(&a), k(&c));
        assert_ne!(k(&a), cache_key(a.surface, &a.bundles, &a.n, Mode::Unrefined));
        let twisted = a.bundles.twist_all([1, 0]);
        assert_ne!(k(&a), cache_key(a.surface, &twisted, &a.n, a.mode));
    }

    #[test]
    fn gc_removes_corrupt_and_old() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        cache.put(&sample(vec![1, 0], 1)).unwrap();
        let path = cache.put(&sample(vec![0, 1], 1)).unwrap();
        fs::write(&path, "not json").unwrap();
        let report = cache.gc(None).unwrap();
        assert_eq!(report, GcReport { kept: 1, removed: 0, corrupt: 1 });
        let report = cache.gc(Some(Duration::ZERO)).unwrap();
        assert_eq!(report.removed + report.kept, 1);
    }
}
