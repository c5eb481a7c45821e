//! On-disk memo of sub-computations, keyed by a content hash.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    version: String,
    key: String,
    checksum: String,
    payload: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Counts of lookups served from disk and recomputed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
    pub corrupt: usize,
}

/// A directory of JSON entries. Without a directory every lookup is a miss.
#[derive(Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
    version: String,
    hits: AtomicUsize,
    misses: AtomicUsize,
    corrupt: AtomicUsize,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self::with_version(dir, VERSION)
    }

    pub fn with_version(dir: Option<PathBuf>, version: &str) -> Self {
        Cache {
            dir,
            version: version.to_string(),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
            corrupt: AtomicUsize::new(0),
        }
    }

    pub fn disabled() -> Self {
        Self::new(None)
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            corrupt: self.corrupt.load(Ordering::Relaxed),
        }
    }

    /// Hash of the canonical JSON of `descriptor` together with the version.
    pub fn key<D: Serialize>(&self, descriptor: &D) -> String {
        let canon = serde_json::to_string(descriptor).expect("descriptors serialize");
        sha256_hex(format!("{}\n{canon}", self.version).as_bytes())
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    /// The stored payload, or `None` when absent, stale or corrupt.
    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let path = self.path(key)?;
        let text = std::fs::read_to_string(&path).ok()?;
        let parsed = serde_json::from_str::<Entry>(&text)
            .ok()
            .filter(|e| e.key == key && e.version == self.version && sha256_hex(e.payload.as_bytes()) == e.checksum)
            .and_then(|e| serde_json::from_str::<T>(&e.payload).ok());
        if parsed.is_none() {
            self.corrupt.fetch_add(1, Ordering::Relaxed);
            log::warn!("cache entry {} is corrupt; recomputing", path.display());
        }
        parsed
    }

    /// Writes through a temporary file so readers never see a partial entry.
    pub fn put<T: Serialize>(&self, key: &str, value: &T) -> std::io::Result<()> {
        let Some(path) = self.path(key) else { return Ok(()) };
        let dir = path.parent().expect("entry paths have a parent");
        std::fs::create_dir_all(dir)?;
        let payload = serde_json::to_string(value).expect("payloads serialize");
        let entry = Entry { version: self.version.clone(), key: key.to_string(), checksum: sha256_hex(payload.as_bytes()), payload };
        let mut tmp = tempfile_in(dir)?;
        use std::io::Write;
        tmp.1.write_all(serde_json::to_string(&entry).expect("entries serialize").as_bytes())?;
        tmp.1.sync_all()?;
        drop(tmp.1);
        std::fs::rename(&tmp.0, &path)
    }

    /// Looks `descriptor` up, computing and storing the value on a miss.
    pub fn get_or_compute<D, T, E, F>(&self, descriptor: &D, compute: F) -> Result<T, E>
    where
        D: Serialize,
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T, E>,
    {
        if self.dir.is_none() {
            self.misses.fetch_add(1, Ordering::Relaxed);
            return compute();
        }
        let key = self.key(descriptor);
        if let Some(v) = self.get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let v = compute()?;
        if let Err(e) = self.put(&key, &v) {
            log::warn!("cannot write cache entry {key}: {e}");
        }
        Ok(v)
    }
}

fn tempfile_in(dir: &Path) -> std::io::Result<(PathBuf, std::fs::File)> {
    static COUNTER: AtomicUsize = AtomicUsize::new(0);
    loop {
        let n = COUNTER.fetch_add(1, Ordering::Relaxed);
        let path = dir.join(format!(".tmp-{}-{n}", std::process::id()));
        match std::fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(f) => return Ok((path, f)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e),
        }
    }
}
