//! Append-only journal of fetched translations.
//!
//! Live translation systems change over time, so every fetched output is
//! preserved keyed by a content hash of (backend, source sentence). Replaying
//! a run against the journal reproduces the original outputs byte for byte.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache file {path} unreadable: {source}")]
    Unreadable {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cache file {path} corrupt at line {line}: {detail}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        detail: String,
    },
    #[error("cache append failed: {0}")]
    Append(std::io::Error),
}

/// One journal line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub backend_id: String,
    pub source: String,
    pub output: String,
    pub fetched_at: DateTime<Utc>,
}

/// Content hash used as the journal key.
pub fn cache_key(backend_id: &str, source: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(backend_id.as_bytes());
    hasher.update([0x1f]);
    hasher.update(source.as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

struct Inner {
    map: HashMap<String, CacheEntry>,
    writer: Option<BufWriter<File>>,
}

/// Translation cache: an in-memory map mirrored to a JSONL journal. Reads
/// share the map; appends are serialized and flushed line by line.
pub struct TranslationCache {
    inner: Mutex<Inner>,
}

impl TranslationCache {
    /// Opens (or creates) a journal file, replaying existing lines. A line
    /// that fails to parse is an error, not a skip: a damaged journal must
    /// not silently lose fetched outputs.
    pub fn open(path: &Path) -> Result<Self, CacheError> {
        let mut map = HashMap::new();
        if path.exists() {
            let file = File::open(path).map_err(|source| CacheError::Unreadable {
                path: path.to_path_buf(),
                source,
            })?;
            for (index, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|source| CacheError::Unreadable {
                    path: path.to_path_buf(),
                    source,
                })?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: CacheEntry =
                    serde_json::from_str(&line).map_err(|e| CacheError::Corrupt {
                        path: path.to_path_buf(),
                        line: index + 1,
                        detail: e.to_string(),
                    })?;
                map.insert(entry.key.clone(), entry);
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|source| CacheError::Unreadable {
                path: path.to_path_buf(),
                source,
            })?;
        Ok(TranslationCache {
            inner: Mutex::new(Inner {
                map,
                writer: Some(BufWriter::new(file)),
            }),
        })
    }

    /// A cache with no backing file, for tests and one-shot runs.
    pub fn in_memory() -> Self {
        TranslationCache {
            inner: Mutex::new(Inner {
                map: HashMap::new(),
                writer: None,
            }),
        }
    }

    pub fn lookup(&self, key: &str) -> Option<CacheEntry> {
        self.inner.lock().unwrap().map.get(key).cloned()
    }

    /// Appends one entry to the journal and the map. The journal line is
    /// flushed before the entry becomes visible.
    pub fn append(&self, entry: CacheEntry) -> Result<(), CacheError> {
        let mut inner = self.inner.lock().unwrap();
        if let Some(writer) = inner.writer.as_mut() {
            let line = serde_json::to_string(&entry)
                .map_err(|e| CacheError::Append(std::io::Error::other(e)))?;
            writer
                .write_all(line.as_bytes())
                .map_err(CacheError::Append)?;
            writer.write_all(b"\n").map_err(CacheError::Append)?;
            writer.flush().map_err(CacheError::Append)?;
        }
        inner.map.insert(entry.key.clone(), entry);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(key: &str, output: &str) -> CacheEntry {
        CacheEntry {
            key: key.to_string(),
            backend_id: "test".to_string(),
            source: "걔는 의사야".to_string(),
            output: output.to_string(),
            fetched_at: Utc::now(),
        }
    }

    #[test]
    fn key_separates_backend_from_source() {
        assert_ne!(cache_key("ab", "c"), cache_key("a", "bc"));
        assert_eq!(cache_key("b", "s"), cache_key("b", "s"));
        assert_eq!(cache_key("b", "s").len(), 64);
    }

    #[test]
    fn journal_round_trips_across_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        {
            let cache = TranslationCache::open(&path).unwrap();
            cache.append(entry("k1", "She is a doctor.")).unwrap();
            cache.append(entry("k2", "He is a doctor.")).unwrap();
        }
        let cache = TranslationCache::open(&path).unwrap();
        assert_eq!(cache.len(), 2);
        assert_eq!(cache.lookup("k1").unwrap().output, "She is a doctor.");
        assert!(cache.lookup("k3").is_none());
    }

    #[test]
    fn corrupt_journal_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        std::fs::write(&path, "not json\n").unwrap();
        match TranslationCache::open(&path) {
            Err(CacheError::Corrupt { line, .. }) => assert_eq!(line, 1),
            Err(other) => panic!("expected corrupt-line error, got {other:?}"),
            Ok(_) => panic!("expected corrupt-line error, got a cache"),
        }
    }

    #[test]
    fn in_memory_cache_skips_the_journal() {
        let cache = TranslationCache::in_memory();
        cache.append(entry("k", "The person is kind.")).unwrap();
        assert_eq!(cache.lookup("k").unwrap().output, "The person is kind.");
    }
}
