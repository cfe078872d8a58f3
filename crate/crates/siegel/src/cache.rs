//! Persistent JSON cache keyed by operation, parameters, and formula
//! version.
//!
//! One file per key: the file name is a stable hash of the key string, and
//! the payload embeds the key and version so entries can be verified after
//! the fact. Writes go through a temporary file and an atomic rename;
//! concurrent readers see either the old or the new complete file. A
//! version mismatch is treated as a miss, never mutated in place.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache io at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("corrupt cache entry {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
}

/// On-disk envelope of one cache entry.
#[derive(Serialize, Deserialize)]
struct Envelope {
    key: String,
    version: u32,
    created_at: u64,
    payload: serde_json::Value,
}

/// Metadata of a stored entry.
#[derive(Clone, Debug, Serialize)]
pub struct EntryInfo {
    pub file: String,
    pub key: String,
    pub version: u32,
    pub created_at: u64,
    pub bytes: u64,
}

/// A cache directory.
pub struct CacheStore {
    dir: PathBuf,
}

fn key_file_name(key: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(key.as_bytes());
    let digest = hasher.finalize();
    let hex: String = digest.iter().take(12).map(|b| format!("{b:02x}")).collect();
    format!("{hex}.json")
}

fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl CacheStore {
    /// Opens (creating if needed) a cache directory.
    pub fn open(dir: &Path) -> Result<Self, CacheError> {
        fs::create_dir_all(dir).map_err(|source| CacheError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(CacheStore {
            dir: dir.to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(key_file_name(key))
    }

    /// Reads an entry if present with a matching key and version.
    pub fn get<T: DeserializeOwned>(&self, key: &str, version: u32) -> Option<T> {
        let path = self.path_for(key);
        let data = fs::read(&path).ok()?;
        let env: Envelope = serde_json::from_slice(&data).ok()?;
        if env.key != key || env.version != version {
            return None;
        }
        serde_json::from_value(env.payload).ok()
    }

    /// Stores an entry atomically (write to a temp file, then rename).
    pub fn put<T: Serialize>(&self, key: &str, version: u32, value: &T) -> Result<(), CacheError> {
        let env = Envelope {
            key: key.to_string(),
            version,
            created_at: now_secs(),
            payload: serde_json::to_value(value).expect("serializable payload"),
        };
        let path = self.path_for(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let bytes = serde_json::to_vec_pretty(&env).expect("serializable envelope");
        fs::write(&tmp, bytes).map_err(|source| CacheError::Io {
            path: tmp.clone(),
            source,
        })?;
        fs::rename(&tmp, &path).map_err(|source| CacheError::Io {
            path: path.clone(),
            source,
        })?;
        Ok(())
    }

    /// Computes through the cache.
    pub fn get_or_compute<T, F>(&self, key: &str, version: u32, f: F) -> Result<T, CacheError>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> T,
    {
        if let Some(hit) = self.get::<T>(key, version) {
            return Ok(hit);
        }
        let value = f();
        self.put(key, version, &value)?;
        Ok(value)
    }

    /// Lists all entries (skipping temp files), sorted by file name.
    pub fn list(&self) -> Result<Vec<EntryInfo>, CacheError> {
        let mut out = Vec::new();
        let rd = fs::read_dir(&self.dir).map_err(|source| CacheError::Io {
            path: self.dir.clone(),
            source,
        })?;
        for item in rd {
            let item = item.map_err(|source| CacheError::Io {
                path: self.dir.clone(),
                source,
            })?;
            let path = item.path();
            if path.extension().map_or(true, |e| e != "json") {
                continue;
            }
            let bytes = item
                .metadata()
                .map_err(|source| CacheError::Io {
                    path: path.clone(),
                    source,
                })?
                .len();
            let data = fs::read(&path).map_err(|source| CacheError::Io {
                path: path.clone(),
                source,
            })?;
            let env: Envelope =
                serde_json::from_slice(&data).map_err(|e| CacheError::Corrupt {
                    path: path.clone(),
                    reason: e.to_string(),
                })?;
            out.push(EntryInfo {
                file: path
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                key: env.key,
                version: env.version,
                created_at: env.created_at,
                bytes,
            });
        }
        out.sort_by(|a, b| a.file.cmp(&b.file));
        Ok(out)
    }

    /// Removes every entry.
    pub fn clear(&self) -> Result<usize, CacheError> {
        let mut removed = 0;
        let rd = fs::read_dir(&self.dir).map_err(|source| CacheError::Io {
            path: self.dir.clone(),
            source,
        })?;
        for item in rd {
            let item = item.map_err(|source| CacheError::Io {
                path: self.dir.clone(),
                source,
            })?;
            let path = item.path();
            if path.extension().map_or(false, |e| e == "json") {
                fs::remove_file(&path).map_err(|source| CacheError::Io {
                    path: path.clone(),
                    source,
                })?;
                removed += 1;
            }
        }
        Ok(removed)
    }

    /// Re-parses every payload; returns the list of corrupt entries.
    pub fn verify(&self) -> Result<Vec<(String, String)>, CacheError> {
        let mut bad = Vec::new();
        let rd = fs::read_dir(&self.dir).map_err(|source| CacheError::Io {
            path: self.dir.clone(),
            source,
        })?;
        for item in rd {
            let item = item.map_err(|source| CacheError::Io {
                path: self.dir.clone(),
                source,
            })?;
            let path = item.path();
            if path.extension().map_or(true, |e| e != "json") {
                continue;
            }
            let name = path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            match fs::read(&path) {
                Err(e) => bad.push((name, e.to_string())),
                Ok(data) => match serde_json::from_slice::<Envelope>(&data) {
                    Err(e) => bad.push((name, e.to_string())),
                    Ok(env) => {
                        // the stored file name must match the key hash
                        if key_file_name(&env.key) != name {
                            bad.push((name, "file name does not match key hash".into()));
                        }
                    }
                },
            }
        }
        bad.sort();
        Ok(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store() -> (tempfile::TempDir, CacheStore) {
        let dir = tempfile::tempdir().unwrap();
        let store = CacheStore::open(dir.path()).unwrap();
        (dir, store)
    }

    #[test]
    fn miss_then_hit() {
        let (_d, s) = store();
        assert!(s.get::<Vec<u32>>("k1", 1).is_none());
        s.put("k1", 1, &vec![1u32, 2, 3]).unwrap();
        assert_eq!(s.get::<Vec<u32>>("k1", 1).unwrap(), vec![1, 2, 3]);
        // version mismatch is a miss
        assert!(s.get::<Vec<u32>>("k1", 2).is_none());
    }

    #[test]
    fn get_or_compute_runs_once() {
        let (_d, s) = store();
        let mut calls = 0;
        let v: u64 = s
            .get_or_compute("op=x;n=5", 1, || {
                calls += 1;
                42
            })
            .unwrap();
        assert_eq!(v, 42);
        let v2: u64 = s.get_or_compute("op=x;n=5", 1, || panic!("cached")).unwrap();
        assert_eq!(v2, 42);
        assert_eq!(calls, 1);
    }

    #[test]
    fn list_clear_verify() {
        let (_d, s) = store();
        assert!(s.list().unwrap().is_empty());
        s.put("a", 1, &1u8).unwrap();
        s.put("b", 2, &2u8).unwrap();
        let listing = s.list().unwrap();
        assert_eq!(listing.len(), 2);
        assert!(s.verify().unwrap().is_empty());
        assert_eq!(s.clear().unwrap(), 2);
        assert!(s.list().unwrap().is_empty());
    }

    #[test]
    fn verify_flags_truncated_payload() {
        let (_d, s) = store();
        s.put("will-break", 1, &vec![9u8; 100]).unwrap();
        let entry = &s.list().unwrap()[0];
        let path = s.dir().join(&entry.file);
        let data = fs::read(&path).unwrap();
        fs::write(&path, &data[..data.len() / 2]).unwrap();
        let bad = s.verify().unwrap();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].0, entry.file);
    }

    #[test]
    fn table_round_trip_through_cache() {
        let (_d, s) = store();
        let table = crate::modular::eisenstein2::siegel_eisenstein2(4, 9).unwrap();
        s.put("op=eisenstein2;k=4;maxdet=9", 3, &table).unwrap();
        let back: crate::modular::eisenstein2::FourierTable2 =
            s.get("op=eisenstein2;k=4;maxdet=9", 3).unwrap();
        assert_eq!(table, back);
    }
}
