//! One JSON snapshot per session under a directory, named `<id>.json`.

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use policygen_core::engine::{EngineError, QuestionBank, Session};
use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no session {0}")]
    NotFound(String),
    #[error("snapshot {id} is corrupt: {reason}")]
    Corrupt { id: String, reason: String },
    #[error("session {id} belongs to bank {session}, service runs {bank}")]
    BankMismatch { id: String, session: String, bank: String },
    #[error("storage failure at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// 128 random bits, lowercase hex.
pub fn new_session_id() -> String {
    let mut bytes = [0u8; 16];
    rand::rng().fill_bytes(&mut bytes);
    hex::encode(bytes)
}

pub fn is_session_id(s: &str) -> bool {
    s.len() == 32 && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

#[derive(Debug, Clone)]
pub struct SessionStore {
    dir: PathBuf,
}

impl SessionStore {
    /// Opens (creating if needed) the store directory.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        if !dir.is_dir() {
            return Err(StoreError::Io {
                path: dir,
                source: io::Error::new(io::ErrorKind::NotADirectory, "not a directory"),
            });
        }
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    /// Saves under a fresh id. The snapshot is on disk before the id is returned.
    pub fn persist_session(&self, session: &Session) -> Result<String, StoreError> {
        loop {
            let id = new_session_id();
            if self.path_for(&id).exists() {
                continue;
            }
            self.save(&id, session)?;
            return Ok(id);
        }
    }

    /// Atomically replaces the snapshot for `id`: temp file, fsync, rename, fsync dir.
    pub fn save(&self, id: &str, session: &Session) -> Result<(), StoreError> {
        let target = self.path_for(id);
        let tmp = self.dir.join(format!(".{id}.{}.tmp", new_session_id()));
        let result = (|| {
            let mut f = File::create(&tmp).map_err(io_err(&tmp))?;
            f.write_all(session.to_json().as_bytes()).map_err(io_err(&tmp))?;
            f.sync_all().map_err(io_err(&tmp))?;
            fs::rename(&tmp, &target).map_err(io_err(&target))?;
            // directory fsync is best effort; not every platform allows opening a dir
            if let Ok(d) = File::open(&self.dir) {
                let _ = d.sync_all();
            }
            Ok(())
        })();
        if result.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        result
    }

    /// Loads and re-verifies a snapshot against `bank`. Fails closed on any mismatch.
    pub fn restore_session(&self, id: &str, bank: &QuestionBank) -> Result<Session, StoreError> {
        if !is_session_id(id) {
            return Err(StoreError::NotFound(id.to_string()));
        }
        let path = self.path_for(id);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(StoreError::NotFound(id.to_string())),
            Err(e) => return Err(io_err(&path)(e)),
        };
        Session::from_json(&bytes, bank).map_err(|e| match e {
            EngineError::BankMismatch { session, bank } => StoreError::BankMismatch {
                id: id.to_string(),
                session,
                bank,
            },
            other => StoreError::Corrupt {
                id: id.to_string(),
                reason: other.to_string(),
            },
        })
    }

    pub fn exists(&self, id: &str) -> bool {
        is_session_id(id) && self.path_for(id).is_file()
    }

    pub fn delete(&self, id: &str) -> Result<(), StoreError> {
        if !self.exists(id) {
            return Err(StoreError::NotFound(id.to_string()));
        }
        let path = self.path_for(id);
        fs::remove_file(&path).map_err(io_err(&path))
    }
}
