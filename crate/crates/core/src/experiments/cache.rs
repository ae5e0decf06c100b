//! Result cache keyed by a content hash of the study configuration.
//!
//! Each entry is one JSON file `<sha256>.json`; writes go through a
//! temporary file in the same directory and an atomic rename.

use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::config::StudyConfig;
use super::emit::{from_json, to_json};
use super::study::{run_study, StudyResult};
use crate::error::Result;

/// Hex SHA-256 of the config's JSON form, with the output path removed.
pub fn cache_key(config: &StudyConfig) -> Result<String> {
    let mut c = config.clone();
    c.output = None;
    let bytes = serde_json::to_vec(&c)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, config: &StudyConfig) -> Result<PathBuf> {
        Ok(self.dir.join(format!("{}.json", cache_key(config)?)))
    }

    /// The stored result, if present, readable and produced by an equal config.
    pub fn load(&self, config: &StudyConfig) -> Result<Option<StudyResult>> {
        let path = self.path_for(config)?;
        let Ok(text) = std::fs::read_to_string(&path) else {
            return Ok(None);
        };
        let Ok(mut stored) = from_json(&text) else {
            return Ok(None);
        };
        let mut want = config.clone();
        want.output = None;
        let mut have = stored.config.clone();
        have.output = None;
        if want != have {
            return Ok(None);
        }
        stored.config.output = config.output.clone();
        Ok(Some(stored))
    }

    pub fn store(&self, result: &StudyResult) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.path_for(&result.config)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(to_json(result)?.as_bytes())?;
        tmp.flush()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(path)
    }
}

/// Run a study through the cache. Returns the result and whether it was a hit.
pub fn run_cached(config: &StudyConfig, cache: Option<&Cache>) -> Result<(StudyResult, bool)> {
    if let Some(c) = cache {
        if let Some(hit) = c.load(config)? {
            return Ok((hit, true));
        }
    }
    let result = run_study(config)?;
    if let Some(c) = cache {
        c.store(&result)?;
    }
    Ok((result, false))
}
