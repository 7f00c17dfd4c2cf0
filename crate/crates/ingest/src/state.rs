//! Per-source bookkeeping kept next to (not inside) the store.

use std::path::{Path, PathBuf};

use legaldata_core::SourceDescriptor;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::IngestError;

pub const STATE_DIR: &str = "ingest-state";

#[derive(Debug, Clone)]
pub struct IngestState {
    dir: PathBuf,
}

impl IngestState {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        IngestState { dir: dir.into() }
    }

    /// `<corpus>/ingest-state`.
    pub fn for_corpus(corpus: &Path) -> Self {
        IngestState::new(corpus.join(STATE_DIR))
    }

    pub fn path_for(&self, source: &SourceDescriptor) -> PathBuf {
        self.dir.join(format!("{}-{}-{}.json", source.dataset, source.language.code(), source.channel))
    }

    pub fn load<T: DeserializeOwned + Default>(&self, source: &SourceDescriptor) -> Result<T, IngestError> {
        let path = self.path_for(source);
        match std::fs::read_to_string(&path) {
            Ok(s) => serde_json::from_str(&s).map_err(|e| IngestError::Config(format!("{}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(T::default()),
            Err(e) => Err(IngestError::Io { path, source: e }),
        }
    }

    pub fn save<T: Serialize>(&self, source: &SourceDescriptor, value: &T) -> Result<(), IngestError> {
        std::fs::create_dir_all(&self.dir).map_err(|e| IngestError::Io { path: self.dir.clone(), source: e })?;
        let path = self.path_for(source);
        let mut body = serde_json::to_string_pretty(value).expect("state serializes");
        body.push('\n');
        std::fs::write(&path, body).map_err(|e| IngestError::Io { path, source: e })
    }
}
