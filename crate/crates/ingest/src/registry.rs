//! Source registry file.
//!
//! ```toml
//! [[source]]
//! dataset = "FC"
//! kind = "case"
//! channel = "rss"
//! feed_url = "https://decisions.fct-cf.gc.ca/fc-cf/en/rss.do"
//! license_text = "…"
//! schedule = "daily"
//! ```

use std::path::Path;

use legaldata_core::SourceDescriptor;
use serde::Deserialize;

use crate::IngestError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    #[serde(default)]
    source: Vec<SourceDescriptor>,
}

/// Parses a registry and rejects it if any descriptor is unusable.
pub fn parse_registry(content: &str) -> Result<Vec<SourceDescriptor>, IngestError> {
    let file: RegistryFile =
        toml::from_str(content).map_err(|e| IngestError::Config(format!("source registry: {e}")))?;
    let mut problems = Vec::new();
    for (i, s) in file.source.iter().enumerate() {
        for p in s.problems() {
            problems.push(format!("source #{} ({} {}): {p}", i + 1, s.dataset, s.channel));
        }
    }
    if !problems.is_empty() {
        return Err(IngestError::Config(format!("source registry: {}", problems.join("; "))));
    }
    Ok(file.source)
}

pub fn load_registry(path: &Path) -> Result<Vec<SourceDescriptor>, IngestError> {
    let content = std::fs::read_to_string(path).map_err(|e| IngestError::Io { path: path.to_owned(), source: e })?;
    parse_registry(&content)
}
