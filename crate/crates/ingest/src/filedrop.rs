//! Documents delivered by direct distribution (e.g. e-mailed tribunal
//! decisions saved to a directory).
//!
//! Each document `<name>` is paired with a TOML sidecar `<name>.meta`:
//!
//! ```toml
//! dataset = "RAD"          # optional; must match the source when given
//! citation = "2025 RAD 17"
//! name = "X (Re)"          # optional
//! date = "2025-08-05"      # optional, ISO 8601
//! language = "en"          # optional, defaults to the source language
//! url = "https://…"        # optional, defaults to the file URL
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use legaldata_core::{DocumentRecord, Language, SourceDescriptor};
use legaldata_store::Store;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::batch::{apply_candidates, document_text, Candidate, IngestOptions, Prepared};
use crate::fetch::{Fetched, Fetcher, FileFetcher};
use crate::report::{IngestReport, Outcome};
use crate::IngestError;

pub const SIDECAR_EXTENSION: &str = "meta";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub dataset: Option<String>,
    pub citation: Option<String>,
    pub name: Option<String>,
    pub date: Option<String>,
    pub language: Option<String>,
    pub url: Option<String>,
}

/// File name → SHA-256 (hex) of the content already imported.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDropState {
    pub processed: BTreeMap<String, String>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn sidecar_for(dir: &Path, file_name: &str) -> Option<std::path::PathBuf> {
    let direct = dir.join(format!("{file_name}.{SIDECAR_EXTENSION}"));
    if direct.is_file() {
        return Some(direct);
    }
    let stem = Path::new(file_name).file_stem()?.to_str()?;
    let by_stem = dir.join(format!("{stem}.{SIDECAR_EXTENSION}"));
    by_stem.is_file().then_some(by_stem)
}

fn candidate(
    path: &Path,
    file_name: &str,
    fetched: Fetched,
    sidecar: Sidecar,
    source: &SourceDescriptor,
    options: &IngestOptions,
) -> Prepared {
    let skip = |note: String| Err((file_name.to_owned(), Outcome::Skipped, note));
    if let Some(ds) = &sidecar.dataset {
        if ds != &source.dataset {
            return skip(format!("sidecar dataset {ds} does not match source {}", source.dataset));
        }
    }
    let Some(citation) = sidecar.citation.filter(|c| !c.trim().is_empty()) else {
        return skip("sidecar has no citation".into());
    };
    let date = match sidecar.date.as_deref() {
        None => None,
        Some(d) => match NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d") {
            Ok(d) => Some(d),
            Err(_) => return skip(format!("sidecar date `{d}` is not YYYY-MM-DD")),
        },
    };
    let language = match sidecar.language.as_deref() {
        None => source.language,
        Some("en") => Language::En,
        Some("fr") => Language::Fr,
        Some(other) => return skip(format!("sidecar language `{other}` is not en or fr")),
    };
    let text = match document_text(&fetched) {
        Ok(t) => t,
        Err(e) => return skip(e),
    };
    let url = match sidecar.url {
        Some(u) => u,
        None => match std::fs::canonicalize(path).ok().and_then(|p| url::Url::from_file_path(p).ok()) {
            Some(u) => u.to_string(),
            None => return Err((file_name.to_owned(), Outcome::Failed, "cannot form a file URL".into())),
        },
    };
    let mut record = DocumentRecord::new(source.dataset.clone(), source.kind, source.license_text.clone());
    let f = record.fields_mut(language);
    *f.citation = Some(citation);
    *f.name = sidecar.name;
    *f.document_date = date;
    *f.url = Some(url);
    *f.scraped_timestamp = Some((options.clock)());
    *f.unofficial_text = Some(text);
    Ok(Candidate { item: file_name.to_owned(), language, record })
}

/// Imports every document in `dir` that has not already been imported with
/// the same content. Already-imported files count as duplicates without
/// touching the store; `state` is updated for every stored or duplicate file.
pub fn import_file_drop(
    dir: &Path,
    source: &SourceDescriptor,
    store: &Store,
    state: &mut FileDropState,
    options: &IngestOptions,
) -> Result<IngestReport, IngestError> {
    let entries = std::fs::read_dir(dir).map_err(|e| IngestError::Io { path: dir.to_owned(), source: e })?;
    let mut names: Vec<String> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| IngestError::Io { path: dir.to_owned(), source: e })?;
        let Ok(name) = entry.file_name().into_string() else { continue };
        let is_file = entry.file_type().map(|t| t.is_file()).unwrap_or(false);
        if is_file && !name.starts_with('.') && !name.ends_with(&format!(".{SIDECAR_EXTENSION}")) {
            names.push(name);
        }
    }
    names.sort();

    let mut report = IngestReport::default();
    let mut prepared: Vec<Prepared> = Vec::new();
    let mut digests: BTreeMap<String, String> = BTreeMap::new();
    for name in names {
        let path = dir.join(&name);
        let fetched = match FileFetcher.fetch(&path.to_string_lossy()) {
            Ok(f) => f,
            Err(e) => {
                prepared.push(Err((name, Outcome::Failed, e.to_string())));
                continue;
            }
        };
        let digest = hex(&Sha256::digest(&fetched.body));
        if state.processed.get(&name) == Some(&digest) {
            report.record(name, Outcome::Duplicate, Some("already imported".into()));
            continue;
        }
        let Some(sidecar_path) = sidecar_for(dir, &name) else {
            prepared.push(Err((name, Outcome::Skipped, "no sidecar .meta file".into())));
            continue;
        };
        let sidecar = std::fs::read_to_string(&sidecar_path)
            .map_err(|e| e.to_string())
            .and_then(|s| toml::from_str::<Sidecar>(&s).map_err(|e| e.to_string()));
        let sidecar = match sidecar {
            Ok(s) => s,
            Err(e) => {
                prepared.push(Err((name, Outcome::Skipped, format!("bad sidecar: {e}"))));
                continue;
            }
        };
        digests.insert(name.clone(), digest);
        prepared.push(candidate(&path, &name, fetched, sidecar, source, options));
    }
    let applied = apply_candidates(prepared, source, store)?;
    for item in &applied.items {
        if matches!(item.outcome, Outcome::New | Outcome::Updated | Outcome::Duplicate) {
            if let Some(d) = digests.get(&item.item) {
                state.processed.insert(item.item.clone(), d.clone());
            }
        }
    }
    report.absorb(applied);
    Ok(report)
}
