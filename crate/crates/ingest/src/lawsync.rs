//! Sync from a local checkout of the legislation XML repository.

use std::path::Path;

use legaldata_core::SourceDescriptor;
use legaldata_store::Store;
use walkdir::WalkDir;

use crate::batch::{apply_candidates, Candidate, IngestOptions, Prepared};
use crate::lawxml::parse_law_xml;
use crate::report::{IngestReport, Outcome};
use crate::IngestError;

/// Parses every `*.xml` file under `repo` (sorted by path) and stores the
/// resulting law records. Unparseable files are reported as failed.
pub fn sync_law_repo(
    repo: &Path,
    source: &SourceDescriptor,
    store: &Store,
    options: &IngestOptions,
) -> Result<IngestReport, IngestError> {
    if !repo.is_dir() {
        return Err(IngestError::Io {
            path: repo.to_owned(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "repository directory not found"),
        });
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(repo).sort_by_file_name() {
        let entry = entry.map_err(|e| IngestError::Io { path: repo.to_owned(), source: e.into() })?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e.eq_ignore_ascii_case("xml")) {
            files.push(entry.into_path());
        }
    }

    let mut warnings = Vec::new();
    let prepared: Vec<Prepared> = files
        .iter()
        .map(|path| {
            let item = path.strip_prefix(repo).unwrap_or(path).to_string_lossy().into_owned();
            let xml = std::fs::read_to_string(path).map_err(|e| (item.clone(), Outcome::Failed, e.to_string()))?;
            let parsed = parse_law_xml(&xml, source).map_err(|e| (item.clone(), Outcome::Failed, e.to_string()))?;
            warnings.extend(parsed.warnings.iter().map(|w| format!("{item}: {w}")));
            let url = std::fs::canonicalize(path)
                .ok()
                .and_then(|p| url::Url::from_file_path(p).ok())
                .map(|u| u.to_string())
                .ok_or_else(|| (item.clone(), Outcome::Failed, "cannot form a file URL".to_owned()))?;
            let language = parsed.language;
            let record = parsed.into_record(source, &url, (options.clock)());
            Ok(Candidate { item, language, record })
        })
        .collect();
    let mut report = apply_candidates(prepared, source, store)?;
    report.warnings.extend(warnings);
    Ok(report)
}
