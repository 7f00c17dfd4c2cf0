//! Turning fetched documents into stored records.
//!
//! Every channel ends here: candidates (one language half of a document
//! each) are matched against the store, compared by a SHA-256 digest of
//! their text, merged into the stored record, validated, and written in a
//! single upsert.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use chrono::{DateTime, Utc};
use legaldata_core::{validate_record, DocumentRecord, Language, SourceDescriptor};
use legaldata_store::Store;
use sha2::{Digest, Sha256};

use crate::fetch::{Fetched, Fetcher};
use crate::html::html_to_text;
use crate::report::{DocumentStub, IngestReport, Outcome};
use crate::IngestError;

pub type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

#[derive(Clone)]
pub struct IngestOptions {
    /// Overrides the source's politeness delay when set.
    pub politeness_delay: Option<Duration>,
    /// Acquisition timestamp for fetched documents.
    pub clock: Clock,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { politeness_delay: None, clock: Arc::new(Utc::now) }
    }
}

impl std::fmt::Debug for IngestOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IngestOptions").field("politeness_delay", &self.politeness_delay).finish_non_exhaustive()
    }
}

impl IngestOptions {
    pub fn delay_for(&self, source: &SourceDescriptor) -> Duration {
        self.politeness_delay.unwrap_or_else(|| Duration::from_secs_f64(source.politeness_delay.max(0.0)))
    }
}

/// One language half of a document, ready to merge.
#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub item: String,
    pub language: Language,
    pub record: DocumentRecord,
}

pub(crate) type Prepared = Result<Candidate, (String, Outcome, String)>;

pub fn text_digest(text: &str) -> [u8; 32] {
    Sha256::digest(text.as_bytes()).into()
}

/// Plain text of a fetched body. HTML is reduced to its visible text; PDF
/// and other binary bodies are refused.
pub fn document_text(fetched: &Fetched) -> Result<String, String> {
    let ct = fetched.content_type.as_deref().unwrap_or("").to_ascii_lowercase();
    if ct.contains("pdf") || fetched.body.starts_with(b"%PDF") {
        return Err("PDF bodies are not supported (no text extraction)".into());
    }
    let body = std::str::from_utf8(&fetched.body).map_err(|e| format!("body is not UTF-8: {e}"))?;
    let sniff = body.trim_start().get(..15).unwrap_or("").to_ascii_lowercase();
    let text = if ct.contains("html") || sniff.starts_with("<!doctype html") || sniff.starts_with("<html") {
        html_to_text(body)
    } else {
        body.trim().to_owned()
    };
    if text.trim().is_empty() {
        return Err("document has no text".into());
    }
    Ok(text)
}

fn host_of(url: &str) -> String {
    url::Url::parse(url).ok().and_then(|u| u.host_str().map(str::to_owned)).unwrap_or_default()
}

/// Fetches every stub. Distinct hosts run concurrently; requests to one host
/// run in stub order with `delay` between them.
fn fetch_all(
    stubs: &[DocumentStub],
    fetcher: &dyn Fetcher,
    delay: Duration,
) -> Vec<Result<Fetched, crate::fetch::FetchError>> {
    let mut by_host: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, s) in stubs.iter().enumerate() {
        by_host.entry(host_of(&s.fetch_url)).or_default().push(i);
    }
    let mut results: Vec<Option<Result<Fetched, crate::fetch::FetchError>>> = vec![None; stubs.len()];
    thread::scope(|scope| {
        let handles: Vec<_> = by_host
            .into_values()
            .map(|indices| {
                scope.spawn(move || {
                    let mut out = Vec::with_capacity(indices.len());
                    for (n, i) in indices.into_iter().enumerate() {
                        if n > 0 && !delay.is_zero() {
                            thread::sleep(delay);
                        }
                        out.push((i, fetcher.fetch(&stubs[i].fetch_url)));
                    }
                    out
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("fetch thread panicked") {
                results[i] = Some(r);
            }
        }
    });
    results.into_iter().map(|r| r.expect("every stub fetched")).collect()
}

pub(crate) fn stub_candidate(
    stub: &DocumentStub,
    fetched: Result<Fetched, crate::fetch::FetchError>,
    source: &SourceDescriptor,
    retrieved_at: DateTime<Utc>,
) -> Prepared {
    let item = stub.fetch_url.clone();
    let fetched = fetched.map_err(|e| (item.clone(), Outcome::Failed, e.to_string()))?;
    let text = document_text(&fetched).map_err(|e| (item.clone(), Outcome::Skipped, e))?;
    let mut record = DocumentRecord::new(source.dataset.clone(), source.kind, source.license_text.clone());
    let f = record.fields_mut(stub.language);
    *f.citation = stub.citation.clone();
    *f.name = stub.name.clone();
    *f.document_date = stub.date;
    *f.url = Some(stub.fetch_url.clone());
    *f.scraped_timestamp = Some(retrieved_at);
    *f.unofficial_text = Some(text);
    Ok(Candidate { item, language: stub.language, record })
}

/// Copies the language-specific fields of `half` over `base`.
fn merge(base: &DocumentRecord, half: &DocumentRecord, lang: Language, license: &str) -> DocumentRecord {
    let mut out = base.clone();
    let mut half = half.clone();
    let src = half.fields_mut(lang);
    let dst = out.fields_mut(lang);
    macro_rules! take_some {
        ($($field:ident),*) => {$(
            if src.$field.is_some() {
                *dst.$field = src.$field.take();
            }
        )*};
    }
    take_some!(citation, citation2, name, document_date, url, scraped_timestamp, unofficial_text, unofficial_sections);
    out.upstream_license = license.to_owned();
    out
}

/// Merges candidates into the store in one batch and reports per item.
pub(crate) fn apply_candidates(
    prepared: Vec<Prepared>,
    source: &SourceDescriptor,
    store: &Store,
) -> Result<IngestReport, IngestError> {
    let snapshot = store.snapshot();
    let mut report = IngestReport::default();
    // Records to write, with whether each is new to the store.
    let mut pending: Vec<(DocumentRecord, bool)> = Vec::new();

    for p in prepared {
        let cand = match p {
            Ok(c) => c,
            Err((item, outcome, note)) => {
                report.record(item, outcome, Some(note));
                continue;
            }
        };
        if cand.record.dataset != source.dataset {
            let note = format!("dataset {} does not match source {}", cand.record.dataset, source.dataset);
            report.record(cand.item, Outcome::Skipped, Some(note));
            continue;
        }
        let lang = cand.language;
        let in_batch = pending.iter().position(|(r, _)| r.same_document(&cand.record));
        let existing = match in_batch {
            Some(i) => Some(pending[i].0.clone()),
            None => snapshot.find_same_document(&cand.record).cloned(),
        };
        let (merged, outcome) = match &existing {
            None => (merge(&cand.record, &cand.record, lang, &source.license_text), Outcome::New),
            Some(base) => {
                let same_text = base.text(lang).map(text_digest) == cand.record.text(lang).map(text_digest);
                if same_text {
                    report.record(cand.item, Outcome::Duplicate, None);
                    continue;
                }
                let outcome = match in_batch {
                    Some(i) if pending[i].1 => Outcome::New,
                    _ => Outcome::Updated,
                };
                (merge(base, &cand.record, lang, &source.license_text), outcome)
            }
        };
        let violations = validate_record(&merged);
        if !violations.is_empty() {
            let v: Vec<String> = violations.iter().map(ToString::to_string).collect();
            report.record(cand.item, Outcome::Skipped, Some(v.join("; ")));
            continue;
        }
        match in_batch {
            Some(i) => pending[i].0 = merged,
            None => pending.push((merged, outcome == Outcome::New)),
        }
        let note = (outcome == Outcome::Updated).then(|| format!("text changed for {}", cand.record.key()));
        report.record(cand.item, outcome, note);
    }

    if !pending.is_empty() {
        store.upsert(pending.into_iter().map(|(r, _)| r).collect())?;
    }
    Ok(report)
}

/// Fetches, normalizes and stores `stubs` for `source`.
pub fn ingest_batch(
    stubs: &[DocumentStub],
    fetcher: &dyn Fetcher,
    source: &SourceDescriptor,
    store: &Store,
    options: &IngestOptions,
) -> Result<IngestReport, IngestError> {
    let fetched = fetch_all(stubs, fetcher, options.delay_for(source));
    let prepared = stubs
        .iter()
        .zip(fetched)
        .map(|(stub, f)| {
            if stub.dataset != source.dataset {
                let note = format!("dataset {} does not match source {}", stub.dataset, source.dataset);
                return Err((stub.fetch_url.clone(), Outcome::Skipped, note));
            }
            stub_candidate(stub, f, source, (options.clock)())
        })
        .collect();
    apply_candidates(prepared, source, store)
}
