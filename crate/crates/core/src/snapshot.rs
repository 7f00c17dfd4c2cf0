use std::collections::BTreeMap;
use std::sync::Arc;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::model::{DocumentKind, DocumentRecord, RecordKey};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("duplicate record key {0}")]
pub struct DuplicateKey(pub RecordKey);

/// Immutable, versioned view of the corpus. Cloning is cheap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSnapshot {
    version: u64,
    records: Arc<BTreeMap<RecordKey, DocumentRecord>>,
}

impl Default for CorpusSnapshot {
    fn default() -> Self {
        CorpusSnapshot::empty()
    }
}

impl CorpusSnapshot {
    pub fn empty() -> Self {
        CorpusSnapshot { version: 0, records: Arc::new(BTreeMap::new()) }
    }

    pub fn new(version: u64, records: impl IntoIterator<Item = DocumentRecord>) -> Result<Self, DuplicateKey> {
        let mut map = BTreeMap::new();
        for record in records {
            let record = record.normalized();
            let key = record.key();
            if map.contains_key(&key) {
                return Err(DuplicateKey(key));
            }
            map.insert(key, record);
        }
        Ok(CorpusSnapshot { version, records: Arc::new(map) })
    }

    pub(crate) fn from_map(version: u64, records: BTreeMap<RecordKey, DocumentRecord>) -> Self {
        CorpusSnapshot { version, records: Arc::new(records) }
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in key order.
    pub fn records(&self) -> impl Iterator<Item = &DocumentRecord> {
        self.records.values()
    }

    pub fn get(&self, key: &RecordKey) -> Option<&DocumentRecord> {
        self.records.get(key)
    }

    /// Looks a document up by a citation in either language (or its key).
    pub fn find(&self, dataset: &str, citation: &str) -> Option<&DocumentRecord> {
        let key = RecordKey::new(dataset, citation);
        self.records.get(&key).or_else(|| {
            let lo = RecordKey { dataset: dataset.to_owned(), citation: String::new() };
            self.records
                .range(lo..)
                .take_while(|(k, _)| k.dataset == dataset)
                .map(|(_, r)| r)
                .find(|r| r.answers_to(citation))
        })
    }

    /// Finds a stored record describing the same document as `record`.
    pub fn find_same_document(&self, record: &DocumentRecord) -> Option<&DocumentRecord> {
        self.records.get(&record.key()).or_else(|| {
            let lo = RecordKey { dataset: record.dataset.clone(), citation: String::new() };
            self.records
                .range(lo..)
                .take_while(|(k, _)| k.dataset == record.dataset)
                .map(|(_, r)| r)
                .find(|r| r.same_document(record))
        })
    }

    pub fn datasets(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.records.keys().map(|k| k.dataset.as_str()).collect();
        out.dedup();
        out
    }

    /// Records matching every set field of `filter`, in `(dataset, date, citation)` order.
    pub fn scan(&self, filter: &ScanFilter) -> Vec<&DocumentRecord> {
        let mut out: Vec<&DocumentRecord> = self.records.values().filter(|r| filter.matches(r)).collect();
        out.sort_by(|a, b| scan_order(a, b));
        out
    }

    /// Same records, restricted to `filter`, with the version kept.
    pub fn restricted(&self, filter: &ScanFilter) -> CorpusSnapshot {
        let map = self.records.iter().filter(|(_, r)| filter.matches(r)).map(|(k, r)| (k.clone(), r.clone())).collect();
        CorpusSnapshot::from_map(self.version, map)
    }
}

fn scan_order(a: &DocumentRecord, b: &DocumentRecord) -> std::cmp::Ordering {
    let (ka, kb) = (a.key(), b.key());
    ka.dataset.cmp(&kb.dataset).then_with(|| a.date().cmp(&b.date())).then_with(|| ka.citation.cmp(&kb.citation))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanFilter {
    pub dataset: Option<String>,
    pub kind: Option<DocumentKind>,
    /// Inclusive.
    pub date_from: Option<NaiveDate>,
    /// Inclusive.
    pub date_to: Option<NaiveDate>,
}

impl ScanFilter {
    pub fn dataset(dataset: impl Into<String>) -> Self {
        ScanFilter { dataset: Some(dataset.into()), ..Default::default() }
    }

    pub fn kind(kind: DocumentKind) -> Self {
        ScanFilter { kind: Some(kind), ..Default::default() }
    }

    pub fn matches(&self, record: &DocumentRecord) -> bool {
        if self.dataset.as_deref().is_some_and(|d| d != record.dataset) {
            return false;
        }
        if self.kind.is_some_and(|k| k != record.kind) {
            return false;
        }
        if self.date_from.is_some() || self.date_to.is_some() {
            let Some(date) = record.date() else { return false };
            if self.date_from.is_some_and(|from| date < from) || self.date_to.is_some_and(|to| date > to) {
                return false;
            }
        }
        true
    }
}
