//! Inverted index over both language texts plus metadata filters.
//!
//! Matching is the conjunction of every criterion set on the query.
//! Full-text terms are case- and diacritic-folded and AND-ed, without
//! stemming. A document's score is the sum of its term frequencies for the
//! query terms divided by its length in terms; queries without a text
//! criterion score every hit 0. Hits are ordered by score (descending), then
//! date (newest first, undated last), then citation and dataset ascending.

use std::cmp::Ordering;
use std::collections::HashMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::model::{normalize_citation, DocumentKind, Language, RecordKey};
use crate::snapshot::CorpusSnapshot;
use crate::text;

pub const MAX_PAGE_SIZE: u32 = 200;
pub const DEFAULT_PAGE_SIZE: u32 = 20;
pub const SNIPPET_MAX_CHARS: usize = 300;
/// Characters of context kept before the first matching term.
const SNIPPET_LEAD_CHARS: usize = 80;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize)]
pub enum QueryError {
    #[error("at least one of citation, name, text, date_from, date_to or dataset must be set")]
    NoCriteria,
    #[error("page must be at least 1")]
    PageOutOfRange,
    #[error("page_size must be between 1 and {MAX_PAGE_SIZE}, got {0}")]
    PageSizeOutOfRange(u32),
    #[error("`{0}` must not be blank")]
    Blank(&'static str),
    #[error("text query `{0}` contains no searchable terms")]
    NoTerms(String),
    #[error("date_from {0} is after date_to {1}")]
    InvertedDateRange(NaiveDate, NaiveDate),
}

fn default_page() -> u32 {
    1
}

fn default_page_size() -> u32 {
    DEFAULT_PAGE_SIZE
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySpec {
    #[serde(default)]
    pub citation: Option<String>,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub text: Option<String>,
    #[serde(default)]
    pub date_from: Option<NaiveDate>,
    #[serde(default)]
    pub date_to: Option<NaiveDate>,
    #[serde(default)]
    pub datasets: Vec<String>,
    /// Scope rather than a criterion: a query restricted only by kind is
    /// still empty.
    #[serde(default)]
    pub kind: Option<DocumentKind>,
    #[serde(default = "default_page")]
    pub page: u32,
    #[serde(default = "default_page_size")]
    pub page_size: u32,
}

impl Default for QuerySpec {
    fn default() -> Self {
        QuerySpec {
            citation: None,
            name: None,
            text: None,
            date_from: None,
            date_to: None,
            datasets: Vec::new(),
            kind: None,
            page: 1,
            page_size: DEFAULT_PAGE_SIZE,
        }
    }
}

impl QuerySpec {
    pub fn text(text: impl Into<String>) -> Self {
        QuerySpec { text: Some(text.into()), ..Default::default() }
    }

    pub fn citation(citation: impl Into<String>) -> Self {
        QuerySpec { citation: Some(citation.into()), ..Default::default() }
    }

    pub fn validate(&self) -> Result<(), QueryError> {
        for (field, value) in [("citation", &self.citation), ("name", &self.name), ("text", &self.text)] {
            if value.as_deref().is_some_and(|v| v.trim().is_empty()) {
                return Err(QueryError::Blank(field));
            }
        }
        if self.datasets.iter().any(|d| d.trim().is_empty()) {
            return Err(QueryError::Blank("dataset"));
        }
        let has_criterion = self.citation.is_some()
            || self.name.is_some()
            || self.text.is_some()
            || self.date_from.is_some()
            || self.date_to.is_some()
            || !self.datasets.is_empty();
        if !has_criterion {
            return Err(QueryError::NoCriteria);
        }
        if let Some(t) = &self.text {
            if text::terms(t).is_empty() {
                return Err(QueryError::NoTerms(t.clone()));
            }
        }
        if let (Some(from), Some(to)) = (self.date_from, self.date_to) {
            if from > to {
                return Err(QueryError::InvertedDateRange(from, to));
            }
        }
        if self.page < 1 {
            return Err(QueryError::PageOutOfRange);
        }
        if !(1..=MAX_PAGE_SIZE).contains(&self.page_size) {
            return Err(QueryError::PageSizeOutOfRange(self.page_size));
        }
        Ok(())
    }

    /// Folded query terms, deduplicated, in first-seen order.
    pub fn terms(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for t in self.text.as_deref().map(text::terms).unwrap_or_default() {
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub dataset: String,
    pub citation: String,
    pub name: Option<String>,
    pub date: Option<NaiveDate>,
    pub snippet: String,
    pub score: f64,
}

impl SearchHit {
    pub fn key(&self) -> RecordKey {
        RecordKey { dataset: self.dataset.clone(), citation: self.citation.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchPage {
    pub hits: Vec<SearchHit>,
    pub total: usize,
    pub page: u32,
    pub page_size: u32,
}

#[derive(Debug)]
struct IndexedDoc {
    key: RecordKey,
    kind: DocumentKind,
    date: Option<NaiveDate>,
    name: Option<String>,
    folded_names: Vec<String>,
    citations: Vec<String>,
    length: u32,
}

/// Immutable search index over one snapshot.
#[derive(Debug)]
pub struct Index {
    snapshot: CorpusSnapshot,
    docs: Vec<IndexedDoc>,
    /// term → (doc id, term frequency), doc ids ascending.
    postings: HashMap<String, Vec<(u32, u32)>>,
}

pub fn build_index(snapshot: &CorpusSnapshot) -> Index {
    let mut docs = Vec::with_capacity(snapshot.len());
    let mut postings: HashMap<String, Vec<(u32, u32)>> = HashMap::new();
    for (id, record) in snapshot.records().enumerate() {
        let id = id as u32;
        let mut tf: HashMap<String, u32> = HashMap::new();
        let mut length = 0u32;
        for lang in Language::ALL {
            for term in record.text(lang).map(text::terms).unwrap_or_default() {
                length += 1;
                *tf.entry(term).or_default() += 1;
            }
        }
        for (term, count) in tf {
            postings.entry(term).or_default().push((id, count));
        }
        let mut citations: Vec<String> = [&record.citation_en, &record.citation_fr]
            .into_iter()
            .filter_map(|c| c.as_deref())
            .map(normalize_citation)
            .filter(|c| !c.is_empty())
            .collect();
        let key = record.key();
        citations.push(key.citation.clone());
        citations.dedup();
        docs.push(IndexedDoc {
            key,
            kind: record.kind,
            date: record.date(),
            name: record.display_name().map(str::to_owned),
            folded_names: Language::ALL.iter().filter_map(|&l| record.name(l)).map(text::fold).collect(),
            citations,
            length,
        });
    }
    // Entries were pushed in doc-id order already; sorting keeps that explicit.
    for list in postings.values_mut() {
        list.sort_unstable_by_key(|&(id, _)| id);
    }
    Index { snapshot: snapshot.clone(), docs, postings }
}

impl Index {
    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn version(&self) -> u64 {
        self.snapshot.version()
    }

    pub fn snapshot(&self) -> &CorpusSnapshot {
        &self.snapshot
    }

    fn metadata_matches(&self, doc: &IndexedDoc, q: &QuerySpec, citation: Option<&str>, name: Option<&str>) -> bool {
        if q.kind.is_some_and(|k| k != doc.kind) {
            return false;
        }
        if !q.datasets.is_empty() && !q.datasets.iter().any(|d| d == &doc.key.dataset) {
            return false;
        }
        if let Some(c) = citation {
            if !doc.citations.iter().any(|dc| dc == c) {
                return false;
            }
        }
        if let Some(n) = name {
            if !doc.folded_names.iter().any(|dn| dn.contains(n)) {
                return false;
            }
        }
        if q.date_from.is_some() || q.date_to.is_some() {
            let Some(date) = doc.date else { return false };
            if q.date_from.is_some_and(|f| date < f) || q.date_to.is_some_and(|t| date > t) {
                return false;
            }
        }
        true
    }

    /// Every match as `(doc id, score)`, fully ordered.
    fn ranked(&self, q: &QuerySpec) -> Vec<(u32, f64)> {
        let terms = q.terms();
        let citation = q.citation.as_deref().map(normalize_citation);
        let name = q.name.as_deref().map(text::fold);

        let mut scored: Vec<(u32, f64)> = if terms.is_empty() {
            (0..self.docs.len() as u32).map(|id| (id, 0.0)).collect()
        } else {
            let mut lists: Vec<&[(u32, u32)]> = Vec::with_capacity(terms.len());
            for t in &terms {
                match self.postings.get(t) {
                    Some(list) => lists.push(list),
                    None => return Vec::new(),
                }
            }
            lists.sort_by_key(|l| l.len());
            intersect(&lists)
                .into_iter()
                .map(|(id, tf_sum)| {
                    let len = self.docs[id as usize].length.max(1);
                    (id, f64::from(tf_sum) / f64::from(len))
                })
                .collect()
        };
        scored
            .retain(|&(id, _)| self.metadata_matches(&self.docs[id as usize], q, citation.as_deref(), name.as_deref()));
        scored.sort_by(|a, b| self.hit_order(*a, *b));
        scored
    }

    fn hit_order(&self, (ia, sa): (u32, f64), (ib, sb): (u32, f64)) -> Ordering {
        let (a, b) = (&self.docs[ia as usize], &self.docs[ib as usize]);
        sb.total_cmp(&sa)
            .then_with(|| match (a.date, b.date) {
                (Some(x), Some(y)) => y.cmp(&x),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => Ordering::Equal,
            })
            .then_with(|| a.key.citation.cmp(&b.key.citation))
            .then_with(|| a.key.dataset.cmp(&b.key.dataset))
    }

    /// Keys of every match in result order, ignoring pagination.
    pub fn matching_keys(&self, q: &QuerySpec) -> Result<Vec<RecordKey>, QueryError> {
        q.validate()?;
        Ok(self.ranked(q).into_iter().map(|(id, _)| self.docs[id as usize].key.clone()).collect())
    }

    pub fn search(&self, q: &QuerySpec) -> Result<SearchPage, QueryError> {
        q.validate()?;
        let ranked = self.ranked(q);
        let total = ranked.len();
        let start = (q.page as usize - 1).saturating_mul(q.page_size as usize);
        let terms = q.terms();
        let hits = ranked
            .iter()
            .skip(start)
            .take(q.page_size as usize)
            .map(|&(id, score)| {
                let doc = &self.docs[id as usize];
                SearchHit {
                    dataset: doc.key.dataset.clone(),
                    citation: doc.key.citation.clone(),
                    name: doc.name.clone(),
                    date: doc.date,
                    snippet: self.snippet(&doc.key, &terms),
                    score,
                }
            })
            .collect();
        Ok(SearchPage { hits, total, page: q.page, page_size: q.page_size })
    }

    fn snippet(&self, key: &RecordKey, terms: &[String]) -> String {
        let Some(record) = self.snapshot.get(key) else { return String::new() };
        let texts: Vec<&str> = Language::ALL.iter().filter_map(|&l| record.nonempty_text(l)).collect();
        for text in &texts {
            if let Some(&(start, _, _)) = text::term_spans(text).iter().find(|(_, _, t)| terms.contains(t)) {
                return window(text, start);
            }
        }
        texts.first().map(|t| window(t, 0)).unwrap_or_default()
    }
}

/// Doc ids present in every list, with the summed term frequencies.
fn intersect(lists: &[&[(u32, u32)]]) -> Vec<(u32, u32)> {
    let Some((first, rest)) = lists.split_first() else { return Vec::new() };
    first
        .iter()
        .filter_map(|&(id, tf)| {
            let mut sum = tf;
            for list in rest {
                let pos = list.binary_search_by_key(&id, |&(d, _)| d).ok()?;
                sum += list[pos].1;
            }
            Some((id, sum))
        })
        .collect()
}

/// Up to [`SNIPPET_MAX_CHARS`] characters of `text` around byte offset `at`.
fn window(text: &str, at: usize) -> String {
    let lead_start = text[..at].char_indices().rev().nth(SNIPPET_LEAD_CHARS - 1).map_or(0, |(i, _)| i);
    let start = if at == 0 { 0 } else { lead_start };
    let end = text[start..].char_indices().nth(SNIPPET_MAX_CHARS).map_or(text.len(), |(i, _)| start + i);
    text[start..end].trim().to_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::case;

    fn fixture() -> CorpusSnapshot {
        CorpusSnapshot::new(
            1,
            vec![
                case("FC", "2024 FC 1", "2024-01-10", "The officer refused the work permit."),
                case("FC", "2024 FC 2", "2024-02-10", "The refugee claimant alleged persecution."),
                case("FCA", "2024 FCA 3", "2024-03-10", "Appeal dismissed with costs."),
                case("FC", "2024 FC 4", "2024-04-10", "Réfugié: the REFUGEE Appeal Division erred."),
                case("SCC", "2024 SCC 5", "2024-05-10", "Constitutional question answered."),
            ],
        )
        .unwrap()
    }

    fn keys(page: &SearchPage) -> Vec<String> {
        page.hits.iter().map(|h| h.citation.clone()).collect()
    }

    #[test]
    fn empty_snapshot_indexes_nothing() {
        assert_eq!(build_index(&CorpusSnapshot::empty()).len(), 0);
        assert_eq!(build_index(&fixture()).len(), 5);
    }

    #[test]
    fn full_text_matches_docs_two_and_four() {
        let idx = build_index(&fixture());
        let page = idx.search(&QuerySpec::text("refugee")).unwrap();
        let mut got = keys(&page);
        got.sort();
        assert_eq!(got, vec!["2024 FC 2", "2024 FC 4"]);
        assert_eq!(page.total, 2);
        // Doc 2: 1 of 5 terms. Doc 4: 1 of 6 ("Réfugié" folds to "refugie").
        assert_eq!(page.hits[0].citation, "2024 FC 2");
        assert!((page.hits[0].score - 1.0 / 5.0).abs() < 1e-12);
        assert!((page.hits[1].score - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn citation_lookup() {
        let idx = build_index(&fixture());
        let page = idx.search(&QuerySpec::citation(" 2024  FCA 3")).unwrap();
        assert_eq!((keys(&page), page.total), (vec!["2024 FCA 3".to_owned()], 1));
    }

    #[test]
    fn no_criteria_is_invalid() {
        let idx = build_index(&fixture());
        assert_eq!(idx.search(&QuerySpec::default()).unwrap_err(), QueryError::NoCriteria);
        let q = QuerySpec { kind: Some(DocumentKind::Case), ..Default::default() };
        assert_eq!(idx.search(&q).unwrap_err(), QueryError::NoCriteria);
        let q = QuerySpec { page_size: 201, ..QuerySpec::text("x") };
        assert_eq!(idx.search(&q).unwrap_err(), QueryError::PageSizeOutOfRange(201));
        let q = QuerySpec { page: 0, ..QuerySpec::text("x") };
        assert_eq!(idx.search(&q).unwrap_err(), QueryError::PageOutOfRange);
        assert!(matches!(idx.search(&QuerySpec::text("--")), Err(QueryError::NoTerms(_))));
    }

    #[test]
    fn page_beyond_last_is_empty_with_total() {
        let idx = build_index(&fixture());
        let q = QuerySpec { datasets: vec!["FC".into()], page: 5, page_size: 2, ..Default::default() };
        let page = idx.search(&q).unwrap();
        assert!(page.hits.is_empty());
        assert_eq!(page.total, 3);
    }

    #[test]
    fn metadata_only_queries_order_by_date_desc() {
        let idx = build_index(&fixture());
        let q = QuerySpec { datasets: vec!["FC".into()], ..Default::default() };
        assert_eq!(keys(&idx.search(&q).unwrap()), vec!["2024 FC 4", "2024 FC 2", "2024 FC 1"]);
    }

    #[test]
    fn name_substring_is_folded() {
        let idx = build_index(&fixture());
        let q = QuerySpec { name: Some("APPLICANT v. respondent (2024 scc".into()), ..Default::default() };
        assert_eq!(keys(&idx.search(&q).unwrap()), vec!["2024 SCC 5"]);
    }

    #[test]
    fn snippet_is_verbatim_and_bounded() {
        let long = format!("{} refugee {}", "a ".repeat(400), "b ".repeat(400));
        let snap = CorpusSnapshot::new(1, vec![case("FC", "2024 FC 9", "2024-01-01", &long)]).unwrap();
        let idx = build_index(&snap);
        let hit = &idx.search(&QuerySpec::text("refugee")).unwrap().hits[0];
        assert!(hit.snippet.chars().count() <= SNIPPET_MAX_CHARS);
        assert!(long.contains(&hit.snippet));
        assert!(hit.snippet.contains("refugee"));
    }

    #[test]
    fn snippet_window_respects_char_boundaries() {
        let text = "é".repeat(500);
        let w = window(&text, text.len() / 2);
        assert_eq!(w.chars().count(), SNIPPET_MAX_CHARS);
    }
}
