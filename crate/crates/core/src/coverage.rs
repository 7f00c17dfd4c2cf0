//! Per-dataset coverage statistics (earliest/latest date, documents, tokens).

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::model::Language;
use crate::report::group_thousands;
use crate::snapshot::CorpusSnapshot;
use crate::tokenizer::Tokenizer;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub dataset: String,
    pub earliest: Option<NaiveDate>,
    pub latest: Option<NaiveDate>,
    pub documents: u64,
    pub tokens: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageTotals {
    pub documents: u64,
    pub tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub rows: Vec<CoverageRow>,
    pub totals: CoverageTotals,
    pub tokenizer: String,
}

/// One row per dataset, ordered by dataset code, plus column totals.
///
/// Tokens are summed over both language texts of every record. Undated
/// records still count as documents.
pub fn coverage_stats(snapshot: &CorpusSnapshot, tokenizer: &Tokenizer) -> CoverageReport {
    let mut rows: BTreeMap<&str, CoverageRow> = BTreeMap::new();
    for record in snapshot.records() {
        let row = rows.entry(record.dataset.as_str()).or_insert_with(|| CoverageRow {
            dataset: record.dataset.clone(),
            earliest: None,
            latest: None,
            documents: 0,
            tokens: 0,
        });
        row.documents += 1;
        row.tokens +=
            Language::ALL.iter().filter_map(|&lang| record.text(lang)).map(|t| tokenizer.count_tokens(t)).sum::<u64>();
        if let Some(date) = record.date() {
            row.earliest = Some(row.earliest.map_or(date, |d| d.min(date)));
            row.latest = Some(row.latest.map_or(date, |d| d.max(date)));
        }
    }
    let rows: Vec<CoverageRow> = rows.into_values().collect();
    let totals = CoverageTotals {
        documents: rows.iter().map(|r| r.documents).sum(),
        tokens: rows.iter().map(|r| r.tokens).sum(),
    };
    CoverageReport { rows, totals, tokenizer: tokenizer.describe() }
}

impl CoverageReport {
    const HEADER: [&'static str; 5] = ["Dataset", "Earliest", "Latest", "Documents", "Token Count"];

    fn cells(&self, grouped: bool) -> Vec<[String; 5]> {
        let num = |n: u64| if grouped { group_thousands(n) } else { n.to_string() };
        let date = |d: Option<NaiveDate>| d.map(|d| d.to_string()).unwrap_or_default();
        let mut out: Vec<[String; 5]> = self
            .rows
            .iter()
            .map(|r| [r.dataset.clone(), date(r.earliest), date(r.latest), num(r.documents), num(r.tokens)])
            .collect();
        out.push(["TOTAL".into(), String::new(), String::new(), num(self.totals.documents), num(self.totals.tokens)]);
        out
    }

    pub fn to_tsv(&self) -> String {
        crate::report::tsv(&Self::HEADER, &self.cells(false))
    }

    pub fn to_table(&self) -> String {
        crate::report::table(&Self::HEADER, &self.cells(true), &[false, false, false, true, true])
    }
}
