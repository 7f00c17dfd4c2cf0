use chrono::Datelike;
use serde::{Deserialize, Serialize};

use super::{median_f64, metrics, AnalyticsError};
use crate::model::{DocumentKind, Language};
use crate::snapshot::CorpusSnapshot;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearPoint {
    pub year: i32,
    /// `None` marks a year without any scored decision.
    pub median: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadabilityTrend {
    pub dataset: String,
    pub points: Vec<YearPoint>,
}

/// Per-year median Flesch Reading Ease of a dataset's decisions, computed on
/// English text. Decisions without English words are not scored.
pub fn readability_trend(
    snapshot: &CorpusSnapshot,
    dataset: &str,
    first_year: i32,
    last_year: i32,
) -> Result<ReadabilityTrend, AnalyticsError> {
    if first_year > last_year {
        return Err(AnalyticsError::EmptyYearRange(first_year, last_year));
    }
    if !snapshot.records().any(|r| r.dataset == dataset) {
        return Err(AnalyticsError::UnknownDataset(dataset.to_owned()));
    }
    let span = (last_year - first_year + 1) as usize;
    let mut scores: Vec<Vec<f64>> = vec![Vec::new(); span];
    for record in snapshot.records() {
        if record.dataset != dataset || record.kind != DocumentKind::Case {
            continue;
        }
        let Some(year) = record.date().map(|d| d.year()) else { continue };
        if year < first_year || year > last_year {
            continue;
        }
        let Some(text) = record.text(Language::En) else { continue };
        if let Ok(score) = metrics::flesch_reading_ease(text) {
            scores[(year - first_year) as usize].push(score);
        }
    }
    let points = scores
        .into_iter()
        .enumerate()
        .map(|(i, mut s)| YearPoint { year: first_year + i as i32, n: s.len(), median: median_f64(&mut s) })
        .collect();
    Ok(ReadabilityTrend { dataset: dataset.to_owned(), points })
}

impl ReadabilityTrend {
    /// `year\tmedian\tn`, with `NA` for empty years.
    pub fn to_tsv(&self) -> String {
        let rows: Vec<[String; 3]> = self
            .points
            .iter()
            .map(|p| {
                let median = p.median.map_or_else(|| "NA".to_owned(), |m| format!("{m:.4}"));
                [p.year.to_string(), median, p.n.to_string()]
            })
            .collect();
        crate::report::tsv(&["year", "median_flesch", "n"], &rows)
    }

    pub fn to_table(&self) -> String {
        let rows: Vec<[String; 3]> = self
            .points
            .iter()
            .map(|p| {
                let median = p.median.map_or_else(|| "(no decisions)".to_owned(), |m| format!("{m:.2}"));
                [p.year.to_string(), median, p.n.to_string()]
            })
            .collect();
        crate::report::table(&["Year", "Median Reading Ease", "Decisions"], &rows, &[false, true, true])
    }
}
