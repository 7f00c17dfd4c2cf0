//! Corpus analytics: readability trends, decision length by judge, weekly
//! volume, and the weekly digest memorandum with its podcast script.
//!
//! Everything here is a pure function of a snapshot and parameters.

pub mod digest;
pub mod judges;
pub mod metrics;
pub mod readability;
#[cfg(feature = "remote-model")]
pub mod remote;
pub mod script;
pub mod volume;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::model::{DocumentRecord, Language};

pub use digest::{
    weekly_digest, CaseSummary, Classifier, DigestMemo, KeywordClassifier, Outcome, Summarizer, TemplateSummarizer,
};
pub use judges::{extract_judge, median_wordcount_by_judge, JudgeReport, JudgeRow};
pub use metrics::{flesch_reading_ease, text_metrics, TextMetrics};
pub use readability::{readability_trend, ReadabilityTrend};
pub use script::digest_to_script;
pub use volume::{weekly_volume, IsoWeek, WeeklyVolume};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("text has no words; the score is undefined")]
    NoWords,
    #[error("dataset `{0}` has no records in this corpus")]
    UnknownDataset(String),
    #[error("year range {0}..={1} is empty")]
    EmptyYearRange(i32, i32),
    #[error("invalid ISO week `{0}` (expected YYYY-Www)")]
    BadWeek(String),
    #[error("judge pattern file: {0}")]
    Patterns(String),
    #[error("model client: {0}")]
    Model(String),
}

/// Restricts analyses to a subject area.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopicFilter {
    #[default]
    All,
    /// Immigration files: an `IMM-` docket in the secondary citation or in
    /// the header of either text.
    Immigration,
}

impl TopicFilter {
    pub fn matches(self, record: &DocumentRecord) -> bool {
        match self {
            TopicFilter::All => true,
            TopicFilter::Immigration => is_immigration_file(record),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TopicFilter::All => "all",
            TopicFilter::Immigration => "immigration",
        }
    }
}

impl FromStr for TopicFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(TopicFilter::All),
            "immigration" | "imm" => Ok(TopicFilter::Immigration),
            other => Err(format!("unknown topic `{other}` (expected all or immigration)")),
        }
    }
}

impl fmt::Display for TopicFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn imm_docket() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\bIMM-\d{1,6}-\d{2}\b").unwrap())
}

fn is_immigration_file(record: &DocumentRecord) -> bool {
    let secondary = [&record.citation2_en, &record.citation2_fr]
        .into_iter()
        .filter_map(|c| c.as_deref())
        .any(|c| c.trim_start().starts_with("IMM-"));
    secondary
        || Language::ALL.iter().filter_map(|&l| record.text(l)).any(|t| {
            let header = match t.char_indices().nth(judges::HEADER_CHARS) {
                Some((i, _)) => &t[..i],
                None => t,
            };
            imm_docket().is_match(header)
        })
}

/// Median of `values`; the mean of the two middle values for even lengths.
pub fn median_f64(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 { values[mid] } else { (values[mid - 1] + values[mid]) / 2.0 })
}

pub fn median_u64(values: &mut [u64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable();
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 { values[mid] as f64 } else { (values[mid - 1] as f64 + values[mid] as f64) / 2.0 })
}
