//! Judge attribution from decision headers, and per-judge decision length.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use chrono::NaiveDate;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{median_u64, metrics, AnalyticsError, TopicFilter};
use crate::model::{DocumentKind, DocumentRecord, Language};
use crate::report;
use crate::snapshot::CorpusSnapshot;

/// Only this many leading characters of a text are searched for a header.
pub const HEADER_CHARS: usize = 2_000;
pub const UNKNOWN_JUDGE: &str = "UNKNOWN";

const BUILTIN_PATTERNS: &str = include_str!("../../data/judge_patterns.toml");

#[derive(Debug, Deserialize)]
struct PatternFile {
    version: u32,
    pattern: Vec<PatternEntry>,
}

#[derive(Debug, Deserialize)]
struct PatternEntry {
    name: String,
    regex: String,
}

#[derive(Debug, Clone)]
pub struct JudgePattern {
    pub name: String,
    pub regex: Regex,
}

/// Ordered header patterns, loaded from a versioned pattern file.
#[derive(Debug, Clone)]
pub struct JudgePatterns {
    pub version: u32,
    pub patterns: Vec<JudgePattern>,
}

impl JudgePatterns {
    pub fn from_toml(source: &str) -> Result<Self, AnalyticsError> {
        let file: PatternFile = toml::from_str(source).map_err(|e| AnalyticsError::Patterns(e.to_string()))?;
        let mut patterns = Vec::with_capacity(file.pattern.len());
        for entry in file.pattern {
            let regex = Regex::new(&entry.regex)
                .map_err(|e| AnalyticsError::Patterns(format!("pattern `{}`: {e}", entry.name)))?;
            if !regex.capture_names().any(|n| n == Some("surname")) {
                return Err(AnalyticsError::Patterns(format!("pattern `{}` has no `surname` group", entry.name)));
            }
            patterns.push(JudgePattern { name: entry.name, regex });
        }
        Ok(JudgePatterns { version: file.version, patterns })
    }

    pub fn builtin() -> &'static JudgePatterns {
        static BUILTIN: OnceLock<JudgePatterns> = OnceLock::new();
        BUILTIN.get_or_init(|| JudgePatterns::from_toml(BUILTIN_PATTERNS).expect("bundled judge patterns are valid"))
    }

    /// Uppercased surname from the first matching pattern, if any.
    pub fn extract_from_text(&self, text: &str) -> Option<String> {
        let header = match text.char_indices().nth(HEADER_CHARS) {
            Some((i, _)) => &text[..i],
            None => text,
        };
        self.patterns.iter().find_map(|p| {
            p.regex
                .captures(header)
                .and_then(|c| c.name("surname"))
                .map(|m| m.as_str().split_whitespace().collect::<Vec<_>>().join(" ").to_uppercase())
        })
    }

    pub fn extract(&self, record: &DocumentRecord) -> Option<String> {
        Language::ALL.iter().filter_map(|&l| record.text(l)).find_map(|t| self.extract_from_text(t))
    }
}

/// Judge surname from the decision header, or `None` when no pattern matches.
pub fn extract_judge(record: &DocumentRecord) -> Option<String> {
    JudgePatterns::builtin().extract(record)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeRow {
    pub judge: String,
    pub median_words: f64,
    pub decisions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeReport {
    pub dataset: String,
    /// Ascending by median, then by surname.
    pub rows: Vec<JudgeRow>,
    /// Matching decisions whose judge could not be identified.
    pub unattributed: usize,
    /// Matching decisions without English text.
    pub without_english_text: usize,
}

/// Groups a dataset's decisions by judge and reports each judge's median
/// English word count.
pub fn median_wordcount_by_judge(
    snapshot: &CorpusSnapshot,
    dataset: &str,
    topic: TopicFilter,
    date_from: Option<NaiveDate>,
    date_to: Option<NaiveDate>,
) -> JudgeReport {
    median_wordcount_by_judge_with(JudgePatterns::builtin(), snapshot, dataset, topic, date_from, date_to)
}

pub fn median_wordcount_by_judge_with(
    patterns: &JudgePatterns,
    snapshot: &CorpusSnapshot,
    dataset: &str,
    topic: TopicFilter,
    date_from: Option<NaiveDate>,
    date_to: Option<NaiveDate>,
) -> JudgeReport {
    let mut groups: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    let mut unattributed = 0;
    let mut without_english_text = 0;
    for record in snapshot.records() {
        if record.dataset != dataset || record.kind != DocumentKind::Case || !topic.matches(record) {
            continue;
        }
        if date_from.is_some() || date_to.is_some() {
            match record.date() {
                Some(d) if date_from.is_none_or(|f| d >= f) && date_to.is_none_or(|t| d <= t) => {}
                _ => continue,
            }
        }
        let Some(text) = record.nonempty_text(Language::En) else {
            without_english_text += 1;
            continue;
        };
        match patterns.extract(record) {
            Some(judge) => groups.entry(judge).or_default().push(metrics::word_count(text)),
            None => unattributed += 1,
        }
    }
    let mut rows: Vec<JudgeRow> = groups
        .into_iter()
        .map(|(judge, mut counts)| JudgeRow {
            median_words: median_u64(&mut counts).unwrap_or(0.0),
            decisions: counts.len(),
            judge,
        })
        .collect();
    rows.sort_by(|a, b| a.median_words.total_cmp(&b.median_words).then_with(|| a.judge.cmp(&b.judge)));
    JudgeReport { dataset: dataset.to_owned(), rows, unattributed, without_english_text }
}

impl JudgeReport {
    /// The `n` lowest rows followed by the `n` highest, ascending, without
    /// repeating rows when there are fewer than `2n` judges.
    pub fn extremes(&self, n: usize) -> Vec<&JudgeRow> {
        if self.rows.len() <= 2 * n {
            return self.rows.iter().collect();
        }
        self.rows[..n].iter().chain(&self.rows[self.rows.len() - n..]).collect()
    }

    fn cells(rows: &[&JudgeRow], grouped: bool) -> Vec<[String; 3]> {
        rows.iter()
            .map(|r| {
                let median = if r.median_words.fract() == 0.0 {
                    let whole = r.median_words as u64;
                    if grouped {
                        report::group_thousands(whole)
                    } else {
                        whole.to_string()
                    }
                } else {
                    format!("{:.1}", r.median_words)
                };
                let decisions =
                    if grouped { report::group_thousands(r.decisions as u64) } else { r.decisions.to_string() };
                [r.judge.clone(), median, decisions]
            })
            .collect()
    }

    const HEADER: [&'static str; 3] = ["Justice", "Median Word Count", "Decisions"];

    pub fn to_tsv(&self, extremes: Option<usize>) -> String {
        let rows = self.selected(extremes);
        report::tsv(&Self::HEADER, &Self::cells(&rows, false))
    }

    pub fn to_table(&self, extremes: Option<usize>) -> String {
        let rows = self.selected(extremes);
        report::table(&Self::HEADER, &Self::cells(&rows, true), &[false, true, true])
    }

    fn selected(&self, extremes: Option<usize>) -> Vec<&JudgeRow> {
        match extremes {
            Some(n) => self.extremes(n),
            None => self.rows.iter().collect(),
        }
    }
}
