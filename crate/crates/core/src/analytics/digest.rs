//! Weekly digest memorandum: which decisions came out, which found an error,
//! and a short note on each.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::judges::extract_judge;
use super::{metrics, AnalyticsError, IsoWeek, TopicFilter};
use crate::model::{DocumentKind, DocumentRecord, Language};
use crate::report::group_thousands;
use crate::snapshot::CorpusSnapshot;
use crate::text::fold;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    /// Application or appeal allowed: the court found a reviewable error.
    Allowed,
    Dismissed,
    Other,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Allowed => "allowed",
            Outcome::Dismissed => "dismissed",
            Outcome::Other => "other",
        }
    }
}

pub trait Classifier {
    fn name(&self) -> &str;
    fn classify(&self, record: &DocumentRecord) -> Result<Outcome, AnalyticsError>;
}

/// Category and notes for one decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseNotes {
    pub category: String,
    pub facts: String,
    pub errors: String,
}

pub trait Summarizer {
    fn name(&self) -> &str;
    fn summarize(&self, record: &DocumentRecord, outcome: Outcome) -> Result<CaseNotes, AnalyticsError>;
    fn key_themes(&self, memo: &DigestMemo) -> Result<String, AnalyticsError>;
}

/// Matches fixed judgment phrases. When both outcomes appear, the phrase
/// occurring last in the text wins, since the formal judgment closes a
/// decision.
#[derive(Debug, Clone)]
pub struct KeywordClassifier {
    allowed: Vec<String>,
    dismissed: Vec<String>,
}

impl Default for KeywordClassifier {
    fn default() -> Self {
        let fold_all = |phrases: &[&str]| phrases.iter().map(|p| fold(p)).collect();
        KeywordClassifier {
            allowed: fold_all(&[
                "application for judicial review is allowed",
                "application for judicial review is granted",
                "application is allowed",
                "application is granted",
                "appeal is allowed",
                "judicial review is allowed",
                "demande de contrôle judiciaire est accueillie",
                "appel est accueilli",
            ]),
            dismissed: fold_all(&[
                "application for judicial review is dismissed",
                "application is dismissed",
                "appeal is dismissed",
                "judicial review is dismissed",
                "demande de contrôle judiciaire est rejetée",
                "appel est rejeté",
            ]),
        }
    }
}

impl KeywordClassifier {
    fn last_hit(haystack: &str, phrases: &[String]) -> Option<usize> {
        phrases.iter().filter_map(|p| haystack.rfind(p.as_str())).max()
    }
}

impl Classifier for KeywordClassifier {
    fn name(&self) -> &str {
        "keyword"
    }

    fn classify(&self, record: &DocumentRecord) -> Result<Outcome, AnalyticsError> {
        let text: String = Language::ALL
            .iter()
            .filter_map(|&l| record.text(l))
            .map(|t| t.split_whitespace().collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join(" ");
        let folded = fold(&text);
        Ok(match (Self::last_hit(&folded, &self.allowed), Self::last_hit(&folded, &self.dismissed)) {
            (Some(a), Some(d)) if a > d => Outcome::Allowed,
            (Some(_), Some(_)) => Outcome::Dismissed,
            (Some(_), None) => Outcome::Allowed,
            (None, Some(_)) => Outcome::Dismissed,
            (None, None) => Outcome::Other,
        })
    }
}

/// Deterministic summarizer built from keyword rules and sentence extraction.
#[derive(Debug, Clone, Default)]
pub struct TemplateSummarizer;

/// `(category, trigger phrases)`, tried in order.
const CATEGORY_RULES: &[(&str, &[&str])] = &[
    (
        "Refugee protection",
        &[
            "refugee protection division",
            "refugee appeal division",
            "convention refugee",
            "person in need of protection",
            "pre-removal risk assessment",
            "refugee claim",
        ],
    ),
    ("Humanitarian and compassionate", &["humanitarian and compassionate", "h&c"]),
    (
        "Economic and temporary residence",
        &[
            "work permit",
            "study permit",
            "temporary resident visa",
            "visitor visa",
            "express entry",
            "skilled worker",
            "permanent residence",
        ],
    ),
    (
        "Enforcement and inadmissibility",
        &["inadmissib", "removal order", "deportation", "detention review", "stay of removal"],
    ),
    ("Citizenship", &["citizenship judge", "grant of citizenship", "revocation of citizenship"]),
];

pub const OTHER_CATEGORY: &str = "Other";
const NOTE_MAX_CHARS: usize = 400;
const ERROR_CUES: &[&str] =
    &["unreasonabl", "erred", "error", "procedural fairness", "failed to", "fettered", "misapprehend"];

fn clip(s: &str) -> String {
    match s.char_indices().nth(NOTE_MAX_CHARS) {
        Some((i, _)) => format!("{}…", s[..i].trim_end()),
        None => s.to_owned(),
    }
}

/// Body of the decision: from the first numbered paragraph `[1]` if present.
fn body(text: &str) -> &str {
    text.find("[1]").map_or(text, |i| &text[i..])
}

impl TemplateSummarizer {
    pub fn category(text: &str) -> &'static str {
        let folded = fold(text);
        CATEGORY_RULES
            .iter()
            .find(|(_, cues)| cues.iter().any(|c| folded.contains(c)))
            .map_or(OTHER_CATEGORY, |(name, _)| name)
    }
}

impl Summarizer for TemplateSummarizer {
    fn name(&self) -> &str {
        "template"
    }

    fn summarize(&self, record: &DocumentRecord, outcome: Outcome) -> Result<CaseNotes, AnalyticsError> {
        let text = record.nonempty_text(Language::En).or(record.nonempty_text(Language::Fr)).unwrap_or("");
        let sentences = metrics::sentences(body(text));
        let facts = sentences
            .iter()
            .find(|s| metrics::word_count(s) >= 8)
            .or(sentences.first())
            .map(|s| clip(s))
            .unwrap_or_default();
        let errors = match outcome {
            Outcome::Allowed => sentences
                .iter()
                .find(|s| {
                    let f = fold(s);
                    ERROR_CUES.iter().any(|c| f.contains(c))
                })
                .map(|s| clip(s))
                .unwrap_or_else(|| "The Court found a reviewable error.".to_owned()),
            Outcome::Dismissed => "No reviewable error found.".to_owned(),
            Outcome::Other => String::new(),
        };
        Ok(CaseNotes { category: Self::category(text).to_owned(), facts, errors })
    }

    fn key_themes(&self, memo: &DigestMemo) -> Result<String, AnalyticsError> {
        if memo.summaries.is_empty() {
            return Ok("No decisions were released in this period.".to_owned());
        }
        let mut by_category: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for s in &memo.summaries {
            let e = by_category.entry(s.category.as_str()).or_default();
            e.0 += 1;
            if s.outcome == Outcome::Allowed {
                e.1 += 1;
            }
        }
        let parts: Vec<String> =
            by_category.iter().map(|(cat, (n, allowed))| format!("{cat} ({n} decided, {allowed} allowed)")).collect();
        let mut out = format!(
            "{} of {} decisions were allowed. By category: {}.",
            memo.totals.allowed,
            memo.totals.decisions,
            parts.join("; ")
        );
        if memo.totals.allowed == 0 {
            out.push_str(" No reviewable errors were identified this period.");
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub citation: String,
    pub name: Option<String>,
    pub judge: Option<String>,
    pub category: String,
    pub outcome: Outcome,
    pub facts: String,
    pub errors: String,
    pub words: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigestTotals {
    pub decisions: usize,
    pub allowed: usize,
    pub words: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigestMemo {
    pub dataset: String,
    pub topic: TopicFilter,
    pub period: IsoWeek,
    pub totals: DigestTotals,
    pub key_themes: String,
    /// Ordered by category, then citation.
    pub summaries: Vec<CaseSummary>,
    pub classifier: String,
    pub summarizer: String,
}

pub const NO_DECISIONS_NOTE: &str = "No decisions were released in this period.";

/// Builds the memorandum for one ISO week of one dataset.
pub fn weekly_digest(
    snapshot: &CorpusSnapshot,
    dataset: &str,
    week: IsoWeek,
    topic: TopicFilter,
    classifier: &dyn Classifier,
    summarizer: &dyn Summarizer,
) -> Result<DigestMemo, AnalyticsError> {
    let mut summaries = Vec::new();
    for record in snapshot.records() {
        if record.dataset != dataset || record.kind != DocumentKind::Case || !topic.matches(record) {
            continue;
        }
        if !record.date().is_some_and(|d| week.contains(d)) {
            continue;
        }
        let outcome = classifier.classify(record)?;
        let notes = summarizer.summarize(record, outcome)?;
        summaries.push(CaseSummary {
            citation: record.key().citation,
            name: record.display_name().map(str::to_owned),
            judge: extract_judge(record),
            category: notes.category,
            outcome,
            facts: notes.facts,
            errors: notes.errors,
            words: record.text(Language::En).map(metrics::word_count).unwrap_or(0),
        });
    }
    summaries.sort_by(|a, b| a.category.cmp(&b.category).then_with(|| a.citation.cmp(&b.citation)));
    let totals = DigestTotals {
        decisions: summaries.len(),
        allowed: summaries.iter().filter(|s| s.outcome == Outcome::Allowed).count(),
        words: summaries.iter().map(|s| s.words).sum(),
    };
    let mut memo = DigestMemo {
        dataset: dataset.to_owned(),
        topic,
        period: week,
        totals,
        key_themes: String::new(),
        summaries,
        classifier: classifier.name().to_owned(),
        summarizer: summarizer.name().to_owned(),
    };
    memo.key_themes = summarizer.key_themes(&memo)?;
    Ok(memo)
}

impl DigestMemo {
    pub fn title(&self) -> String {
        let topic = match self.topic {
            TopicFilter::All => String::new(),
            TopicFilter::Immigration => " immigration/refugee".to_owned(),
        };
        format!(
            "Memorandum: {}{} decisions, week {} ({} to {})",
            self.dataset,
            topic,
            self.period,
            self.period.monday(),
            self.period.sunday()
        )
    }

    /// Plain-text memo: Overview, Key themes, Case summaries.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}\n", self.title());
        let _ = writeln!(out, "Overview\n");
        let _ = writeln!(out, "- Total decisions: {}", self.totals.decisions);
        let _ = writeln!(out, "- Allowed (error found): {}", self.totals.allowed);
        let _ = writeln!(out, "- Total words released: {}\n", group_thousands(self.totals.words));
        let _ = writeln!(out, "Key themes: {}\n", self.key_themes);
        let _ = writeln!(out, "Case summaries\n");
        if self.summaries.is_empty() {
            let _ = writeln!(out, "{NO_DECISIONS_NOTE}");
        }
        for (i, s) in self.summaries.iter().enumerate() {
            let judge = s.judge.as_deref().map(|j| format!(" ({j} J.)")).unwrap_or_default();
            let name = s.name.as_deref().map(|n| format!("{n}, ")).unwrap_or_default();
            let _ = writeln!(out, "{}) {name}{}{judge} – {} – {}", i + 1, s.citation, s.category, s.outcome.label());
            if !s.facts.is_empty() {
                let _ = writeln!(out, "– Facts: {}", s.facts);
            }
            if !s.errors.is_empty() {
                let _ = writeln!(out, "– Errors: {}", s.errors);
            }
            let _ = writeln!(out);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::case;

    #[test]
    fn keyword_classifier_takes_last_judgment_phrase() {
        let k = KeywordClassifier::default();
        let r = case("FC", "2025 FC 1", "2025-08-05", "The Minister argued the application is dismissed. THIS COURT'S JUDGMENT is that the application for judicial review is allowed.");
        assert_eq!(k.classify(&r).unwrap(), Outcome::Allowed);
        let r = case("FC", "2025 FC 2", "2025-08-05", "The application for judicial review is dismissed.");
        assert_eq!(k.classify(&r).unwrap(), Outcome::Dismissed);
        let r = case("FC", "2025 FC 3", "2025-08-05", "Motion for an extension of time granted.");
        assert_eq!(k.classify(&r).unwrap(), Outcome::Other);
        let mut r = case("FC", "2025 FC 4", "2025-08-05", "x");
        r.unofficial_text_en = None;
        r.unofficial_text_fr = Some("La demande de contrôle judiciaire est accueillie.".into());
        assert_eq!(k.classify(&r).unwrap(), Outcome::Allowed);
    }

    #[test]
    fn categories() {
        assert_eq!(TemplateSummarizer::category("a refused WORK PERMIT"), "Economic and temporary residence");
        assert_eq!(TemplateSummarizer::category("The Refugee Appeal Division"), "Refugee protection");
        assert_eq!(TemplateSummarizer::category("mandamus"), OTHER_CATEGORY);
    }

    #[test]
    fn empty_week_memo() {
        let memo = weekly_digest(
            &CorpusSnapshot::empty(),
            "FC",
            "2025-W32".parse().unwrap(),
            TopicFilter::All,
            &KeywordClassifier::default(),
            &TemplateSummarizer,
        )
        .unwrap();
        assert_eq!(memo.totals, DigestTotals::default());
        assert!(memo.render().contains(NO_DECISIONS_NOTE));
    }
}
