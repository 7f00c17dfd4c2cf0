//! Canonical document schema shared by every other part of the platform.
//!
//! Bilingual fields are kept as parallel `_en` / `_fr` members so that the
//! serialized names line up one-to-one with the published column names.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

/// Longest dataset code accepted by [`validate_record`].
pub const MAX_DATASET_CODE_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentKind {
    Case,
    Law,
}

impl DocumentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DocumentKind::Case => "case",
            DocumentKind::Law => "law",
        }
    }

    /// Plural form used in URL paths and export directories.
    pub fn collection(self) -> &'static str {
        match self {
            DocumentKind::Case => "cases",
            DocumentKind::Law => "laws",
        }
    }
}

impl fmt::Display for DocumentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DocumentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "case" | "cases" => Ok(DocumentKind::Case),
            "law" | "laws" => Ok(DocumentKind::Law),
            other => Err(format!("unknown document kind `{other}` (expected case or law)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    Fr,
}

impl Language {
    pub const ALL: [Language; 2] = [Language::En, Language::Fr];

    pub fn code(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::Fr => "fr",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "en" | "eng" | "english" => Ok(Language::En),
            "fr" | "fra" | "fre" | "french" => Ok(Language::Fr),
            other => Err(format!("unknown language tag `{other}` (expected en or fr)")),
        }
    }
}

/// One addressable unit of a statute or regulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawSection {
    pub label: String,
    pub heading: Option<String>,
    pub text: String,
}

/// One legal document (decision, statute or regulation) in up to two languages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub dataset: String,
    pub kind: DocumentKind,
    pub citation_en: Option<String>,
    pub citation_fr: Option<String>,
    pub citation2_en: Option<String>,
    pub citation2_fr: Option<String>,
    pub name_en: Option<String>,
    pub name_fr: Option<String>,
    pub document_date_en: Option<NaiveDate>,
    pub document_date_fr: Option<NaiveDate>,
    pub url_en: Option<String>,
    pub url_fr: Option<String>,
    pub scraped_timestamp_en: Option<DateTime<Utc>>,
    pub scraped_timestamp_fr: Option<DateTime<Utc>>,
    pub unofficial_text_en: Option<String>,
    pub unofficial_text_fr: Option<String>,
    pub unofficial_sections_en: Option<Vec<LawSection>>,
    pub unofficial_sections_fr: Option<Vec<LawSection>>,
    pub upstream_license: String,
}

/// Mutable view over the fields that exist once per language.
pub struct LanguageFieldsMut<'a> {
    pub citation: &'a mut Option<String>,
    pub citation2: &'a mut Option<String>,
    pub name: &'a mut Option<String>,
    pub document_date: &'a mut Option<NaiveDate>,
    pub url: &'a mut Option<String>,
    pub scraped_timestamp: &'a mut Option<DateTime<Utc>>,
    pub unofficial_text: &'a mut Option<String>,
    pub unofficial_sections: &'a mut Option<Vec<LawSection>>,
}

impl DocumentRecord {
    /// An otherwise empty record; callers fill in the language fields.
    pub fn new(dataset: impl Into<String>, kind: DocumentKind, upstream_license: impl Into<String>) -> Self {
        DocumentRecord {
            dataset: dataset.into(),
            kind,
            citation_en: None,
            citation_fr: None,
            citation2_en: None,
            citation2_fr: None,
            name_en: None,
            name_fr: None,
            document_date_en: None,
            document_date_fr: None,
            url_en: None,
            url_fr: None,
            scraped_timestamp_en: None,
            scraped_timestamp_fr: None,
            unofficial_text_en: None,
            unofficial_text_fr: None,
            unofficial_sections_en: None,
            unofficial_sections_fr: None,
            upstream_license: upstream_license.into(),
        }
    }

    pub fn citation(&self, lang: Language) -> Option<&str> {
        match lang {
            Language::En => self.citation_en.as_deref(),
            Language::Fr => self.citation_fr.as_deref(),
        }
    }

    pub fn name(&self, lang: Language) -> Option<&str> {
        match lang {
            Language::En => self.name_en.as_deref(),
            Language::Fr => self.name_fr.as_deref(),
        }
    }

    pub fn url(&self, lang: Language) -> Option<&str> {
        match lang {
            Language::En => self.url_en.as_deref(),
            Language::Fr => self.url_fr.as_deref(),
        }
    }

    pub fn text(&self, lang: Language) -> Option<&str> {
        match lang {
            Language::En => self.unofficial_text_en.as_deref(),
            Language::Fr => self.unofficial_text_fr.as_deref(),
        }
    }

    pub fn sections(&self, lang: Language) -> Option<&[LawSection]> {
        match lang {
            Language::En => self.unofficial_sections_en.as_deref(),
            Language::Fr => self.unofficial_sections_fr.as_deref(),
        }
    }

    pub fn scraped_timestamp(&self, lang: Language) -> Option<DateTime<Utc>> {
        match lang {
            Language::En => self.scraped_timestamp_en,
            Language::Fr => self.scraped_timestamp_fr,
        }
    }

    pub fn document_date(&self, lang: Language) -> Option<NaiveDate> {
        match lang {
            Language::En => self.document_date_en,
            Language::Fr => self.document_date_fr,
        }
    }

    pub fn fields_mut(&mut self, lang: Language) -> LanguageFieldsMut<'_> {
        match lang {
            Language::En => LanguageFieldsMut {
                citation: &mut self.citation_en,
                citation2: &mut self.citation2_en,
                name: &mut self.name_en,
                document_date: &mut self.document_date_en,
                url: &mut self.url_en,
                scraped_timestamp: &mut self.scraped_timestamp_en,
                unofficial_text: &mut self.unofficial_text_en,
                unofficial_sections: &mut self.unofficial_sections_en,
            },
            Language::Fr => LanguageFieldsMut {
                citation: &mut self.citation_fr,
                citation2: &mut self.citation2_fr,
                name: &mut self.name_fr,
                document_date: &mut self.document_date_fr,
                url: &mut self.url_fr,
                scraped_timestamp: &mut self.scraped_timestamp_fr,
                unofficial_text: &mut self.unofficial_text_fr,
                unofficial_sections: &mut self.unofficial_sections_fr,
            },
        }
    }

    /// Text for `lang` if present and non-blank.
    pub fn nonempty_text(&self, lang: Language) -> Option<&str> {
        self.text(lang).filter(|t| !t.trim().is_empty())
    }

    /// Decision date, English first.
    pub fn date(&self) -> Option<NaiveDate> {
        self.document_date_en.or(self.document_date_fr)
    }

    /// Display name, English first.
    pub fn display_name(&self) -> Option<&str> {
        non_blank(self.name_en.as_deref()).or(non_blank(self.name_fr.as_deref()))
    }

    /// Storage key: dataset plus the normalized primary citation.
    ///
    /// The primary citation is the English one, then the French one. A record
    /// with no citation at all is keyed by its source URL (or identifier).
    pub fn key(&self) -> RecordKey {
        let citation = [&self.citation_en, &self.citation_fr, &self.url_en, &self.url_fr]
            .into_iter()
            .filter_map(|c| c.as_deref())
            .map(normalize_citation)
            .find(|c| !c.is_empty())
            .unwrap_or_default();
        RecordKey { dataset: self.dataset.clone(), citation }
    }

    /// True if `citation` (normalized) names this record in either language,
    /// or is the fallback identifier used as its key.
    pub fn answers_to(&self, citation: &str) -> bool {
        let wanted = normalize_citation(citation);
        if wanted.is_empty() {
            return false;
        }
        [&self.citation_en, &self.citation_fr]
            .into_iter()
            .filter_map(|c| c.as_deref())
            .any(|c| normalize_citation(c) == wanted)
            || self.key().citation == wanted
    }

    /// Two records describe the same document when they share a dataset and a
    /// citation in the same language.
    pub fn same_document(&self, other: &DocumentRecord) -> bool {
        if self.dataset != other.dataset {
            return false;
        }
        if self.key() == other.key() {
            return true;
        }
        Language::ALL.into_iter().any(|lang| match (self.citation(lang), other.citation(lang)) {
            (Some(a), Some(b)) => {
                let a = normalize_citation(a);
                !a.is_empty() && a == normalize_citation(b)
            }
            _ => false,
        })
    }

    /// Cases never carry section lists; an empty list on a case is folded to absent.
    pub fn normalized(mut self) -> Self {
        if self.kind == DocumentKind::Case {
            if self.unofficial_sections_en.as_ref().is_some_and(Vec::is_empty) {
                self.unofficial_sections_en = None;
            }
            if self.unofficial_sections_fr.as_ref().is_some_and(Vec::is_empty) {
                self.unofficial_sections_fr = None;
            }
        }
        self
    }
}

fn non_blank(s: Option<&str>) -> Option<&str> {
    s.filter(|s| !s.trim().is_empty())
}

/// `(dataset, normalized citation)`; orders datasets first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecordKey {
    pub dataset: String,
    pub citation: String,
}

impl RecordKey {
    pub fn new(dataset: impl Into<String>, citation: &str) -> Self {
        RecordKey { dataset: dataset.into(), citation: normalize_citation(citation) }
    }
}

impl fmt::Display for RecordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.dataset, self.citation)
    }
}

/// Trims and collapses internal whitespace runs to one space. Case is kept:
/// neutral citations are case-significant.
pub fn normalize_citation(citation: &str) -> String {
    citation.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn is_valid_dataset_code(code: &str) -> bool {
    !code.is_empty()
        && code.len() <= MAX_DATASET_CODE_LEN
        && code.bytes().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit())
}

/// One broken record invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    NoText,
    EmptyLicense,
    SectionsOnCase { language: Language },
    MissingUrl { language: Language },
    MissingTimestamp { language: Language },
    DateMismatch { en: NaiveDate, fr: NaiveDate },
    InvalidDataset { dataset: String },
    EmptySectionLabel { language: Language, index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoText => f.write_str("no text in either language"),
            Violation::EmptyLicense => f.write_str("empty upstream license"),
            Violation::SectionsOnCase { language } => {
                write!(f, "sections on a case record (unofficial_sections_{language})")
            }
            Violation::MissingUrl { language } => write!(f, "text in {language} without url_{language}"),
            Violation::MissingTimestamp { language } => {
                write!(f, "text in {language} without scraped_timestamp_{language}")
            }
            Violation::DateMismatch { en, fr } => {
                write!(f, "document dates disagree between languages ({en} vs {fr})")
            }
            Violation::InvalidDataset { dataset } => {
                write!(f, "dataset code `{dataset}` is not 1-{MAX_DATASET_CODE_LEN} uppercase letters or digits")
            }
            Violation::EmptySectionLabel { language, index } => {
                write!(f, "section {index} of unofficial_sections_{language} has an empty label")
            }
        }
    }
}

/// Checks every per-record invariant and names each one that fails.
///
/// An empty vector means the record is valid. Key uniqueness is a corpus
/// property and is checked where records are collected, not here.
pub fn validate_record(record: &DocumentRecord) -> Vec<Violation> {
    let mut violations = Vec::new();

    if !is_valid_dataset_code(&record.dataset) {
        violations.push(Violation::InvalidDataset { dataset: record.dataset.clone() });
    }
    if Language::ALL.iter().all(|&lang| record.nonempty_text(lang).is_none()) {
        violations.push(Violation::NoText);
    }
    if record.upstream_license.trim().is_empty() {
        violations.push(Violation::EmptyLicense);
    }
    for lang in Language::ALL {
        let sections = record.sections(lang).unwrap_or_default();
        if record.kind == DocumentKind::Case && !sections.is_empty() {
            violations.push(Violation::SectionsOnCase { language: lang });
        }
        for (index, section) in sections.iter().enumerate() {
            if section.label.trim().is_empty() {
                violations.push(Violation::EmptySectionLabel { language: lang, index });
            }
        }
        if record.nonempty_text(lang).is_some() {
            if non_blank(record.url(lang)).is_none() {
                violations.push(Violation::MissingUrl { language: lang });
            }
            if record.scraped_timestamp(lang).is_none() {
                violations.push(Violation::MissingTimestamp { language: lang });
            }
        }
    }
    if let (Some(en), Some(fr)) = (record.document_date_en, record.document_date_fr) {
        if en != fr {
            violations.push(Violation::DateMismatch { en, fr });
        }
    }
    violations
}
