//! Declarative description of one ingestion source.

use serde::{Deserialize, Serialize};

use crate::model::{is_valid_dataset_code, DocumentKind, Language};

pub const DEFAULT_POLITENESS_DELAY: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    ListingScrape,
    Rss,
    LawRepoSync,
    FileDrop,
}

impl ChannelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::ListingScrape => "listing-scrape",
            ChannelKind::Rss => "rss",
            ChannelKind::LawRepoSync => "law-repo-sync",
            ChannelKind::FileDrop => "file-drop",
        }
    }
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "listing-scrape" => Ok(ChannelKind::ListingScrape),
            "rss" => Ok(ChannelKind::Rss),
            "law-repo-sync" => Ok(ChannelKind::LawRepoSync),
            "file-drop" => Ok(ChannelKind::FileDrop),
            other => {
                Err(format!("unknown channel `{other}` (expected listing-scrape, rss, law-repo-sync or file-drop)"))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    Daily,
    Weekly,
}

/// Named CSS-selector rules for pulling decision rows out of a listing page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectorConfig {
    /// Matches one element per listed decision.
    pub row: String,
    /// Relative to the row.
    pub citation: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub date: Option<String>,
    /// Element carrying the document link, relative to the row.
    pub link: String,
    #[serde(default = "default_link_attr")]
    pub link_attr: String,
    /// chrono format string for the date cell; ISO `YYYY-MM-DD` only when absent.
    #[serde(default)]
    pub date_format: Option<String>,
}

fn default_link_attr() -> String {
    "href".to_owned()
}

fn default_delay() -> f64 {
    DEFAULT_POLITENESS_DELAY
}

fn default_language() -> Language {
    Language::En
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceDescriptor {
    pub dataset: String,
    pub kind: DocumentKind,
    pub channel: ChannelKind,
    /// Language of documents obtained from this source.
    #[serde(default = "default_language")]
    pub language: Language,
    #[serde(default)]
    pub listing_url: Option<String>,
    #[serde(default)]
    pub feed_url: Option<String>,
    #[serde(default)]
    pub repo_path: Option<String>,
    #[serde(default)]
    pub drop_path: Option<String>,
    #[serde(default)]
    pub selectors: Option<SelectorConfig>,
    pub license_text: String,
    /// Seconds between two fetches against the same host.
    #[serde(default = "default_delay")]
    pub politeness_delay: f64,
    #[serde(default)]
    pub schedule: Option<Schedule>,
}

impl SourceDescriptor {
    /// Channel-specific location (URL or path) this source reads from.
    pub fn location(&self) -> Option<&str> {
        match self.channel {
            ChannelKind::ListingScrape => self.listing_url.as_deref(),
            ChannelKind::Rss => self.feed_url.as_deref(),
            ChannelKind::LawRepoSync => self.repo_path.as_deref(),
            ChannelKind::FileDrop => self.drop_path.as_deref(),
        }
    }

    /// Lists every problem with the descriptor; empty when usable.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !is_valid_dataset_code(&self.dataset) {
            out.push(format!("dataset code `{}` is not uppercase alphanumeric", self.dataset));
        }
        if self.license_text.trim().is_empty() {
            out.push("license_text is empty".to_owned());
        }
        if !self.politeness_delay.is_finite() || self.politeness_delay < 0.0 {
            out.push(format!("politeness_delay {} is negative or not finite", self.politeness_delay));
        }
        let wanted = match self.channel {
            ChannelKind::ListingScrape => "listing_url",
            ChannelKind::Rss => "feed_url",
            ChannelKind::LawRepoSync => "repo_path",
            ChannelKind::FileDrop => "drop_path",
        };
        if self.location().is_none_or(|l| l.trim().is_empty()) {
            out.push(format!("channel {} requires {wanted}", self.channel));
        }
        let set: Vec<&str> = [
            ("listing_url", self.listing_url.is_some()),
            ("feed_url", self.feed_url.is_some()),
            ("repo_path", self.repo_path.is_some()),
            ("drop_path", self.drop_path.is_some()),
        ]
        .into_iter()
        .filter(|&(name, present)| present && name != wanted)
        .map(|(name, _)| name)
        .collect();
        if !set.is_empty() {
            out.push(format!("channel {} does not use {}", self.channel, set.join(", ")));
        }
        if self.channel == ChannelKind::ListingScrape && self.selectors.is_none() {
            out.push("listing-scrape source has no selectors".to_owned());
        }
        if self.channel == ChannelKind::LawRepoSync && self.kind != DocumentKind::Law {
            out.push("law-repo-sync source must have kind = law".to_owned());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rss() -> SourceDescriptor {
        SourceDescriptor {
            dataset: "FC".into(),
            kind: DocumentKind::Case,
            channel: ChannelKind::Rss,
            language: Language::En,
            listing_url: None,
            feed_url: Some("https://example.org/fc.rss".into()),
            repo_path: None,
            drop_path: None,
            selectors: None,
            license_text: "Reproduction permitted with due diligence".into(),
            politeness_delay: 1.0,
            schedule: Some(Schedule::Daily),
        }
    }

    #[test]
    fn well_formed_descriptor_has_no_problems() {
        assert!(rss().problems().is_empty());
    }

    #[test]
    fn descriptor_problems() {
        let mut s = rss();
        s.license_text = " ".into();
        s.politeness_delay = -1.0;
        s.listing_url = Some("https://example.org".into());
        let p = s.problems();
        assert_eq!(p.len(), 3, "{p:?}");

        let mut s = rss();
        s.feed_url = None;
        assert_eq!(s.problems(), vec!["channel rss requires feed_url".to_owned()]);
    }
}
