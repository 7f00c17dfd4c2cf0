use std::fmt;

use chrono::NaiveDate;
use legaldata_core::Language;
use serde::{Deserialize, Serialize};

/// A listed document not yet fetched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentStub {
    pub dataset: String,
    pub citation: Option<String>,
    pub name: Option<String>,
    pub date: Option<NaiveDate>,
    pub fetch_url: String,
    pub language: Language,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    New,
    Updated,
    Duplicate,
    Skipped,
    Failed,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::New => "new",
            Outcome::Updated => "updated",
            Outcome::Duplicate => "duplicate",
            Outcome::Skipped => "skipped",
            Outcome::Failed => "failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemNote {
    /// URL, file name or feed item id.
    pub item: String,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Counts always satisfy `fetched = new + updated + duplicate + skipped + failed`;
/// `items` holds one entry per counted item.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub fetched: usize,
    pub new: usize,
    pub updated: usize,
    pub duplicate: usize,
    pub skipped: usize,
    pub failed: usize,
    pub items: Vec<ItemNote>,
    /// Problems not tied to one item, such as a law file with no sections.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl IngestReport {
    pub fn record(&mut self, item: impl Into<String>, outcome: Outcome, note: Option<String>) {
        self.fetched += 1;
        *match outcome {
            Outcome::New => &mut self.new,
            Outcome::Updated => &mut self.updated,
            Outcome::Duplicate => &mut self.duplicate,
            Outcome::Skipped => &mut self.skipped,
            Outcome::Failed => &mut self.failed,
        } += 1;
        self.items.push(ItemNote { item: item.into(), outcome, note });
    }

    pub fn absorb(&mut self, other: IngestReport) {
        for n in other.items {
            self.record(n.item, n.outcome, n.note);
        }
        self.warnings.extend(other.warnings);
    }

    pub fn is_consistent(&self) -> bool {
        self.fetched == self.new + self.updated + self.duplicate + self.skipped + self.failed
            && self.items.len() == self.fetched
    }

    /// True when something was fetched and every item was a duplicate.
    pub fn all_duplicate(&self) -> bool {
        self.fetched > 0 && self.duplicate == self.fetched
    }

    pub fn summary(&self) -> String {
        format!(
            "fetched {}, new {}, updated {}, duplicate {}, skipped {}, failed {}",
            self.fetched, self.new, self.updated, self.duplicate, self.skipped, self.failed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_follow_recorded_items() {
        let mut r = IngestReport::default();
        r.record("a", Outcome::New, None);
        r.record("b", Outcome::Failed, Some("timeout".into()));
        let mut other = IngestReport::default();
        other.record("c", Outcome::Duplicate, None);
        r.absorb(other);
        assert_eq!((r.fetched, r.new, r.failed, r.duplicate), (3, 1, 1, 1));
        assert!(r.is_consistent());
        assert!(!r.all_duplicate());
    }
}
