//! Incremental polling of RSS/Atom feeds announcing new decisions.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use chrono::{DateTime, Utc};
use legaldata_core::SourceDescriptor;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::{DocumentStub, IngestError};

static NEUTRAL_CITATION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b\d{4}\s+[A-Z][A-Za-z]{1,9}\s+\d+\b").expect("citation pattern"));

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedState {
    pub seen: BTreeSet<String>,
    pub last_poll: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedItem {
    pub id: String,
    pub stub: DocumentStub,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedPoll {
    /// Items not in the incoming state, in feed order.
    pub items: Vec<FeedItem>,
    /// Ids of items already in the incoming state.
    pub already_seen: Vec<String>,
    /// New items that could not become stubs.
    pub skipped: Vec<String>,
    /// Incoming seen-set plus every id in this feed.
    pub state: FeedState,
}

impl FeedPoll {
    pub fn stubs(&self) -> Vec<DocumentStub> {
        self.items.iter().map(|i| i.stub.clone()).collect()
    }
}

/// Splits a feed item title into a neutral citation and the remaining name.
pub fn split_title(title: &str) -> (Option<String>, Option<String>) {
    let Some(m) = NEUTRAL_CITATION.find(title) else {
        let name = title.trim();
        return (None, (!name.is_empty()).then(|| name.to_owned()));
    };
    let citation = m.as_str().split_whitespace().collect::<Vec<_>>().join(" ");
    let rest = format!("{} {}", &title[..m.start()], &title[m.end()..]);
    let rest = rest.split_whitespace().collect::<Vec<_>>().join(" ").replace("( )", "");
    let name = rest.trim_matches(|c: char| c.is_whitespace() || matches!(c, ',' | '-' | '–' | ':' | ';')).to_owned();
    (Some(citation), (!name.is_empty()).then_some(name))
}

pub fn poll_feed(
    content: &str,
    state: &FeedState,
    source: &SourceDescriptor,
    polled_at: DateTime<Utc>,
) -> Result<FeedPoll, IngestError> {
    let feed = feed_rs::parser::parse(content.as_bytes()).map_err(|e| IngestError::Parse {
        what: "feed".into(),
        offset: None,
        message: e.to_string(),
    })?;
    let mut next = state.clone();
    next.last_poll = Some(polled_at);
    let mut poll =
        FeedPoll { items: Vec::new(), already_seen: Vec::new(), skipped: Vec::new(), state: FeedState::default() };

    for entry in feed.entries {
        let id = entry.id.clone();
        if state.seen.contains(&id) {
            poll.already_seen.push(id);
            continue;
        }
        if !next.seen.insert(id.clone()) {
            continue;
        }
        let title = entry.title.as_ref().map(|t| t.content.clone()).unwrap_or_default();
        let Some(link) = entry.links.first().map(|l| l.href.trim().to_owned()).filter(|l| !l.is_empty()) else {
            poll.skipped.push(format!("item {id} ({}): no link", title.trim()));
            continue;
        };
        let (citation, name) = split_title(&title);
        let date = entry.published.or(entry.updated).map(|d| d.date_naive());
        poll.items.push(FeedItem {
            id,
            stub: DocumentStub {
                dataset: source.dataset.clone(),
                citation,
                name,
                date,
                fetch_url: link,
                language: source.language,
            },
        });
    }
    poll.state = next;
    Ok(poll)
}
