//! One entry point per channel, wiring fetch, parse, state and store.

use std::path::Path;

use legaldata_core::{ChannelKind, SourceDescriptor};
use legaldata_store::Store;

use crate::batch::{document_text, ingest_batch, IngestOptions};
use crate::feed::{poll_feed, FeedState};
use crate::fetch::Fetcher;
use crate::filedrop::{import_file_drop, FileDropState};
use crate::lawsync::sync_law_repo;
use crate::listing::parse_listing;
use crate::report::{IngestReport, Outcome};
use crate::state::IngestState;
use crate::IngestError;

fn location(source: &SourceDescriptor) -> Result<&str, IngestError> {
    source
        .location()
        .filter(|l| !l.trim().is_empty())
        .ok_or_else(|| IngestError::Config(format!("source {} ({}) has no location", source.dataset, source.channel)))
}

fn fetch_page(fetcher: &dyn Fetcher, url: &str) -> Result<String, IngestError> {
    let fetched = fetcher.fetch(url)?;
    String::from_utf8(fetched.body).map_err(|e| IngestError::Parse {
        what: url.to_owned(),
        offset: Some(e.utf8_error().valid_up_to()),
        message: "not UTF-8".into(),
    })
}

/// Runs one source once. Feed and file-drop bookkeeping is read from and
/// written back to `state`.
pub fn run_source(
    source: &SourceDescriptor,
    fetcher: &dyn Fetcher,
    store: &Store,
    state: &IngestState,
    options: &IngestOptions,
) -> Result<IngestReport, IngestError> {
    let problems = source.problems();
    if !problems.is_empty() {
        return Err(IngestError::Config(format!("source {}: {}", source.dataset, problems.join("; "))));
    }
    let loc = location(source)?;
    match source.channel {
        ChannelKind::ListingScrape => {
            let page = fetch_page(fetcher, loc)?;
            let listing = parse_listing(&page, source)?;
            let mut report = IngestReport::default();
            for note in listing.skipped {
                report.record(loc, Outcome::Skipped, Some(note));
            }
            report.absorb(ingest_batch(&listing.stubs, fetcher, source, store, options)?);
            Ok(report)
        }
        ChannelKind::Rss => {
            let feed = fetch_page(fetcher, loc)?;
            let previous: FeedState = state.load(source)?;
            let poll = poll_feed(&feed, &previous, source, (options.clock)())?;
            let mut report = IngestReport::default();
            for id in &poll.already_seen {
                report.record(id.clone(), Outcome::Duplicate, Some("already seen".into()));
            }
            for note in &poll.skipped {
                report.record(loc, Outcome::Skipped, Some(note.clone()));
            }
            let batch = ingest_batch(&poll.stubs(), fetcher, source, store, options)?;
            // Items whose fetch failed stay unseen so the next poll retries them.
            let mut next = poll.state.clone();
            for (item, note) in poll.items.iter().zip(&batch.items) {
                if note.outcome == Outcome::Failed {
                    next.seen.remove(&item.id);
                }
            }
            report.absorb(batch);
            state.save(source, &next)?;
            Ok(report)
        }
        ChannelKind::LawRepoSync => sync_law_repo(Path::new(loc), source, store, options),
        ChannelKind::FileDrop => {
            let mut drop_state: FileDropState = state.load(source)?;
            let report = import_file_drop(Path::new(loc), source, store, &mut drop_state, options)?;
            state.save(source, &drop_state)?;
            Ok(report)
        }
    }
}

/// Fetches one document and returns its extracted text (for inspection).
pub fn fetch_text(fetcher: &dyn Fetcher, url: &str) -> Result<String, IngestError> {
    let fetched = fetcher.fetch(url)?;
    document_text(&fetched).map_err(|m| IngestError::Parse { what: url.to_owned(), offset: None, message: m })
}
