//! Acquisition of court decisions and legislation.
//!
//! Four channels feed the store: listing pages read through declarative
//! selectors, RSS/Atom feeds polled incrementally, a local checkout of the
//! legislation XML repository, and a drop directory of documents with
//! metadata sidecars. Every record written carries its source's license
//! text, and re-running a channel on unchanged input leaves the store as it
//! was.

mod batch;
mod channels;
mod feed;
mod fetch;
mod filedrop;
mod html;
mod lawsync;
mod lawxml;
mod listing;
mod registry;
mod report;
mod state;

use std::path::PathBuf;

pub use crate::batch::{document_text, ingest_batch, text_digest, Clock, IngestOptions};
pub use crate::channels::{fetch_text, run_source};
pub use crate::feed::{poll_feed, split_title, FeedItem, FeedPoll, FeedState};
pub use crate::fetch::{FetchError, Fetched, Fetcher, FileFetcher, HttpFetcher, ScriptedFetcher};
pub use crate::filedrop::{import_file_drop, FileDropState, Sidecar, SIDECAR_EXTENSION};
pub use crate::html::{check_markup, html_to_text};
pub use crate::lawsync::sync_law_repo;
pub use crate::lawxml::{parse_law_xml, ParsedLaw};
pub use crate::listing::{parse_date, parse_listing, Listing};
pub use crate::registry::{load_registry, parse_registry};
pub use crate::report::{DocumentStub, IngestReport, ItemNote, Outcome};
pub use crate::state::{IngestState, STATE_DIR};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{what}: parse error{}: {message}", offset.map(|o| format!(" at byte {o}")).unwrap_or_default())]
    Parse { what: String, offset: Option<usize>, message: String },
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error(transparent)]
    Store(#[from] legaldata_store::StoreError),
}
