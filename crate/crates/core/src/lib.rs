//! Core types and pure computations for the legal-data platform: the
//! bilingual document schema, corpus snapshots, coverage statistics, the
//! search index, tokenizers and corpus analytics.
//!
//! Nothing in this crate touches the network or the filesystem, so it also
//! builds for `wasm32-unknown-unknown`.

pub mod analytics;
pub mod coverage;
pub mod model;
pub mod report;
pub mod search;
pub mod snapshot;
pub mod source;
#[doc(hidden)]
pub mod testing;
pub mod text;
pub mod tokenizer;

pub use coverage::{coverage_stats, CoverageReport, CoverageRow, CoverageTotals};
pub use model::{
    normalize_citation, validate_record, DocumentKind, DocumentRecord, Language, LawSection, RecordKey, Violation,
};
pub use search::{build_index, Index, QueryError, QuerySpec, SearchHit, SearchPage};
pub use snapshot::{CorpusSnapshot, DuplicateKey, ScanFilter};
pub use source::{ChannelKind, Schedule, SelectorConfig, SourceDescriptor};
pub use tokenizer::{MergeTable, Tokenizer, TokenizerError, TokenizerRegistry};
