//! Corpus persistence: the single-writer JSONL store, Parquet export and
//! import, and the dataset card written next to exported files.

mod card;
mod parquet;
mod store;

use std::path::PathBuf;

pub use crate::card::render_card;
pub use crate::parquet::{
    export_parquet, load_parquet, ExportedFile, LoadOutcome, Manifest, RejectedRow, CARD_FILE, CASE_COLUMNS,
    LAW_COLUMNS, VERSION_METADATA_KEY,
};
pub use crate::store::{
    RecordViolations, Store, WalEntry, WriteReport, LOCK_FILE, RECORDS_FILE, VERSION_FILE, WAL_FILE,
};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("batch rejected: {}", describe_rejections(.0))]
    Rejected(Vec<RecordViolations>),
    #[error("store {} is locked by another writer", .0.display())]
    Locked(PathBuf),
    #[error("store opened read-only")]
    ReadOnly,
    #[error("{}: missing required column(s): {}", file.display(), missing.join(", "))]
    Schema { file: PathBuf, missing: Vec<String> },
    #[error("parquet: {0}")]
    Parquet(String),
    #[error("{}: {message}", path.display())]
    Corrupt { path: PathBuf, message: String },
}

fn describe_rejections(rejected: &[RecordViolations]) -> String {
    rejected
        .iter()
        .map(|r| {
            let v: Vec<String> = r.violations.iter().map(ToString::to_string).collect();
            format!("{} ({})", r.key, v.join("; "))
        })
        .collect::<Vec<_>>()
        .join(", ")
}

impl From<::parquet::errors::ParquetError> for StoreError {
    fn from(e: ::parquet::errors::ParquetError) -> Self {
        StoreError::Parquet(e.to_string())
    }
}

impl From<arrow_schema::ArrowError> for StoreError {
    fn from(e: arrow_schema::ArrowError) -> Self {
        StoreError::Parquet(e.to_string())
    }
}
