//! On-disk corpus with one writer and any number of snapshot readers.
//!
//! Layout of a store directory:
//!
//! ```text
//! records.jsonl   one DocumentRecord per line, in key order
//! VERSION         snapshot version, incremented once per committed batch
//! wal.jsonl       prior versions of replaced records (never exported)
//! LOCK            held with an exclusive OS file lock by the writer
//! ```
//!
//! Batches that change nothing are not committed, so re-applying the same
//! records leaves every file byte-identical.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use legaldata_core::{validate_record, CorpusSnapshot, DocumentRecord, RecordKey, ScanFilter, Violation};
use serde::{Deserialize, Serialize};

use crate::StoreError;

pub const RECORDS_FILE: &str = "records.jsonl";
pub const VERSION_FILE: &str = "VERSION";
pub const WAL_FILE: &str = "wal.jsonl";
pub const LOCK_FILE: &str = "LOCK";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WriteReport {
    pub inserted: usize,
    pub updated: usize,
    pub unchanged: usize,
    /// Version after the batch; unchanged when nothing was written.
    pub version: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordViolations {
    pub key: RecordKey,
    pub violations: Vec<Violation>,
}

/// A replaced record, kept for audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalEntry {
    /// Version that replaced it.
    pub version: u64,
    pub key: RecordKey,
    pub previous: DocumentRecord,
}

pub struct Store {
    dir: PathBuf,
    current: RwLock<CorpusSnapshot>,
    /// Held (and OS-locked) only by writable stores.
    writer: Option<Mutex<File>>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store").field("dir", &self.dir).field("writable", &self.writer.is_some()).finish()
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_owned(), source }
}

impl Store {
    /// Opens (creating if needed) a writable store, taking the writer lock.
    pub fn open(dir: impl AsRef<Path>) -> Result<Store, StoreError> {
        let dir = dir.as_ref().to_owned();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let lock_path = dir.join(LOCK_FILE);
        let lock =
            OpenOptions::new().create(true).truncate(false).write(true).open(&lock_path).map_err(io_err(&lock_path))?;
        match lock.try_lock() {
            Ok(()) => {}
            Err(fs::TryLockError::WouldBlock) => return Err(StoreError::Locked(dir)),
            Err(fs::TryLockError::Error(e)) => return Err(io_err(&lock_path)(e)),
        }
        let snapshot = read_snapshot(&dir)?;
        Ok(Store { dir, current: RwLock::new(snapshot), writer: Some(Mutex::new(lock)) })
    }

    /// Opens an existing store for reading only; no lock is taken.
    pub fn open_read_only(dir: impl AsRef<Path>) -> Result<Store, StoreError> {
        let dir = dir.as_ref().to_owned();
        if !dir.is_dir() {
            return Err(StoreError::Io {
                path: dir,
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "store directory does not exist"),
            });
        }
        let snapshot = read_snapshot(&dir)?;
        Ok(Store { dir, current: RwLock::new(snapshot), writer: None })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// The current snapshot. Later commits do not affect it.
    pub fn snapshot(&self) -> CorpusSnapshot {
        self.current.read().expect("snapshot lock poisoned").clone()
    }

    pub fn version(&self) -> u64 {
        self.current.read().expect("snapshot lock poisoned").version()
    }

    /// Re-reads the files, picking up commits made by another process.
    pub fn reload(&self) -> Result<CorpusSnapshot, StoreError> {
        let snapshot = read_snapshot(&self.dir)?;
        *self.current.write().expect("snapshot lock poisoned") = snapshot.clone();
        Ok(snapshot)
    }

    pub fn scan(&self, filter: &ScanFilter) -> Vec<DocumentRecord> {
        self.snapshot().scan(filter).into_iter().cloned().collect()
    }

    /// Inserts or replaces records keyed by `(dataset, citation)`.
    ///
    /// All-or-nothing: if any record fails validation, nothing is written
    /// and every failing record is reported. A record replaces the stored
    /// record describing the same document (same key, or a shared citation
    /// in the same language); the replaced version goes to the WAL.
    pub fn upsert(&self, records: Vec<DocumentRecord>) -> Result<WriteReport, StoreError> {
        let writer = self.writer.as_ref().ok_or(StoreError::ReadOnly)?;
        let _guard = writer.lock().expect("writer lock poisoned");

        let rejected: Vec<RecordViolations> = records
            .iter()
            .filter_map(|r| {
                let violations = validate_record(r);
                (!violations.is_empty()).then(|| RecordViolations { key: r.key(), violations })
            })
            .collect();
        if !rejected.is_empty() {
            return Err(StoreError::Rejected(rejected));
        }

        let base = self.snapshot();
        let next_version = base.version() + 1;
        let mut working: BTreeMap<RecordKey, DocumentRecord> = base.records().map(|r| (r.key(), r.clone())).collect();
        let mut report = WriteReport { version: base.version(), ..Default::default() };
        let mut wal = Vec::new();

        for record in records {
            let record = record.normalized();
            let key = record.key();
            let existing_key = if working.contains_key(&key) {
                Some(key.clone())
            } else {
                working.iter().find(|(_, r)| r.same_document(&record)).map(|(k, _)| k.clone())
            };
            match existing_key {
                None => {
                    working.insert(key, record);
                    report.inserted += 1;
                }
                Some(old_key) => {
                    if working[&old_key] == record {
                        report.unchanged += 1;
                        continue;
                    }
                    let previous = working.remove(&old_key).expect("key just found");
                    wal.push(WalEntry { version: next_version, key: old_key, previous });
                    working.insert(key, record);
                    report.updated += 1;
                }
            }
        }

        if report.inserted + report.updated == 0 {
            return Ok(report);
        }
        let snapshot = CorpusSnapshot::new(next_version, working.into_values())
            .map_err(|e| StoreError::Corrupt { path: self.dir.clone(), message: e.to_string() })?;
        self.commit(&snapshot, &wal)?;
        *self.current.write().expect("snapshot lock poisoned") = snapshot;
        report.version = next_version;
        Ok(report)
    }

    fn commit(&self, snapshot: &CorpusSnapshot, wal: &[WalEntry]) -> Result<(), StoreError> {
        if !wal.is_empty() {
            let path = self.dir.join(WAL_FILE);
            let mut file = OpenOptions::new().create(true).append(true).open(&path).map_err(io_err(&path))?;
            let mut buf = Vec::new();
            for entry in wal {
                serde_json::to_writer(&mut buf, entry)?;
                buf.push(b'\n');
            }
            file.write_all(&buf).and_then(|_| file.sync_data()).map_err(io_err(&path))?;
        }
        let mut body = Vec::new();
        for record in snapshot.records() {
            serde_json::to_writer(&mut body, record)?;
            body.push(b'\n');
        }
        write_atomic(&self.dir.join(RECORDS_FILE), &body)?;
        write_atomic(&self.dir.join(VERSION_FILE), format!("{}\n", snapshot.version()).as_bytes())?;
        Ok(())
    }

    pub fn wal_entries(&self) -> Result<Vec<WalEntry>, StoreError> {
        read_jsonl(&self.dir.join(WAL_FILE))
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    let mut file = File::create(&tmp).map_err(io_err(&tmp))?;
    file.write_all(bytes).and_then(|_| file.sync_data()).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, StoreError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(path)(e)),
    };
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line)
            .map_err(|e| StoreError::Corrupt { path: path.to_owned(), message: format!("line {}: {e}", n + 1) })?;
        out.push(item);
    }
    Ok(out)
}

fn read_snapshot(dir: &Path) -> Result<CorpusSnapshot, StoreError> {
    let version_path = dir.join(VERSION_FILE);
    let version = match fs::read_to_string(&version_path) {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map_err(|e| StoreError::Corrupt { path: version_path.clone(), message: e.to_string() })?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => 0,
        Err(e) => return Err(io_err(&version_path)(e)),
    };
    let records: Vec<DocumentRecord> = read_jsonl(&dir.join(RECORDS_FILE))?;
    CorpusSnapshot::new(version, records)
        .map_err(|e| StoreError::Corrupt { path: dir.join(RECORDS_FILE), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use legaldata_core::testing::case;

    #[test]
    fn insert_then_unchanged_then_updated() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let a = case("FC", "2024 FC 1", "2024-01-01", "first text");
        let b = case("FC", "2024 FC 2", "2024-01-02", "second text");

        let r = store.upsert(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!((r.inserted, r.updated, r.unchanged, r.version), (2, 0, 0, 1));

        let bytes = fs::read(dir.path().join(RECORDS_FILE)).unwrap();
        let r = store.upsert(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!((r.inserted, r.updated, r.unchanged, r.version), (0, 0, 2, 1));
        assert_eq!(fs::read(dir.path().join(RECORDS_FILE)).unwrap(), bytes);

        let mut edited = a.clone();
        edited.unofficial_text_en = Some("first text, corrected".into());
        let r = store.upsert(vec![edited.clone()]).unwrap();
        assert_eq!((r.inserted, r.updated, r.unchanged, r.version), (0, 1, 0, 2));
        let wal = store.wal_entries().unwrap();
        assert_eq!(wal.len(), 1);
        assert_eq!(wal[0].previous, a);
        assert_eq!(store.snapshot().get(&a.key()), Some(&edited));
    }

    #[test]
    fn invalid_batch_is_rejected_whole() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let good = case("FC", "2024 FC 1", "2024-01-01", "text");
        let mut bad = case("FC", "2024 FC 2", "2024-01-01", "text");
        bad.upstream_license.clear();
        let err = store.upsert(vec![good, bad]).unwrap_err();
        match err {
            StoreError::Rejected(v) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].violations, vec![Violation::EmptyLicense]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(store.snapshot().is_empty());
        assert!(!dir.path().join(RECORDS_FILE).exists());
    }

    #[test]
    fn reopen_sees_committed_state() {
        let dir = tempfile::tempdir().unwrap();
        {
            let store = Store::open(dir.path()).unwrap();
            store.upsert(vec![case("SCC", "2024 SCC 1", "2024-01-01", "t")]).unwrap();
        }
        let store = Store::open_read_only(dir.path()).unwrap();
        assert_eq!(store.version(), 1);
        assert_eq!(store.snapshot().len(), 1);
        assert!(matches!(store.upsert(vec![]), Err(StoreError::ReadOnly)));
    }

    #[test]
    fn second_writer_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        let _first = Store::open(dir.path()).unwrap();
        assert!(matches!(Store::open(dir.path()), Err(StoreError::Locked(_))));
    }

    #[test]
    fn readers_keep_their_snapshot() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        store.upsert(vec![case("FC", "2024 FC 1", "2024-01-01", "t")]).unwrap();
        let before = store.snapshot();
        store.upsert(vec![case("FC", "2024 FC 2", "2024-01-01", "t")]).unwrap();
        assert_eq!(before.len(), 1);
        assert_eq!(before.version(), 1);
        assert_eq!(store.snapshot().len(), 2);
    }

    #[test]
    fn french_half_merges_into_existing_document() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let mut fr_only = case("FC", "2024 FC 1", "2024-01-01", "x");
        fr_only.citation_en = None;
        fr_only.citation_fr = Some("2024 CF 1".into());
        fr_only.unofficial_text_fr = fr_only.unofficial_text_en.take();
        fr_only.url_fr = fr_only.url_en.take();
        fr_only.scraped_timestamp_fr = fr_only.scraped_timestamp_en.take();
        store.upsert(vec![fr_only.clone()]).unwrap();

        let mut both = fr_only.clone();
        both.citation_en = Some("2024 FC 1".into());
        both.unofficial_text_en = Some("english".into());
        both.url_en = Some("https://example.org/en".into());
        both.scraped_timestamp_en = fr_only.scraped_timestamp_fr;
        let r = store.upsert(vec![both.clone()]).unwrap();
        assert_eq!(r.updated, 1);
        let snap = store.snapshot();
        assert_eq!(snap.len(), 1);
        assert_eq!(snap.records().next().unwrap().key().citation, "2024 FC 1");
    }
}
