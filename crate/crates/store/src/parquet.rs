//! Parquet layout shared with external consumers.
//!
//! ```text
//! <out>/cases/cases.parquet
//! <out>/laws/laws.parquet
//! <out>/README.md            dataset card
//! ```
//!
//! Column names are the record field names. The document kind is implied by
//! the directory. Dates are `Date32`, acquisition timestamps are
//! `Timestamp(ns, "UTC")`, and law sections are a nullable
//! `List<Struct<label, heading, text>>`.

use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use arrow_array::builder::{Date32Builder, StringBuilder, TimestampNanosecondBuilder};
use arrow_array::cast::AsArray;
use arrow_array::types::{
    Date32Type, TimestampMicrosecondType, TimestampMillisecondType, TimestampNanosecondType, TimestampSecondType,
};
use arrow_array::{Array, ArrayRef, ListArray, RecordBatch, StructArray};
use arrow_buffer::{NullBuffer, OffsetBuffer};
use arrow_schema::{DataType, Field, Fields, Schema, SchemaRef, TimeUnit};
use chrono::{DateTime, NaiveDate, Utc};
use legaldata_core::{
    validate_record, CorpusSnapshot, DocumentKind, DocumentRecord, Language, LawSection, RecordKey, Tokenizer,
};
use parquet::arrow::arrow_reader::ParquetRecordBatchReaderBuilder;
use parquet::arrow::ArrowWriter;
use parquet::basic::Compression;
use parquet::file::metadata::KeyValue;
use parquet::file::properties::WriterProperties;
use serde::{Deserialize, Serialize};

use crate::card::render_card;
use crate::StoreError;

pub const CARD_FILE: &str = "README.md";
pub const VERSION_METADATA_KEY: &str = "legaldata.snapshot_version";
const BATCH_ROWS: usize = 1000;

pub const CASE_COLUMNS: [&str; 16] = [
    "dataset",
    "citation_en",
    "citation_fr",
    "citation2_en",
    "citation2_fr",
    "name_en",
    "name_fr",
    "document_date_en",
    "document_date_fr",
    "url_en",
    "url_fr",
    "scraped_timestamp_en",
    "scraped_timestamp_fr",
    "unofficial_text_en",
    "unofficial_text_fr",
    "upstream_license",
];

pub const LAW_COLUMNS: [&str; 18] = [
    "dataset",
    "citation_en",
    "citation_fr",
    "citation2_en",
    "citation2_fr",
    "name_en",
    "name_fr",
    "document_date_en",
    "document_date_fr",
    "url_en",
    "url_fr",
    "scraped_timestamp_en",
    "scraped_timestamp_fr",
    "unofficial_text_en",
    "unofficial_text_fr",
    "unofficial_sections_en",
    "unofficial_sections_fr",
    "upstream_license",
];

fn columns(kind: DocumentKind) -> &'static [&'static str] {
    match kind {
        DocumentKind::Case => &CASE_COLUMNS,
        DocumentKind::Law => &LAW_COLUMNS,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportedFile {
    /// Relative to the export directory, `/`-separated.
    pub path: String,
    pub kind: DocumentKind,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u64,
    pub files: Vec<ExportedFile>,
    pub card: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedRow {
    pub file: PathBuf,
    /// Zero-based row index within the file.
    pub row: usize,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct LoadOutcome {
    pub snapshot: CorpusSnapshot,
    pub rejected: Vec<RejectedRow>,
}

fn section_fields() -> Fields {
    Fields::from(vec![
        Field::new("label", DataType::Utf8, false),
        Field::new("heading", DataType::Utf8, true),
        Field::new("text", DataType::Utf8, false),
    ])
}

fn section_item() -> Arc<Field> {
    Arc::new(Field::new("item", DataType::Struct(section_fields()), false))
}

fn data_type(column: &str) -> DataType {
    match column {
        c if c.starts_with("document_date") => DataType::Date32,
        c if c.starts_with("scraped_timestamp") => DataType::Timestamp(TimeUnit::Nanosecond, Some("UTC".into())),
        c if c.starts_with("unofficial_sections") => DataType::List(section_item()),
        _ => DataType::Utf8,
    }
}

fn schema(kind: DocumentKind) -> SchemaRef {
    let fields: Vec<Field> = columns(kind)
        .iter()
        .map(|&c| Field::new(c, data_type(c), !matches!(c, "dataset" | "upstream_license")))
        .collect();
    Arc::new(Schema::new(fields))
}

const EPOCH: NaiveDate = NaiveDate::from_ymd_opt(1970, 1, 1).expect("epoch");

fn string_column(rows: &[&DocumentRecord], get: impl Fn(&DocumentRecord) -> Option<&str>) -> ArrayRef {
    let mut b = StringBuilder::new();
    for r in rows {
        b.append_option(get(r));
    }
    Arc::new(b.finish())
}

fn date_column(rows: &[&DocumentRecord], lang: Language) -> ArrayRef {
    let mut b = Date32Builder::new();
    for r in rows {
        b.append_option(r.document_date(lang).map(|d| (d - EPOCH).num_days() as i32));
    }
    Arc::new(b.finish())
}

fn timestamp_column(rows: &[&DocumentRecord], lang: Language) -> Result<ArrayRef, StoreError> {
    let mut b = TimestampNanosecondBuilder::new().with_timezone("UTC");
    for r in rows {
        let ns = match r.scraped_timestamp(lang) {
            None => None,
            Some(ts) => Some(ts.timestamp_nanos_opt().ok_or_else(|| {
                StoreError::Parquet(format!("{}: timestamp {ts} outside the nanosecond range", r.key()))
            })?),
        };
        b.append_option(ns);
    }
    Ok(Arc::new(b.finish()))
}

fn sections_column(rows: &[&DocumentRecord], lang: Language) -> ArrayRef {
    let (mut labels, mut headings, mut texts) = (StringBuilder::new(), StringBuilder::new(), StringBuilder::new());
    let mut lengths = Vec::with_capacity(rows.len());
    let mut valid = Vec::with_capacity(rows.len());
    for r in rows {
        let sections = r.sections(lang);
        valid.push(sections.is_some());
        let sections = sections.unwrap_or_default();
        lengths.push(sections.len());
        for s in sections {
            labels.append_value(&s.label);
            headings.append_option(s.heading.as_deref());
            texts.append_value(&s.text);
        }
    }
    let structs = StructArray::new(
        section_fields(),
        vec![Arc::new(labels.finish()), Arc::new(headings.finish()), Arc::new(texts.finish())],
        None,
    );
    Arc::new(ListArray::new(
        section_item(),
        OffsetBuffer::from_lengths(lengths),
        Arc::new(structs),
        Some(NullBuffer::from(valid)),
    ))
}

fn batch(kind: DocumentKind, rows: &[&DocumentRecord]) -> Result<RecordBatch, StoreError> {
    use Language::{En, Fr};
    let mut arrays: Vec<ArrayRef> = Vec::new();
    for &c in columns(kind) {
        let array = match c {
            "dataset" => string_column(rows, |r| Some(&r.dataset)),
            "citation_en" => string_column(rows, |r| r.citation(En)),
            "citation_fr" => string_column(rows, |r| r.citation(Fr)),
            "citation2_en" => string_column(rows, |r| r.citation2_en.as_deref()),
            "citation2_fr" => string_column(rows, |r| r.citation2_fr.as_deref()),
            "name_en" => string_column(rows, |r| r.name(En)),
            "name_fr" => string_column(rows, |r| r.name(Fr)),
            "document_date_en" => date_column(rows, En),
            "document_date_fr" => date_column(rows, Fr),
            "url_en" => string_column(rows, |r| r.url(En)),
            "url_fr" => string_column(rows, |r| r.url(Fr)),
            "scraped_timestamp_en" => timestamp_column(rows, En)?,
            "scraped_timestamp_fr" => timestamp_column(rows, Fr)?,
            "unofficial_text_en" => string_column(rows, |r| r.text(En)),
            "unofficial_text_fr" => string_column(rows, |r| r.text(Fr)),
            "unofficial_sections_en" => sections_column(rows, En),
            "unofficial_sections_fr" => sections_column(rows, Fr),
            "upstream_license" => string_column(rows, |r| Some(&r.upstream_license)),
            other => unreachable!("unknown column {other}"),
        };
        arrays.push(array);
    }
    Ok(RecordBatch::try_new(schema(kind), arrays)?)
}

fn write_file(path: &Path, kind: DocumentKind, rows: &[&DocumentRecord], version: u64) -> Result<(), StoreError> {
    let dir = path.parent().expect("export path has a parent");
    fs::create_dir_all(dir).map_err(|source| StoreError::Io { path: dir.to_owned(), source })?;
    let file = File::create(path).map_err(|source| StoreError::Io { path: path.to_owned(), source })?;
    let props = WriterProperties::builder()
        .set_compression(Compression::SNAPPY)
        .set_key_value_metadata(Some(vec![KeyValue::new(VERSION_METADATA_KEY.to_owned(), version.to_string())]))
        .build();
    let mut writer = ArrowWriter::try_new(file, schema(kind), Some(props))?;
    for chunk in rows.chunks(BATCH_ROWS) {
        writer.write(&batch(kind, chunk)?)?;
    }
    writer.close()?;
    Ok(())
}

/// Writes `cases/cases.parquet`, `laws/laws.parquet` and the dataset card.
///
/// Both files are always written, empty or not. Rows are in key order, so
/// exporting the same snapshot twice produces identical files.
pub fn export_parquet(
    snapshot: &CorpusSnapshot,
    out_dir: impl AsRef<Path>,
    tokenizer: &Tokenizer,
) -> Result<Manifest, StoreError> {
    let out_dir = out_dir.as_ref();
    let mut files = Vec::new();
    for kind in [DocumentKind::Case, DocumentKind::Law] {
        let rows: Vec<&DocumentRecord> = snapshot.records().filter(|r| r.kind == kind).collect();
        let rel = format!("{0}/{0}.parquet", kind.collection());
        write_file(&out_dir.join(&rel), kind, &rows, snapshot.version())?;
        files.push(ExportedFile { path: rel, kind, rows: rows.len() });
    }
    let card = render_card(snapshot, tokenizer, &files);
    let card_path = out_dir.join(CARD_FILE);
    fs::write(&card_path, card).map_err(|source| StoreError::Io { path: card_path, source })?;
    Ok(Manifest { version: snapshot.version(), files, card: CARD_FILE.to_owned() })
}

fn parquet_files(dir: &Path) -> Result<Vec<PathBuf>, StoreError> {
    let entries = match fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(source) => return Err(StoreError::Io { path: dir.to_owned(), source }),
    };
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|source| StoreError::Io { path: dir.to_owned(), source })?.path();
        if path.extension().is_some_and(|e| e == "parquet") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Column accessors over one batch, tolerant of the common equivalent
/// physical types third-party writers produce.
struct Columns<'a> {
    file: &'a Path,
    batch: &'a RecordBatch,
}

impl<'a> Columns<'a> {
    fn get(&self, name: &str) -> &'a ArrayRef {
        self.batch.column_by_name(name).expect("columns checked before reading")
    }

    fn type_error(&self, name: &str, dt: &DataType) -> StoreError {
        StoreError::Corrupt { path: self.file.to_owned(), message: format!("column {name} has unsupported type {dt}") }
    }

    fn strings(&self, name: &str) -> Result<Vec<Option<String>>, StoreError> {
        let a = self.get(name);
        Ok(match a.data_type() {
            DataType::Utf8 => a.as_string::<i32>().iter().map(|v| v.map(str::to_owned)).collect(),
            DataType::LargeUtf8 => a.as_string::<i64>().iter().map(|v| v.map(str::to_owned)).collect(),
            DataType::Utf8View => a.as_string_view().iter().map(|v| v.map(str::to_owned)).collect(),
            DataType::Null => vec![None; a.len()],
            dt => return Err(self.type_error(name, dt)),
        })
    }

    fn dates(&self, name: &str) -> Result<Vec<Option<NaiveDate>>, StoreError> {
        let a = self.get(name);
        match a.data_type() {
            DataType::Date32 => Ok(a
                .as_primitive::<Date32Type>()
                .iter()
                .map(|d| d.map(|d| EPOCH + chrono::Duration::days(d.into())))
                .collect()),
            DataType::Null => Ok(vec![None; a.len()]),
            dt => Err(self.type_error(name, dt)),
        }
    }

    fn timestamps(&self, name: &str) -> Result<Vec<Option<DateTime<Utc>>>, StoreError> {
        let a = self.get(name);
        let nanos: Vec<Option<i64>> = match a.data_type() {
            DataType::Timestamp(TimeUnit::Nanosecond, _) => {
                a.as_primitive::<TimestampNanosecondType>().iter().collect()
            }
            DataType::Timestamp(TimeUnit::Microsecond, _) => {
                a.as_primitive::<TimestampMicrosecondType>().iter().map(|v| v.map(|v| v * 1_000)).collect()
            }
            DataType::Timestamp(TimeUnit::Millisecond, _) => {
                a.as_primitive::<TimestampMillisecondType>().iter().map(|v| v.map(|v| v * 1_000_000)).collect()
            }
            DataType::Timestamp(TimeUnit::Second, _) => {
                a.as_primitive::<TimestampSecondType>().iter().map(|v| v.map(|v| v * 1_000_000_000)).collect()
            }
            DataType::Null => vec![None; a.len()],
            dt => return Err(self.type_error(name, dt)),
        };
        Ok(nanos.into_iter().map(|n| n.map(DateTime::from_timestamp_nanos)).collect())
    }

    fn sections(&self, name: &str) -> Result<Vec<Option<Vec<LawSection>>>, StoreError> {
        let a = self.get(name);
        let list = match a.data_type() {
            DataType::List(_) => a.as_list::<i32>(),
            DataType::Null => return Ok(vec![None; a.len()]),
            dt => return Err(self.type_error(name, dt)),
        };
        let mut out = Vec::with_capacity(list.len());
        for i in 0..list.len() {
            if list.is_null(i) {
                out.push(None);
                continue;
            }
            let value = list.value(i);
            let Some(structs) = value.as_struct_opt() else {
                return Err(self.type_error(name, a.data_type()));
            };
            let inner = RecordBatch::from(structs.clone());
            let cols = Columns { file: self.file, batch: &inner };
            for field in ["label", "heading", "text"] {
                if inner.column_by_name(field).is_none() {
                    return Err(StoreError::Schema {
                        file: self.file.to_owned(),
                        missing: vec![format!("{name}.{field}")],
                    });
                }
            }
            let (labels, headings, texts) = (cols.strings("label")?, cols.strings("heading")?, cols.strings("text")?);
            out.push(Some(
                labels
                    .into_iter()
                    .zip(headings)
                    .zip(texts)
                    .map(|((label, heading), text)| LawSection {
                        label: label.unwrap_or_default(),
                        heading,
                        text: text.unwrap_or_default(),
                    })
                    .collect(),
            ));
        }
        Ok(out)
    }
}

fn records_from_batch(file: &Path, kind: DocumentKind, batch: &RecordBatch) -> Result<Vec<DocumentRecord>, StoreError> {
    let cols = Columns { file, batch };
    let n = batch.num_rows();
    let mut records: Vec<DocumentRecord> =
        (0..n).map(|_| DocumentRecord::new(String::new(), kind, String::new())).collect();

    macro_rules! fill {
        ($values:expr, |$r:ident, $v:ident| $assign:expr) => {
            for ($r, $v) in records.iter_mut().zip($values) {
                $assign;
            }
        };
    }
    fill!(cols.strings("dataset")?, |r, v| r.dataset = v.unwrap_or_default());
    fill!(cols.strings("upstream_license")?, |r, v| r.upstream_license = v.unwrap_or_default());
    for lang in Language::ALL {
        let code = lang.code();
        let col = |field: &str| format!("{field}_{code}");
        fill!(cols.strings(&col("citation"))?, |r, v| *r.fields_mut(lang).citation = v);
        fill!(cols.strings(&col("citation2"))?, |r, v| *r.fields_mut(lang).citation2 = v);
        fill!(cols.strings(&col("name"))?, |r, v| *r.fields_mut(lang).name = v);
        fill!(cols.dates(&col("document_date"))?, |r, v| *r.fields_mut(lang).document_date = v);
        fill!(cols.strings(&col("url"))?, |r, v| *r.fields_mut(lang).url = v);
        fill!(cols.timestamps(&col("scraped_timestamp"))?, |r, v| *r.fields_mut(lang).scraped_timestamp = v);
        fill!(cols.strings(&col("unofficial_text"))?, |r, v| *r.fields_mut(lang).unofficial_text = v);
        if kind == DocumentKind::Law {
            fill!(cols.sections(&col("unofficial_sections"))?, |r, v| *r.fields_mut(lang).unofficial_sections = v);
        }
    }
    Ok(records)
}

/// Loads every `cases/*.parquet` and `laws/*.parquet` file under `dir`.
///
/// Rows failing validation (or repeating an earlier row's key) are reported
/// in `rejected` and left out; the rest load. The snapshot version is the
/// highest version recorded in the files' metadata, or 0 for files written
/// elsewhere.
pub fn load_parquet(dir: impl AsRef<Path>) -> Result<LoadOutcome, StoreError> {
    let dir = dir.as_ref();
    let mut version = 0u64;
    let mut accepted: Vec<DocumentRecord> = Vec::new();
    let mut seen: std::collections::HashSet<RecordKey> = std::collections::HashSet::new();
    let mut rejected = Vec::new();

    for kind in [DocumentKind::Case, DocumentKind::Law] {
        for path in parquet_files(&dir.join(kind.collection()))? {
            let file = File::open(&path).map_err(|source| StoreError::Io { path: path.clone(), source })?;
            let builder = ParquetRecordBatchReaderBuilder::try_new(file)?;

            let present: Vec<&str> = builder.schema().fields().iter().map(|f| f.name().as_str()).collect();
            let missing: Vec<String> =
                columns(kind).iter().filter(|c| !present.contains(c)).map(|c| (*c).to_owned()).collect();
            if !missing.is_empty() {
                return Err(StoreError::Schema { file: path, missing });
            }
            if let Some(kv) = builder.metadata().file_metadata().key_value_metadata() {
                let recorded = kv
                    .iter()
                    .find(|e| e.key == VERSION_METADATA_KEY)
                    .and_then(|e| e.value.as_deref())
                    .and_then(|v| v.parse::<u64>().ok());
                version = version.max(recorded.unwrap_or(0));
            }

            let mut row = 0usize;
            for batch in builder.build()? {
                let batch = batch?;
                for record in records_from_batch(&path, kind, &batch)? {
                    let record = record.normalized();
                    let mut reasons: Vec<String> = validate_record(&record).iter().map(ToString::to_string).collect();
                    if reasons.is_empty() && !seen.insert(record.key()) {
                        reasons.push(format!("duplicate record key {}", record.key()));
                    }
                    if reasons.is_empty() {
                        accepted.push(record);
                    } else {
                        tracing::warn!(file = %path.display(), row, ?reasons, "rejected parquet row");
                        rejected.push(RejectedRow { file: path.clone(), row, reasons });
                    }
                    row += 1;
                }
            }
        }
    }
    let snapshot = CorpusSnapshot::new(version, accepted)
        .map_err(|e| StoreError::Corrupt { path: dir.to_owned(), message: e.to_string() })?;
    Ok(LoadOutcome { snapshot, rejected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use legaldata_core::testing::{case, law};

    fn fixture() -> CorpusSnapshot {
        let mut fr = case("SCC", "2024 SCC 3", "2024-03-01", "english");
        fr.citation_fr = Some("2024 CSC 3".into());
        fr.unofficial_text_fr = Some("français".into());
        fr.url_fr = Some("https://example.org/fr".into());
        fr.scraped_timestamp_fr = fr.scraped_timestamp_en;
        fr.document_date_fr = fr.document_date_en;
        let mut l = law("LEG", "R.S.C. 1985, c. I-2", "2025-01-01", &[("1", "Short title."), ("2(1)", "Definitions.")]);
        l.unofficial_sections_en.as_mut().unwrap()[0].heading = Some("Short title".into());
        CorpusSnapshot::new(
            7,
            vec![case("FC", "2024 FC 1", "2024-01-01", "one"), case("FC", "2024 FC 2", "2024-01-02", "two"), fr, l],
        )
        .unwrap()
    }

    #[test]
    fn column_lists_follow_the_record_schema() {
        let expected: Vec<String> = std::iter::once("dataset".to_owned())
            .chain(
                ["citation", "citation2", "name", "document_date", "url", "scraped_timestamp", "unofficial_text"]
                    .iter()
                    .flat_map(|f| [format!("{f}_en"), format!("{f}_fr")]),
            )
            .chain(std::iter::once("upstream_license".to_owned()))
            .collect();
        assert_eq!(CASE_COLUMNS.to_vec(), expected);
        assert_eq!(LAW_COLUMNS.len(), CASE_COLUMNS.len() + 2);
    }

    #[test]
    fn export_counts_rows_and_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let snap = fixture();
        let manifest = export_parquet(&snap, dir.path(), &Tokenizer::WordFallback).unwrap();
        let rows: Vec<(&str, usize)> = manifest.files.iter().map(|f| (f.path.as_str(), f.rows)).collect();
        assert_eq!(rows, vec![("cases/cases.parquet", 3), ("laws/laws.parquet", 1)]);

        let loaded = load_parquet(dir.path()).unwrap();
        assert!(loaded.rejected.is_empty());
        assert_eq!(loaded.snapshot, snap);
    }

    #[test]
    fn empty_snapshot_writes_zero_row_files() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = export_parquet(&CorpusSnapshot::empty(), dir.path(), &Tokenizer::WordFallback).unwrap();
        assert!(manifest.files.iter().all(|f| f.rows == 0));
        assert!(dir.path().join("cases/cases.parquet").exists());
        assert!(dir.path().join(CARD_FILE).exists());
        let loaded = load_parquet(dir.path()).unwrap();
        assert!(loaded.snapshot.is_empty());
    }

    #[test]
    fn repeated_export_is_byte_identical() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        export_parquet(&fixture(), a.path(), &Tokenizer::WordFallback).unwrap();
        export_parquet(&fixture(), b.path(), &Tokenizer::WordFallback).unwrap();
        for f in ["cases/cases.parquet", "laws/laws.parquet", CARD_FILE] {
            assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
        }
    }
}
