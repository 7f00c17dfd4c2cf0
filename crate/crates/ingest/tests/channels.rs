mod common;

use common::*;
use legaldata_core::{DocumentKind, Language, SourceDescriptor};
use legaldata_ingest::{
    import_file_drop, ingest_batch, parse_listing, run_source, DocumentStub, FetchError, FileDropState, IngestState,
    Outcome, ScriptedFetcher,
};
use legaldata_store::Store;
use tempfile::TempDir;

fn stub(n: u32) -> DocumentStub {
    DocumentStub {
        dataset: "FC".into(),
        citation: Some(format!("2025 FC {n}")),
        name: None,
        date: None,
        fetch_url: page_url(n),
        language: Language::En,
    }
}

#[test]
fn batch_stores_then_recognizes_duplicates() {
    let dir = TempDir::new().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let fetcher = fetcher("feed_ab.xml");
    let stubs = [stub(1449), stub(1450)];

    let first = ingest_batch(&stubs, &fetcher, &fc_listing(), &store, &options()).unwrap();
    assert_eq!((first.new, first.updated, first.duplicate, first.failed), (2, 0, 0, 0));
    assert!(first.is_consistent());
    let bytes = store_bytes(dir.path());

    let second = ingest_batch(&stubs, &fetcher, &fc_listing(), &store, &options()).unwrap();
    assert_eq!((second.new, second.updated, second.duplicate), (0, 0, 2));
    assert_eq!(store_bytes(dir.path()), bytes);
    assert_eq!(store.version(), 1);

    let rec = store.snapshot().find("FC", "2025 FC 1449").cloned().unwrap();
    assert!(rec.text(Language::En).unwrap().contains("PRESENT: The Honourable Mr. Justice Ahmed"));
    assert_eq!(rec.upstream_license, FC_LICENSE);
}

#[test]
fn one_failed_fetch_does_not_block_the_rest() {
    let dir = TempDir::new().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let fetcher = ScriptedFetcher::new()
        .respond(page_url(1449), Ok(legaldata_ingest::Fetched::html(read("pages/1449.html"))))
        .respond(page_url(1450), Err(FetchError::Timeout(page_url(1450))))
        .respond(page_url(1452), Ok(legaldata_ingest::Fetched::html(read("pages/1452.html"))));
    let report =
        ingest_batch(&[stub(1449), stub(1450), stub(1452)], &fetcher, &fc_listing(), &store, &options()).unwrap();
    assert_eq!((report.new, report.failed), (2, 1));
    let failed: Vec<_> = report.items.iter().filter(|i| i.outcome == Outcome::Failed).collect();
    assert_eq!(failed[0].item, page_url(1450));
    assert!(store.snapshot().find("FC", "2025 FC 1450").is_none());
    assert_eq!(store.snapshot().len(), 2);
}

#[test]
fn changed_text_is_an_update() {
    let dir = TempDir::new().unwrap();
    let store = Store::open(dir.path()).unwrap();
    ingest_batch(&[stub(1449)], &fetcher("feed_ab.xml"), &fc_listing(), &store, &options()).unwrap();
    let revised = ScriptedFetcher::new().respond(
        page_url(1449),
        Ok(legaldata_ingest::Fetched::html(read("pages/1449.html").replace("allowed", "allowed in part"))),
    );
    let report = ingest_batch(&[stub(1449)], &revised, &fc_listing(), &store, &options()).unwrap();
    assert_eq!((report.new, report.updated), (0, 1));
    let wal = store.wal_entries().unwrap();
    assert_eq!(wal.len(), 1);
    assert!(!wal[0].previous.text(Language::En).unwrap().contains("allowed in part"));
}

#[test]
fn listing_source_end_to_end() {
    let dir = TempDir::new().unwrap();
    let store = Store::open(dir.path().join("store")).unwrap();
    let state = IngestState::new(dir.path().join("state"));
    let f = fetcher("feed_ab.xml");
    let first = run_source(&fc_listing(), &f, &store, &state, &options()).unwrap();
    assert_eq!(first.new, 3);
    let bytes = store_bytes(store.dir());
    let second = run_source(&fc_listing(), &f, &store, &state, &options()).unwrap();
    assert!(second.all_duplicate(), "{}", second.summary());
    assert_eq!(store_bytes(store.dir()), bytes);

    let listing = parse_listing(&read("listing_fc.html"), &fc_listing()).unwrap();
    for s in listing.stubs {
        let citation = s.citation.unwrap();
        let r = store.snapshot().find("FC", &citation).cloned().unwrap();
        assert_eq!(r.kind, DocumentKind::Case);
        assert_eq!(r.citation(Language::En), Some(citation.as_str()));
        assert_eq!(r.document_date(Language::En), s.date);
    }
}

#[test]
fn rss_source_keeps_state_between_runs() {
    let dir = TempDir::new().unwrap();
    let store = Store::open(dir.path().join("store")).unwrap();
    let state = IngestState::new(dir.path().join("state"));

    let first = run_source(&fc_rss(), &fetcher("feed_ab.xml"), &store, &state, &options()).unwrap();
    assert_eq!(first.new, 2);
    let bytes = store_bytes(store.dir());
    let second = run_source(&fc_rss(), &fetcher("feed_ab.xml"), &store, &state, &options()).unwrap();
    assert_eq!((second.new, second.duplicate), (0, 2));
    assert!(second.all_duplicate());
    assert_eq!(store_bytes(store.dir()), bytes);

    let third = run_source(&fc_rss(), &fetcher("feed_abc.xml"), &store, &state, &options()).unwrap();
    assert_eq!((third.new, third.duplicate), (1, 2));
    assert!(store.snapshot().find("FC", "2025 FC 1452").is_some());
}

#[test]
fn rss_failed_fetch_is_retried_next_run() {
    let dir = TempDir::new().unwrap();
    let store = Store::open(dir.path().join("store")).unwrap();
    let state = IngestState::new(dir.path().join("state"));
    let flaky = ScriptedFetcher::new()
        .respond(fc_rss().feed_url.unwrap(), Ok(legaldata_ingest::Fetched::text(read("feed_ab.xml"))))
        .respond(page_url(1449), Ok(legaldata_ingest::Fetched::html(read("pages/1449.html"))))
        .respond(page_url(1450), Err(FetchError::Timeout(page_url(1450))));
    let first = run_source(&fc_rss(), &flaky, &store, &state, &options()).unwrap();
    assert_eq!((first.new, first.failed), (1, 1));
    let second = run_source(&fc_rss(), &fetcher("feed_ab.xml"), &store, &state, &options()).unwrap();
    assert_eq!((second.new, second.duplicate), (1, 1));
}

#[test]
fn law_sync_merges_languages() {
    let dir = TempDir::new().unwrap();
    let store = Store::open(dir.path().join("store")).unwrap();
    let state = IngestState::new(dir.path().join("state"));
    let f = ScriptedFetcher::new();
    let first = run_source(&leg_sync(), &f, &store, &state, &options()).unwrap();
    assert_eq!(first.failed, 0, "{}", first.summary());
    let snap = store.snapshot();
    assert_eq!(snap.len(), 2);
    let irpa = snap.find("LEG", "I-2.5").unwrap();
    assert_eq!(irpa.citation(Language::En), Some("I-2.5"));
    assert_eq!(irpa.citation(Language::Fr), Some("I-2.5"));
    assert_eq!(irpa.sections(Language::En).unwrap().len(), 2);
    assert!(irpa.sections(Language::Fr).is_some());
    assert_eq!(irpa.upstream_license, LAW_LICENSE);
    let bytes = store_bytes(store.dir());

    let second = run_source(&leg_sync(), &f, &store, &state, &options()).unwrap();
    assert!(second.all_duplicate(), "{}", second.summary());
    assert_eq!(store_bytes(store.dir()), bytes);
}

#[test]
fn truncated_statute_fails_alone() {
    let repo = TempDir::new().unwrap();
    std::fs::copy(fixture("laws/statute_nested.xml"), repo.path().join("a.xml")).unwrap();
    let xml = read("laws/statute_basic.xml");
    std::fs::write(repo.path().join("b.xml"), &xml[..xml.len() / 2]).unwrap();
    let mut src = leg_sync();
    src.repo_path = Some(repo.path().to_string_lossy().into_owned());
    let dir = TempDir::new().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let report =
        run_source(&src, &ScriptedFetcher::new(), &store, &IngestState::new(repo.path().join("st")), &options())
            .unwrap();
    assert_eq!((report.new, report.failed), (1, 1));
}

#[test]
fn file_drop_imports_once() {
    let dir = TempDir::new().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let mut state = FileDropState::default();
    let first = import_file_drop(&fixture("drop"), &rad_drop(), &store, &mut state, &options()).unwrap();
    assert_eq!((first.new, first.skipped, first.failed), (2, 0, 0), "{}", first.summary());
    let rec = store.snapshot().find("RAD", "2025 RAD 18").cloned().unwrap();
    assert_eq!(rec.name(Language::En), Some("Y (Re)"));
    assert!(!rec.text(Language::En).unwrap().contains('<'));
    let bytes = store_bytes(dir.path());

    let second = import_file_drop(&fixture("drop"), &rad_drop(), &store, &mut state, &options()).unwrap();
    assert_eq!((second.new, second.duplicate), (0, 2));
    assert_eq!(store_bytes(dir.path()), bytes);
}

#[test]
fn file_drop_without_citation_is_skipped() {
    let dir = TempDir::new().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let mut state = FileDropState::default();
    let report = import_file_drop(&fixture("drop_bad"), &rad_drop(), &store, &mut state, &options()).unwrap();
    assert_eq!((report.new, report.skipped), (0, 1));
    assert!(report.items[0].note.as_deref().unwrap().contains("no citation"));
    assert!(store.snapshot().is_empty());
    assert!(state.processed.is_empty());
}

#[test]
fn every_stored_record_carries_its_source_license() {
    let dir = TempDir::new().unwrap();
    let store = Store::open(dir.path().join("store")).unwrap();
    let state = IngestState::new(dir.path().join("state"));
    let sources: Vec<SourceDescriptor> = vec![fc_listing(), leg_sync(), rad_drop()];
    for s in &sources {
        run_source(s, &fetcher("feed_ab.xml"), &store, &state, &options()).unwrap();
    }
    let snap = store.snapshot();
    assert_eq!(snap.len(), 3 + 2 + 2);
    for r in snap.records() {
        let src = sources.iter().find(|s| s.dataset == r.dataset).unwrap();
        assert_eq!(r.upstream_license, src.license_text);
    }
}
