#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use chrono::{TimeZone, Utc};
use legaldata_core::{ChannelKind, DocumentKind, Language, SelectorConfig, SourceDescriptor};
use legaldata_ingest::{Fetched, IngestOptions, ScriptedFetcher};

pub const FC_LICENSE: &str =
    "Reproduced from the Federal Court website under its terms of use; not an official version";
pub const LAW_LICENSE: &str = "Reproduction of Federal Law Order (SI/97-5); not an official version";
pub const RAD_LICENSE: &str = "Provided by the Immigration and Refugee Board; anonymized";
pub const BASE: &str = "https://decisions.example.org";

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn read(rel: &str) -> String {
    std::fs::read_to_string(fixture(rel)).unwrap()
}

fn source(dataset: &str, kind: DocumentKind, channel: ChannelKind, license: &str) -> SourceDescriptor {
    SourceDescriptor {
        dataset: dataset.into(),
        kind,
        channel,
        language: Language::En,
        listing_url: None,
        feed_url: None,
        repo_path: None,
        drop_path: None,
        selectors: None,
        license_text: license.into(),
        politeness_delay: 0.0,
        schedule: None,
    }
}

pub fn fc_listing() -> SourceDescriptor {
    let mut s = source("FC", DocumentKind::Case, ChannelKind::ListingScrape, FC_LICENSE);
    s.listing_url = Some(format!("{BASE}/fc-cf/en/listing.do"));
    s.selectors = Some(SelectorConfig {
        row: "tr.decision".into(),
        citation: "td.citation".into(),
        name: Some("td.name".into()),
        date: Some("td.date".into()),
        link: "td.name a".into(),
        link_attr: "href".into(),
        date_format: None,
    });
    s
}

pub fn fc_rss() -> SourceDescriptor {
    let mut s = source("FC", DocumentKind::Case, ChannelKind::Rss, FC_LICENSE);
    s.feed_url = Some(format!("{BASE}/fc-cf/en/rss.xml"));
    s
}

pub fn leg_sync() -> SourceDescriptor {
    let mut s = source("LEG", DocumentKind::Law, ChannelKind::LawRepoSync, LAW_LICENSE);
    s.repo_path = Some(fixture("laws").to_string_lossy().into_owned());
    s
}

pub fn rad_drop() -> SourceDescriptor {
    let mut s = source("RAD", DocumentKind::Case, ChannelKind::FileDrop, RAD_LICENSE);
    s.drop_path = Some(fixture("drop").to_string_lossy().into_owned());
    s
}

pub fn page_url(n: u32) -> String {
    format!("{BASE}/fc-cf/decisions/en/item/{n}/index.do")
}

/// Serves the listing, both feeds (under the feed URL, `abc` when asked)
/// and the three decision pages.
pub fn fetcher(feed: &str) -> ScriptedFetcher {
    let mut f = ScriptedFetcher::new()
        .respond(format!("{BASE}/fc-cf/en/listing.do"), Ok(Fetched::html(read("listing_fc.html"))))
        .respond(format!("{BASE}/fc-cf/en/rss.xml"), Ok(Fetched::text(read(feed))));
    for n in [1449, 1450, 1452] {
        f = f.respond(page_url(n), Ok(Fetched::html(read(&format!("pages/{n}.html")))));
    }
    f
}

pub fn options() -> IngestOptions {
    IngestOptions {
        politeness_delay: Some(std::time::Duration::ZERO),
        clock: Arc::new(|| Utc.with_ymd_and_hms(2025, 8, 8, 6, 0, 0).unwrap()),
    }
}

/// Every store file except the lock, for byte comparisons.
pub fn store_bytes(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file() && p.file_name().unwrap() != legaldata_store::LOCK_FILE)
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}
