//! Record builders for tests and fixtures across the workspace.

use chrono::{NaiveDate, TimeZone, Utc};

use crate::model::{DocumentKind, DocumentRecord, LawSection};

pub const FIXTURE_LICENSE: &str = "Reproduced under the Reproduction of Federal Law Order; not an official version";

fn date(iso: &str) -> NaiveDate {
    NaiveDate::parse_from_str(iso, "%Y-%m-%d").expect("fixture date")
}

/// English-only case record with a valid url and timestamp.
pub fn case(dataset: &str, citation: &str, iso_date: &str, text: &str) -> DocumentRecord {
    let mut r = DocumentRecord::new(dataset, DocumentKind::Case, FIXTURE_LICENSE);
    r.citation_en = Some(citation.to_owned());
    r.name_en = Some(format!("Applicant v. Respondent ({citation})"));
    r.document_date_en = Some(date(iso_date));
    r.url_en = Some(format!("https://example.org/{dataset}/{}", citation.replace(' ', "-")));
    r.scraped_timestamp_en = Some(Utc.with_ymd_and_hms(2025, 8, 2, 12, 0, 0).unwrap());
    r.unofficial_text_en = Some(text.to_owned());
    r
}

/// English-only law record whose flattened text is built from `sections`.
pub fn law(dataset: &str, citation: &str, iso_date: &str, sections: &[(&str, &str)]) -> DocumentRecord {
    let mut r = DocumentRecord::new(dataset, DocumentKind::Law, FIXTURE_LICENSE);
    r.citation_en = Some(citation.to_owned());
    r.name_en = Some(format!("Act {citation}"));
    r.document_date_en = Some(date(iso_date));
    r.url_en = Some(format!("https://example.org/laws/{}", citation.replace(' ', "-")));
    r.scraped_timestamp_en = Some(Utc.with_ymd_and_hms(2025, 8, 2, 12, 0, 0).unwrap());
    let sections: Vec<LawSection> = sections
        .iter()
        .map(|(label, text)| LawSection { label: (*label).to_owned(), heading: None, text: (*text).to_owned() })
        .collect();
    r.unofficial_text_en =
        Some(sections.iter().map(|s| format!("{} {}", s.label, s.text)).collect::<Vec<_>>().join("\n\n"));
    r.unofficial_sections_en = Some(sections);
    r
}
