//! Seeded random corpora and queries for property and acceptance tests,
//! plus one small hand-written corpus with known contents.
//!
//! Every generated record passes `validate_record`. Citations embed a
//! per-corpus ordinal, so keys never collide.

use chrono::{DateTime, Duration, NaiveDate, TimeZone, Utc};
use legaldata_core::{CorpusSnapshot, DocumentKind, DocumentRecord, LawSection, QuerySpec};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

pub const CASE_DATASETS: &[&str] = &["FC", "FCA", "SCC", "TCC", "RAD"];
pub const LAW_DATASETS: &[&str] = &["LEG", "REG"];

pub const VOCABULARY: &[&str] = &[
    "the",
    "applicant",
    "minister",
    "refugee",
    "réfugié",
    "appeal",
    "appel",
    "allowed",
    "dismissed",
    "judicial",
    "review",
    "immigration",
    "charter",
    "tax",
    "évaluation",
    "décision",
    "court",
    "tribunal",
    "officer",
    "credibility",
    "evidence",
    "preuve",
    "section",
    "regulation",
    "loi",
    "act",
    "canada",
    "québec",
    "fairness",
    "reasonable",
    "unreasonable",
    "standard",
    "costs",
    "dépens",
    "motion",
    "stay",
    "removal",
    "permanent",
    "résidence",
    "visa",
];

const LICENSES: &[&str] = &[
    "Reproduced under the Reproduction of Federal Law Order; not an official version",
    "Decisions of the Supreme Court of Canada may be reproduced free of charge with attribution",
    "Open Government Licence - Canada",
];

fn french_code(dataset: &str) -> &str {
    match dataset {
        "FC" => "CF",
        "FCA" => "CAF",
        "SCC" => "CSC",
        "TCC" => "CCI",
        other => other,
    }
}

pub fn random_words(rng: &mut impl Rng, min: usize, max: usize) -> String {
    let n = rng.random_range(min..=max);
    let mut words: Vec<String> = Vec::with_capacity(n);
    for i in 0..n {
        let mut w = (*VOCABULARY.choose(rng).expect("vocabulary")).to_owned();
        if rng.random_bool(0.1) {
            w = w.to_uppercase();
        }
        if i + 1 < n && rng.random_bool(0.1) {
            w.push(*[',', '.', ';'].choose(rng).expect("punctuation"));
        }
        words.push(w);
    }
    words.join(" ")
}

fn random_timestamp(rng: &mut impl Rng) -> DateTime<Utc> {
    let base = Utc.with_ymd_and_hms(2000, 1, 1, 0, 0, 0).unwrap();
    base + Duration::seconds(rng.random_range(0..30 * 365 * 86_400))
        + Duration::nanoseconds(rng.random_range(0..1_000_000_000))
}

fn random_date(rng: &mut impl Rng) -> NaiveDate {
    NaiveDate::from_ymd_opt(2001, 1, 1).unwrap() + Duration::days(rng.random_range(0..25 * 365))
}

fn random_sections(rng: &mut impl Rng) -> Vec<LawSection> {
    let n = rng.random_range(0..=4);
    (0..n)
        .map(|i| LawSection {
            label: if rng.random_bool(0.3) { format!("{}(1)", i + 1) } else { (i + 1).to_string() },
            heading: rng.random_bool(0.5).then(|| random_words(rng, 1, 3)),
            text: random_words(rng, 1, 12),
        })
        .collect()
}

/// A valid record for `dataset`; `ordinal` makes its citations unique.
pub fn random_record(rng: &mut impl Rng, dataset: &str, ordinal: usize) -> DocumentRecord {
    let kind = if LAW_DATASETS.contains(&dataset) { DocumentKind::Law } else { DocumentKind::Case };
    let mut r = DocumentRecord::new(dataset, kind, *LICENSES.choose(rng).expect("licenses"));
    let date = rng.random_bool(0.92).then(|| random_date(rng));
    let year = date.map_or(2000, |d| chrono::Datelike::year(&d));

    // 0: English only, 1: French only, 2: both.
    let shape = rng.random_range(0..10);
    let (en, fr) = match shape {
        0..=4 => (true, false),
        5 => (false, true),
        _ => (true, true),
    };
    if en {
        r.citation_en = Some(format!("{year} {dataset} {ordinal}"));
        r.name_en = rng.random_bool(0.9).then(|| format!("{} v. {}", random_words(rng, 1, 2), random_words(rng, 1, 2)));
        r.document_date_en = date;
        r.url_en = Some(format!("https://example.org/{dataset}/en/{ordinal}"));
        r.scraped_timestamp_en = Some(random_timestamp(rng));
        r.unofficial_text_en = Some(random_words(rng, 1, 60));
        if rng.random_bool(0.3) {
            r.citation2_en = Some(format!("IMM-{}-{:02}", rng.random_range(1..9999), year % 100));
        }
    }
    if fr {
        r.citation_fr = Some(format!("{year} {} {ordinal}", french_code(dataset)));
        r.name_fr = rng.random_bool(0.8).then(|| format!("{} c. {}", random_words(rng, 1, 2), random_words(rng, 1, 2)));
        r.document_date_fr = date;
        // Occasionally only metadata exists in the second language.
        if !en || rng.random_bool(0.8) {
            r.url_fr = Some(format!("https://example.org/{dataset}/fr/{ordinal}"));
            r.scraped_timestamp_fr = Some(random_timestamp(rng));
            r.unofficial_text_fr = Some(random_words(rng, 1, 60));
        }
    }
    if kind == DocumentKind::Law {
        if r.unofficial_text_en.is_some() {
            r.unofficial_sections_en = Some(random_sections(rng));
        }
        if r.unofficial_text_fr.is_some() {
            r.unofficial_sections_fr = Some(random_sections(rng));
        }
    }
    r
}

pub fn random_corpus(seed: u64, docs: usize) -> CorpusSnapshot {
    let mut rng = StdRng::seed_from_u64(seed);
    let datasets: Vec<&str> = CASE_DATASETS.iter().chain(LAW_DATASETS).copied().collect();
    let records: Vec<DocumentRecord> = (0..docs)
        .map(|i| {
            let dataset = *datasets.choose(&mut rng).expect("datasets");
            random_record(&mut rng, dataset, i + 1)
        })
        .collect();
    CorpusSnapshot::new(rng.random_range(0..1000), records).expect("generated keys are unique")
}

/// Random valid corpora of up to `max_docs` records.
pub fn arb_corpus(max_docs: usize) -> impl Strategy<Value = CorpusSnapshot> {
    (any::<u64>(), 0..=max_docs).prop_map(|(seed, n)| random_corpus(seed, n))
}

/// Seven hand-written documents: five decisions (three mention refugees)
/// and two laws with labelled sections.
///
/// | dataset | citation | date |
/// |---|---|---|
/// | FC | 2024 FC 12 | 2024-01-10 |
/// | FC | 2025 FC 1449 | 2025-08-05 |
/// | FC | 2025 FC 1450 | 2025-08-06 |
/// | SCC | 2024 SCC 3 | 2024-02-02 |
/// | TCC | 2023 TCC 45 | 2023-06-30 |
/// | LEG | I-2.5 | 2025-06-20 |
/// | REG | SOR/2002-227 | 2025-07-01 |
pub fn fixture_corpus() -> CorpusSnapshot {
    use legaldata_core::testing::{case, law};
    let records = vec![
        case("FC", "2024 FC 12", "2024-01-10", "The applicant challenges a decision of the Minister of National Revenue. The application is dismissed."),
        case(
            "FC",
            "2025 FC 1449",
            "2025-08-05",
            "PRESENT: The Honourable Mr. Justice Ahmed. The applicant, a refugee claimant from Colombia, seeks judicial \
             review of a decision of the Refugee Appeal Division. The application is allowed.",
        ),
        case(
            "FC",
            "2025 FC 1450",
            "2025-08-06",
            "PRESENT: The Honourable Mr. Justice Gascon. The Refugee Protection Division found the claimant not credible. \
             The application for judicial review is dismissed.",
        ),
        case("SCC", "2024 SCC 3", "2024-02-02", "Article 1F of the Refugee Convention excludes persons who committed serious crimes. The appeal is allowed."),
        case("TCC", "2023 TCC 45", "2023-06-30", "This income tax appeal concerns the deductibility of interest expenses. The appeal is dismissed."),
        law(
            "LEG",
            "I-2.5",
            "2025-06-20",
            &[
                ("1", "This Act may be cited as the Immigration and Refugee Protection Act."),
                ("2(1)", "The definitions in this subsection apply in this Act. foreign national means a person who is not a Canadian citizen or a permanent resident."),
            ],
        ),
        law(
            "REG",
            "SOR/2002-227",
            "2025-07-01",
            &[
                ("1", "The definitions in this section apply in these Regulations."),
                ("2", "A foreign national who seeks to enter Canada must hold a visa."),
            ],
        ),
    ];
    CorpusSnapshot::new(1, records).expect("fixture keys are unique")
}

/// A random valid query drawing citations, names and dates from `snapshot`.
pub fn random_query(rng: &mut impl Rng, snapshot: &CorpusSnapshot) -> QuerySpec {
    let records: Vec<&DocumentRecord> = snapshot.records().collect();
    let pick = |rng: &mut StdRng| records.choose(rng).copied();
    let mut local = StdRng::seed_from_u64(rng.random());
    let rng = &mut local;
    loop {
        let mut q = QuerySpec::default();
        if rng.random_bool(0.6) {
            q.text = Some(random_words(rng, 1, 2));
        }
        if rng.random_bool(0.15) {
            q.citation = match pick(rng) {
                Some(r) if rng.random_bool(0.8) => {
                    let c = r.citation_fr.clone().filter(|_| rng.random_bool(0.3)).or(r.citation_en.clone());
                    c.or(r.citation_fr.clone())
                }
                _ => Some("1999 ZZ 1".to_owned()),
            };
        }
        if rng.random_bool(0.15) {
            q.name = Some((*VOCABULARY.choose(rng).expect("vocabulary")).to_owned());
        }
        if rng.random_bool(0.3) {
            let (a, b) = (random_date(rng), random_date(rng));
            let (from, to) = if a <= b { (a, b) } else { (b, a) };
            match rng.random_range(0..3) {
                0 => q.date_from = Some(from),
                1 => q.date_to = Some(to),
                _ => (q.date_from, q.date_to) = (Some(from), Some(to)),
            }
        }
        if rng.random_bool(0.3) {
            let all: Vec<&str> = CASE_DATASETS.iter().chain(LAW_DATASETS).copied().collect();
            let n = rng.random_range(1..=3);
            q.datasets = all.choose_multiple(rng, n).map(|d| (*d).to_owned()).collect();
        }
        if rng.random_bool(0.3) {
            q.kind = Some(if rng.random_bool(0.7) { DocumentKind::Case } else { DocumentKind::Law });
        }
        q.page_size = rng.random_range(1..=50);
        if q.validate().is_ok() {
            return q;
        }
    }
}
