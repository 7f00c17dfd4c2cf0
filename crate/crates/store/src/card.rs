//! Dataset card: a README with YAML front matter that dataset hubs read to
//! find the two configurations and their files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use legaldata_core::{coverage_stats, CorpusSnapshot, DocumentKind, ScanFilter, Tokenizer};

use crate::parquet::ExportedFile;

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|").replace(['\n', '\r'], " ")
}

/// Renders the card. The output depends only on its inputs.
pub fn render_card(snapshot: &CorpusSnapshot, tokenizer: &Tokenizer, files: &[ExportedFile]) -> String {
    let mut out = String::new();
    out.push_str("---\nlicense: other\npretty_name: Canadian legal data\nlanguage:\n- en\n- fr\nconfigs:\n");
    for kind in [DocumentKind::Case, DocumentKind::Law] {
        let _ = writeln!(out, "- config_name: {0}\n  data_files: \"{0}/*.parquet\"", kind.collection());
    }
    out.push_str("---\n\n# Canadian legal data\n\n");
    let _ = writeln!(
        out,
        "Court decisions and legislation in English and French, snapshot version {}, {} documents.",
        snapshot.version(),
        snapshot.len()
    );
    out.push_str(
        "\nTexts are unofficial copies. Each row carries the reuse terms of the body that published it in \
         `upstream_license`; check them before reuse.\n",
    );

    out.push_str("\n## Files\n\n| config | file | rows |\n|---|---|---:|\n");
    for f in files {
        let _ = writeln!(out, "| {} | {} | {} |", f.kind.collection(), f.path, f.rows);
    }

    for kind in [DocumentKind::Case, DocumentKind::Law] {
        let report = coverage_stats(&snapshot.restricted(&ScanFilter::kind(kind)), tokenizer);
        let _ = writeln!(out, "\n## Coverage: {}\n", kind.collection());
        if report.rows.is_empty() {
            out.push_str("No documents.\n");
            continue;
        }
        out.push_str("| Dataset | Earliest | Latest | Documents | Token Count |\n|---|---|---|---:|---:|\n");
        let date = |d: Option<chrono::NaiveDate>| d.map(|d| d.to_string()).unwrap_or_default();
        for r in &report.rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                r.dataset,
                date(r.earliest),
                date(r.latest),
                r.documents,
                r.tokens
            );
        }
        let _ = writeln!(out, "| TOTAL | | | {} | {} |", report.totals.documents, report.totals.tokens);
    }
    let _ = writeln!(out, "\nToken counts use the `{}` tokenizer.", tokenizer.describe());

    let mut licenses: BTreeMap<&str, usize> = BTreeMap::new();
    for r in snapshot.records() {
        *licenses.entry(r.upstream_license.as_str()).or_default() += 1;
    }
    out.push_str("\n## Licenses\n\n");
    if licenses.is_empty() {
        out.push_str("No documents.\n");
    } else {
        out.push_str("| upstream license | documents |\n|---|---:|\n");
        for (license, n) in licenses {
            let _ = writeln!(out, "| {} | {} |", md_escape(license), n);
        }
    }
    out
}
