//! Podcast script rendered from a digest memorandum.

use std::fmt::Write as _;

use super::digest::{DigestMemo, Outcome};
use crate::report::group_thousands;

const ORDINALS: &[&str] =
    &["First", "Second", "Third", "Fourth", "Fifth", "Sixth", "Seventh", "Eighth", "Ninth", "Tenth"];

/// Byte offsets where `needle` occurs with no alphanumeric character directly
/// on either side.
fn bounded_matches(haystack: &str, needle: &str) -> Vec<usize> {
    if needle.is_empty() {
        return Vec::new();
    }
    haystack
        .match_indices(needle)
        .map(|(i, _)| i)
        .filter(|&i| {
            let before = haystack[..i].chars().next_back();
            let after = haystack[i + needle.len()..].chars().next();
            !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
        })
        .collect()
}

/// Replaces every bounded occurrence of any memo citation in free text, so
/// the only place a citation is spoken is its own segment heading.
fn scrub(text: &str, citations: &[&str]) -> String {
    let mut out = text.to_owned();
    for c in citations {
        for i in bounded_matches(&out, c).into_iter().rev() {
            out.replace_range(i..i + c.len(), "this decision");
        }
    }
    out
}

/// Renders the memo as a spoken script: an intro with the period and totals,
/// one segment per case summary naming its citation exactly once, and an outro.
pub fn digest_to_script(memo: &DigestMemo) -> String {
    let citations: Vec<&str> = memo.summaries.iter().map(|s| s.citation.as_str()).collect();
    let mut out = String::new();

    let _ = writeln!(out, "[INTRO]");
    let _ = writeln!(
        out,
        "Welcome to the weekly {} digest for {}, covering {} to {}.",
        memo.dataset,
        memo.period,
        memo.period.monday(),
        memo.period.sunday()
    );
    if memo.summaries.is_empty() {
        let _ = writeln!(out, "There were no decisions this week.");
    } else {
        let _ = writeln!(
            out,
            "This week the court released {} decision{} totalling {} words, and {} {} allowed.",
            memo.totals.decisions,
            if memo.totals.decisions == 1 { "" } else { "s" },
            group_thousands(memo.totals.words),
            memo.totals.allowed,
            if memo.totals.allowed == 1 { "was" } else { "were" },
        );
        let _ = writeln!(out, "Key themes. {}", scrub(&memo.key_themes, &citations));
    }

    for (i, s) in memo.summaries.iter().enumerate() {
        let _ = writeln!(out, "\n[SEGMENT {}]", i + 1);
        let lead = ORDINALS.get(i).map_or_else(|| format!("Case {}", i + 1), |o| (*o).to_owned());
        let _ = write!(out, "{lead}, {}.", s.citation);
        if let Some(name) = &s.name {
            let _ = write!(out, " {}.", scrub(name.trim_end_matches('.'), &citations));
        }
        if let Some(judge) = &s.judge {
            let _ = write!(out, " Decided by Justice {judge}.");
        }
        let outcome = match s.outcome {
            Outcome::Allowed => "The application was allowed.",
            Outcome::Dismissed => "The application was dismissed.",
            Outcome::Other => "The outcome was neither a grant nor a dismissal.",
        };
        let _ = writeln!(out, " Category: {}. {outcome}", s.category);
        if !s.facts.is_empty() {
            let _ = writeln!(out, "The facts: {}", scrub(&s.facts, &citations));
        }
        if !s.errors.is_empty() {
            let _ = writeln!(out, "On error: {}", scrub(&s.errors, &citations));
        }
    }

    let _ = writeln!(out, "\n[OUTRO]");
    let _ = writeln!(
        out,
        "That's the digest for {}. These summaries are generated from unofficial texts; read the full decisions before relying on them.",
        memo.period
    );
    out
}
