//! Search parameters, shared by the HTTP API and the MCP search tools so
//! that both reach the search operation through the same mapping.

use chrono::NaiveDate;
use legaldata_core::{DocumentKind, QuerySpec};

pub const SEARCH_PARAMS: &[&str] =
    &["citation", "name", "text", "date_from", "date_to", "dataset", "page", "page_size"];

fn date(name: &str, value: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(value.trim(), "%Y-%m-%d")
        .map_err(|_| format!("{name} `{value}` is not a YYYY-MM-DD date"))
}

fn number(name: &str, value: &str) -> Result<u32, String> {
    value.trim().parse().map_err(|_| format!("{name} `{value}` is not a non-negative integer"))
}

/// Builds a validated query scoped to `kind` from name/value pairs.
///
/// `dataset` takes a comma-separated list of dataset codes. Unknown or
/// repeated parameters are rejected.
pub fn query_from_pairs(
    kind: DocumentKind,
    pairs: impl IntoIterator<Item = (String, String)>,
) -> Result<QuerySpec, String> {
    let mut q = QuerySpec { kind: Some(kind), ..Default::default() };
    let mut seen: Vec<String> = Vec::new();
    for (name, value) in pairs {
        if !SEARCH_PARAMS.contains(&name.as_str()) {
            return Err(format!("unknown parameter `{name}` (expected one of {})", SEARCH_PARAMS.join(", ")));
        }
        if seen.contains(&name) {
            return Err(format!("parameter `{name}` given more than once"));
        }
        seen.push(name.clone());
        match name.as_str() {
            "citation" => q.citation = Some(value),
            "name" => q.name = Some(value),
            "text" => q.text = Some(value),
            "date_from" => q.date_from = Some(date(&name, &value)?),
            "date_to" => q.date_to = Some(date(&name, &value)?),
            "dataset" => q.datasets = value.split(',').map(|d| d.trim().to_owned()).collect(),
            "page" => q.page = number(&name, &value)?,
            "page_size" => q.page_size = number(&name, &value)?,
            _ => unreachable!("checked against SEARCH_PARAMS"),
        }
    }
    q.validate().map_err(|e| e.to_string())?;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(list: &[(&str, &str)]) -> Vec<(String, String)> {
        list.iter().map(|(k, v)| ((*k).to_owned(), (*v).to_owned())).collect()
    }

    #[test]
    fn params_map_onto_the_query() {
        let q = query_from_pairs(
            DocumentKind::Case,
            pairs(&[
                ("text", "refugee claim"),
                ("dataset", "FC, FCA"),
                ("date_from", "2024-01-01"),
                ("page", "2"),
                ("page_size", "5"),
            ]),
        )
        .unwrap();
        assert_eq!(q.text.as_deref(), Some("refugee claim"));
        assert_eq!(q.datasets, vec!["FC", "FCA"]);
        assert_eq!(q.date_from, NaiveDate::from_ymd_opt(2024, 1, 1));
        assert_eq!((q.page, q.page_size, q.kind), (2, 5, Some(DocumentKind::Case)));
    }

    #[test]
    fn bad_params_are_rejected() {
        let err = |list: &[(&str, &str)]| query_from_pairs(DocumentKind::Case, pairs(list)).unwrap_err();
        assert!(err(&[]).contains("at least one"));
        assert!(err(&[("q", "x")]).contains("unknown parameter `q`"));
        assert!(err(&[("text", "a"), ("text", "b")]).contains("more than once"));
        assert!(err(&[("date_to", "05/08/2025")]).contains("YYYY-MM-DD"));
        assert!(err(&[("text", "x"), ("page", "-1")]).contains("page"));
        assert!(err(&[("text", "x"), ("page_size", "0")]).contains("page_size"));
        assert!(err(&[("dataset", "FC,,SCC")]).contains("blank"));
    }
}
