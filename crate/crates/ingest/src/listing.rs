//! Decision listing pages, read through a source's selector rules.

use chrono::NaiveDate;
use legaldata_core::{ChannelKind, SelectorConfig, SourceDescriptor};
use scraper::{ElementRef, Html, Selector};

use crate::html::check_markup;
use crate::{DocumentStub, IngestError};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Listing {
    pub stubs: Vec<DocumentStub>,
    /// One note per row that could not become a stub.
    pub skipped: Vec<String>,
}

fn selector(field: &str, css: &str) -> Result<Selector, IngestError> {
    Selector::parse(css).map_err(|e| IngestError::Config(format!("selector `{field}` = `{css}`: {e}")))
}

fn cell_text(el: ElementRef<'_>) -> String {
    el.text().collect::<Vec<_>>().join(" ").split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses a date cell with the declared format, or ISO 8601 when none is
/// declared. No other formats are tried.
pub fn parse_date(cell: &str, format: Option<&str>) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(cell.trim(), format.unwrap_or("%Y-%m-%d")).ok()
}

struct Compiled {
    row: Selector,
    citation: Selector,
    name: Option<Selector>,
    date: Option<Selector>,
    link: Selector,
}

impl Compiled {
    fn new(c: &SelectorConfig) -> Result<Self, IngestError> {
        Ok(Compiled {
            row: selector("row", &c.row)?,
            citation: selector("citation", &c.citation)?,
            name: c.name.as_deref().map(|s| selector("name", s)).transpose()?,
            date: c.date.as_deref().map(|s| selector("date", s)).transpose()?,
            link: selector("link", &c.link)?,
        })
    }
}

/// One stub per row yielding a citation and a link. Relative links are
/// resolved against the source's listing URL.
pub fn parse_listing(content: &str, source: &SourceDescriptor) -> Result<Listing, IngestError> {
    if source.channel != ChannelKind::ListingScrape {
        return Err(IngestError::Config(format!("source {} is not a listing-scrape source", source.dataset)));
    }
    let config = source
        .selectors
        .as_ref()
        .ok_or_else(|| IngestError::Config(format!("source {} has no selectors", source.dataset)))?;
    let sel = Compiled::new(config)?;
    check_markup("listing page", content)?;
    let base = source.listing_url.as_deref().and_then(|u| url::Url::parse(u).ok());

    let doc = Html::parse_document(content);
    let mut out = Listing::default();
    for (i, row) in doc.select(&sel.row).enumerate() {
        let n = i + 1;
        let citation = row.select(&sel.citation).next().map(cell_text).filter(|c| !c.is_empty());
        let Some(citation) = citation else {
            out.skipped.push(format!("row {n}: no citation"));
            continue;
        };
        let href = row
            .select(&sel.link)
            .next()
            .and_then(|a| a.value().attr(&config.link_attr))
            .map(str::trim)
            .filter(|h| !h.is_empty());
        let Some(href) = href else {
            out.skipped.push(format!("row {n} ({citation}): no link"));
            continue;
        };
        let fetch_url = match &base {
            Some(base) => match base.join(href) {
                Ok(u) => u.to_string(),
                Err(e) => {
                    out.skipped.push(format!("row {n} ({citation}): bad link `{href}`: {e}"));
                    continue;
                }
            },
            None => href.to_owned(),
        };
        let date = match sel.date.as_ref().and_then(|s| row.select(s).next()).map(cell_text) {
            None => None,
            Some(cell) if cell.is_empty() => None,
            Some(cell) => match parse_date(&cell, config.date_format.as_deref()) {
                Some(d) => Some(d),
                None => {
                    out.skipped.push(format!("row {n} ({citation}): unparseable date `{cell}`"));
                    continue;
                }
            },
        };
        let name = sel.name.as_ref().and_then(|s| row.select(s).next()).map(cell_text).filter(|s| !s.is_empty());
        out.stubs.push(DocumentStub {
            dataset: source.dataset.clone(),
            citation: Some(citation),
            name,
            date,
            fetch_url,
            language: source.language,
        });
    }
    Ok(out)
}
