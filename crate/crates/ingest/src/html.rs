//! Markup checks and text extraction for fetched HTML.

use scraper::{ElementRef, Html, Node};

use crate::IngestError;

/// Rejects input the tolerant HTML parser would silently accept but that
/// cannot be a complete page: NUL bytes, no markup at all, and a tag or
/// comment still open at end of input.
pub fn check_markup(what: &str, content: &str) -> Result<(), IngestError> {
    let err = |offset: usize, message: &str| IngestError::Parse {
        what: what.to_owned(),
        offset: Some(offset),
        message: message.to_owned(),
    };
    if content.trim().is_empty() {
        return Err(err(0, "empty document"));
    }
    if let Some(i) = content.bytes().position(|b| b == 0) {
        return Err(err(i, "NUL byte in markup"));
    }
    let bytes = content.as_bytes();
    let mut saw_tag = false;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'<' {
            i += 1;
            continue;
        }
        if content[i..].starts_with("<!--") {
            match content[i + 4..].find("-->") {
                Some(end) => i += 4 + end + 3,
                None => return Err(err(i, "unterminated comment")),
            }
            continue;
        }
        let opens_tag = bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphabetic() || matches!(b, b'/' | b'!' | b'?'));
        if !opens_tag {
            i += 1;
            continue;
        }
        saw_tag = true;
        let mut quote = None;
        let mut j = i + 1;
        loop {
            let Some(&b) = bytes.get(j) else {
                return Err(err(i, "unterminated tag"));
            };
            match (quote, b) {
                (None, b'"' | b'\'') => quote = Some(b),
                (Some(q), b) if b == q => quote = None,
                (None, b'>') => break,
                _ => {}
            }
            j += 1;
        }
        i = j + 1;
    }
    if !saw_tag {
        return Err(err(0, "no markup found"));
    }
    Ok(())
}

const SKIPPED: &[&str] = &["script", "style", "noscript", "template", "head", "nav", "header", "footer"];
const BLOCKS: &[&str] = &[
    "p",
    "div",
    "br",
    "li",
    "tr",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "section",
    "article",
    "blockquote",
    "pre",
    "table",
    "ul",
    "ol",
    "dd",
    "dt",
    "hr",
];

fn walk(el: ElementRef<'_>, out: &mut String) {
    for child in el.children() {
        match child.value() {
            Node::Text(t) => out.extend(t.chars().map(|c| if c.is_whitespace() { ' ' } else { c })),
            Node::Element(e) => {
                let name = e.name();
                if SKIPPED.contains(&name) {
                    continue;
                }
                let block = BLOCKS.contains(&name);
                if block {
                    out.push('\n');
                }
                if let Some(child) = ElementRef::wrap(child) {
                    walk(child, out);
                }
                if block {
                    out.push('\n');
                }
            }
            _ => {}
        }
    }
}

/// Visible text of a page: one line per block element, runs of spaces
/// collapsed, blank lines dropped.
pub fn html_to_text(html: &str) -> String {
    let doc = Html::parse_document(html);
    let body = scraper::Selector::parse("body").expect("static selector");
    let root = doc.select(&body).next().unwrap_or_else(|| doc.root_element());
    let mut raw = String::new();
    walk(root, &mut raw);
    raw.lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}
