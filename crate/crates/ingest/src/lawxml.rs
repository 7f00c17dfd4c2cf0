//! Consolidated federal statutes and regulations in the Justice Laws XML
//! format.
//!
//! ```text
//! <Statute xml:lang="en" lims:current-date="2025-06-20">
//!   <Identification>
//!     <LongTitle>…</LongTitle> <ShortTitle>…</ShortTitle>
//!     <Chapter><ConsolidatedNumber>I-2.5</ConsolidatedNumber>
//!       <AnnualStatuteId><YYYY>2001</YYYY><AnnualStatuteNumber>27</AnnualStatuteNumber></AnnualStatuteId>
//!     </Chapter>
//!   </Identification>
//!   <Body>
//!     <Section><MarginalNote>…</MarginalNote><Label>2</Label>
//!       <Subsection><Label>(1)</Label><Text>…</Text></Subsection>
//!     </Section>
//!   </Body>
//! </Statute>
//! ```
//!
//! Regulations use `<Regulation>` and `<InstrumentNumber>`. One
//! [`LawSection`] is produced per `<Section>`, labelled with its own
//! `<Label>`; subsection, paragraph and definition text is folded into it in
//! document order. Historical notes are dropped.

use chrono::{DateTime, NaiveDate, Utc};
use legaldata_core::{DocumentKind, DocumentRecord, Language, LawSection, SourceDescriptor};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::IngestError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedLaw {
    pub language: Language,
    /// Consolidated number (statutes) or instrument number (regulations).
    pub citation: String,
    /// Annual statute citation, e.g. `S.C. 2001, c. 27`, when present.
    pub citation2: Option<String>,
    pub name: Option<String>,
    pub date: Option<NaiveDate>,
    pub text: String,
    pub sections: Vec<LawSection>,
    pub warnings: Vec<String>,
}

impl ParsedLaw {
    pub fn into_record(self, source: &SourceDescriptor, url: &str, retrieved_at: DateTime<Utc>) -> DocumentRecord {
        let mut r = DocumentRecord::new(source.dataset.clone(), DocumentKind::Law, source.license_text.clone());
        let f = r.fields_mut(self.language);
        *f.citation = Some(self.citation);
        *f.citation2 = self.citation2;
        *f.name = self.name;
        *f.document_date = self.date;
        *f.url = Some(url.to_owned());
        *f.scraped_timestamp = Some(retrieved_at);
        *f.unofficial_text = Some(self.text);
        *f.unofficial_sections = Some(self.sections);
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    ShortTitle,
    LongTitle,
    ConsolidatedNumber,
    InstrumentNumber,
    Year,
    ChapterNumber,
    SectionLabel,
    SectionHeading,
    Chunk,
}

#[derive(Default)]
struct SectionBuilder {
    label: Option<String>,
    heading: Option<String>,
    chunks: Vec<String>,
}

#[derive(Default)]
struct Collected {
    short_title: Option<String>,
    long_title: Option<String>,
    consolidated: Option<String>,
    instrument: Option<String>,
    year: Option<String>,
    chapter: Option<String>,
    sections: Vec<LawSection>,
    loose_chunks: Vec<String>,
}

fn squash(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn attr(e: &BytesStart<'_>, name: &str) -> Option<String> {
    e.attributes()
        .flatten()
        .find(|a| a.key.0 == name)
        .and_then(|a| a.normalized_value(quick_xml::XmlVersion::Implicit1_0).ok().map(|v| v.into_owned()))
}

fn parse_error(offset: u64, message: impl std::fmt::Display) -> IngestError {
    IngestError::Parse { what: "law XML".into(), offset: Some(offset as usize), message: message.to_string() }
}

pub fn parse_law_xml(xml: &str, source: &SourceDescriptor) -> Result<ParsedLaw, IngestError> {
    if source.kind != DocumentKind::Law {
        return Err(IngestError::Config(format!("source {} does not hold laws", source.dataset)));
    }
    let mut reader = Reader::from_str(xml);
    let mut stack: Vec<String> = Vec::new();
    let mut language = source.language;
    let mut date = None;
    let mut c = Collected::default();
    let mut section: Option<SectionBuilder> = None;
    // (depth at which capture started, target, text so far)
    let mut capture: Option<(usize, Target, String)> = None;
    let mut skip_depth: Option<usize> = None;
    let mut saw_root = false;

    loop {
        let pos = reader.buffer_position();
        let event = reader.read_event().map_err(|e| parse_error(reader.error_position(), e))?;
        match event {
            Event::Start(e) => {
                let name = e.name().0.to_owned();
                if stack.is_empty() {
                    saw_root = true;
                    if !matches!(name.as_str(), "Statute" | "Regulation") {
                        return Err(parse_error(
                            pos,
                            format!("root element <{name}> is not <Statute> or <Regulation>"),
                        ));
                    }
                    match attr(&e, "xml:lang").as_deref() {
                        Some("fr") => language = Language::Fr,
                        Some("en") => language = Language::En,
                        _ => {}
                    }
                    date = attr(&e, "lims:current-date")
                        .or_else(|| attr(&e, "lims:lastAmendedDate"))
                        .and_then(|d| NaiveDate::parse_from_str(&d, "%Y-%m-%d").ok());
                }
                let parent = stack.last().cloned();
                stack.push(name.clone());
                let depth = stack.len();
                if skip_depth.is_some() || capture.is_some() {
                    continue;
                }
                if matches!(name.as_str(), "HistoricalNote" | "Footnote") {
                    skip_depth = Some(depth);
                    continue;
                }
                if name == "Section" && stack.iter().any(|n| n == "Body") {
                    section = Some(SectionBuilder::default());
                    continue;
                }
                let in_ident = stack.iter().any(|n| n == "Identification");
                let target = match (name.as_str(), parent.as_deref()) {
                    ("ShortTitle", _) if in_ident => Some(Target::ShortTitle),
                    ("LongTitle", _) if in_ident => Some(Target::LongTitle),
                    ("ConsolidatedNumber", _) if in_ident => Some(Target::ConsolidatedNumber),
                    ("InstrumentNumber", _) if in_ident => Some(Target::InstrumentNumber),
                    ("YYYY", Some("AnnualStatuteId")) => Some(Target::Year),
                    ("AnnualStatuteNumber", _) => Some(Target::ChapterNumber),
                    ("Label", Some("Section")) if section.is_some() => Some(Target::SectionLabel),
                    ("MarginalNote", Some("Section")) if section.is_some() => Some(Target::SectionHeading),
                    ("MarginalNote", _) => {
                        skip_depth = Some(depth);
                        None
                    }
                    ("Label" | "Text", _) if stack.iter().any(|n| n == "Body") => Some(Target::Chunk),
                    _ => None,
                };
                if let Some(t) = target {
                    capture = Some((depth, t, String::new()));
                }
            }
            Event::End(e) => {
                let name = e.name().0.to_owned();
                let depth = stack.len();
                if stack.pop().as_deref() != Some(name.as_str()) {
                    return Err(parse_error(pos, format!("unexpected </{name}>")));
                }
                if skip_depth == Some(depth) {
                    skip_depth = None;
                    continue;
                }
                if let Some((d, target, text)) = capture.take_if(|(d, _, _)| *d == depth) {
                    debug_assert_eq!(d, depth);
                    let text = squash(&text);
                    match target {
                        Target::ShortTitle => c.short_title = Some(text),
                        Target::LongTitle => c.long_title = Some(text),
                        Target::ConsolidatedNumber => c.consolidated = Some(text),
                        Target::InstrumentNumber => c.instrument = Some(text),
                        Target::Year => c.year = Some(text),
                        Target::ChapterNumber => c.chapter = Some(text),
                        Target::SectionLabel => section.as_mut().expect("inside section").label = Some(text),
                        Target::SectionHeading => section.as_mut().expect("inside section").heading = Some(text),
                        Target::Chunk if !text.is_empty() => match section.as_mut() {
                            Some(s) => s.chunks.push(text),
                            None => c.loose_chunks.push(text),
                        },
                        Target::Chunk => {}
                    }
                    continue;
                }
                if name == "Section" && capture.is_none() && skip_depth.is_none() {
                    if let Some(s) = section.take() {
                        let index = c.sections.len() + 1;
                        c.sections.push(LawSection {
                            label: s.label.filter(|l| !l.is_empty()).unwrap_or_else(|| format!("#{index}")),
                            heading: s.heading.filter(|h| !h.is_empty()),
                            text: s.chunks.join(" "),
                        });
                    }
                }
            }
            Event::Text(t) => {
                if let (Some((_, _, buf)), None) = (capture.as_mut(), skip_depth) {
                    buf.push_str(&t.xml10_content());
                }
            }
            Event::CData(t) => {
                if let (Some((_, _, buf)), None) = (capture.as_mut(), skip_depth) {
                    buf.push_str(&t.xml10_content());
                }
            }
            Event::GeneralRef(r) => {
                if let (Some((_, _, buf)), None) = (capture.as_mut(), skip_depth) {
                    if let Some(ch) = r.resolve_char_ref().map_err(|e| parse_error(pos, e))? {
                        buf.push(ch);
                    } else if let Some(s) = quick_xml::escape::resolve_predefined_entity(&r) {
                        buf.push_str(s);
                    } else {
                        return Err(parse_error(pos, format!("unknown entity &{};", &*r)));
                    }
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !saw_root {
        return Err(parse_error(0, "no root element"));
    }
    if let Some(open) = stack.last() {
        return Err(parse_error(xml.len() as u64, format!("document ends inside <{open}>")));
    }

    let citation = c
        .instrument
        .clone()
        .or(c.consolidated.clone())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| parse_error(0, "no ConsolidatedNumber or InstrumentNumber in Identification"))?;
    let citation2 = match (&c.year, &c.chapter) {
        (Some(y), Some(n)) => Some(match language {
            Language::En => format!("S.C. {y}, c. {n}"),
            Language::Fr => format!("L.C. {y}, ch. {n}"),
        }),
        _ => None,
    };
    let mut warnings = Vec::new();
    let text = if c.sections.is_empty() {
        warnings.push(format!("{citation}: no sections found"));
        c.loose_chunks.join("\n\n")
    } else {
        c.sections.iter().map(|s| format!("{} {}", s.label, s.text)).collect::<Vec<_>>().join("\n\n")
    };
    Ok(ParsedLaw {
        language,
        citation,
        citation2,
        name: c.short_title.or(c.long_title).filter(|n| !n.is_empty()),
        date,
        text,
        sections: c.sections,
        warnings,
    })
}
