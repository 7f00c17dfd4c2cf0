//! Model Context Protocol server: JSON-RPC 2.0 messages, five read-only
//! tools, and the newline-delimited stdio transport. The HTTP transport in
//! `serve` shares [`McpServer::handle_text`].
//!
//! Long texts are cut at the server's truncation limit (characters per
//! response). A cut response says `"truncated": true` and carries a cursor;
//! calling the same tool again with that cursor returns the following
//! characters as `chunks`, until `cursor` comes back null.

use std::io::{self, BufRead, Write};
use std::str::FromStr;
use std::sync::Arc;

use chrono::NaiveDate;
use legaldata_core::{DocumentKind, DocumentRecord, Language, SearchPage};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::query::query_from_pairs;
use crate::{Served, ServiceState};

pub const PROTOCOL_VERSION: &str = "2025-06-18";
const SUPPORTED_VERSIONS: &[&str] = &["2025-06-18", "2025-03-26", "2024-11-05"];
pub const DEFAULT_TRUNCATION_LIMIT: usize = 20_000;

pub const PARSE_ERROR: i64 = -32700;
pub const INVALID_REQUEST: i64 = -32600;
pub const METHOD_NOT_FOUND: i64 = -32601;
pub const INVALID_PARAMS: i64 = -32602;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RpcError {
    pub code: i64,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

impl RpcError {
    fn new(code: i64, message: impl Into<String>) -> Self {
        RpcError { code, message: message.into(), data: None }
    }
}

#[derive(Debug, Clone, Copy)]
enum ParamType {
    String,
    Integer,
    Date,
    OneOf(&'static [&'static str]),
}

#[derive(Debug)]
struct Param {
    name: &'static str,
    ty: ParamType,
    required: bool,
    description: &'static str,
}

const fn param(name: &'static str, ty: ParamType, required: bool, description: &'static str) -> Param {
    Param { name, ty, required, description }
}

const SEARCH: &[Param] = &[
    param(
        "citation",
        ParamType::String,
        false,
        "Citation in either language, matched exactly after whitespace normalization",
    ),
    param(
        "name",
        ParamType::String,
        false,
        "Words that must all appear in the document name (style of cause or title)",
    ),
    param("text", ParamType::String, false, "Full-text terms, all required; case and accents are ignored"),
    param("date_from", ParamType::Date, false, "Earliest document date, inclusive (YYYY-MM-DD)"),
    param("date_to", ParamType::Date, false, "Latest document date, inclusive (YYYY-MM-DD)"),
    param("dataset", ParamType::String, false, "Comma-separated dataset codes, e.g. FC,FCA"),
    param("page", ParamType::Integer, false, "1-based page number (default 1)"),
    param("page_size", ParamType::Integer, false, "Hits per page, 1 to 200 (default 20)"),
];

const DOCUMENT: &[Param] = &[
    param("dataset", ParamType::String, true, "Dataset code, e.g. FC or LEG"),
    param("citation", ParamType::String, true, "Citation in either language"),
    param("cursor", ParamType::String, false, "Cursor from a truncated response, to fetch the following text"),
];

const SECTION: &[Param] = &[
    param("dataset", ParamType::String, true, "Dataset code of the statute or regulation, e.g. LEG"),
    param("citation", ParamType::String, true, "Citation of the statute or regulation, e.g. I-2.5"),
    param("label", ParamType::String, true, "Section label as printed, e.g. 2 or 18.1"),
    param("language", ParamType::OneOf(&["en", "fr"]), false, "Language version (default en)"),
    param("cursor", ParamType::String, false, "Cursor from a truncated response, to fetch the following text"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tool {
    SearchCases,
    SearchLaws,
    GetDocument,
    GetLawSection,
    CoverageStats,
}

const TOOLS: &[Tool] =
    &[Tool::SearchCases, Tool::SearchLaws, Tool::GetDocument, Tool::GetLawSection, Tool::CoverageStats];

impl Tool {
    fn name(self) -> &'static str {
        match self {
            Tool::SearchCases => "search_cases",
            Tool::SearchLaws => "search_laws",
            Tool::GetDocument => "get_document",
            Tool::GetLawSection => "get_law_section",
            Tool::CoverageStats => "coverage_stats",
        }
    }

    fn description(self) -> &'static str {
        match self {
            Tool::SearchCases => {
                "Search court and tribunal decisions by citation, name, full text, date range and dataset. \
                 At least one criterion is required. Returns one page of hits with snippets."
            }
            Tool::SearchLaws => {
                "Search federal statutes and regulations by citation, name, full text, date range and dataset. \
                 At least one criterion is required. Returns one page of hits with snippets."
            }
            Tool::GetDocument => {
                "Fetch one document with its metadata, full unofficial text and upstream license. \
                 Long texts are truncated; pass the returned cursor to continue."
            }
            Tool::GetLawSection => "Fetch the text of one section of a statute or regulation by its label.",
            Tool::CoverageStats => "Per-dataset coverage: earliest and latest dates, document and token counts.",
        }
    }

    fn params(self) -> &'static [Param] {
        match self {
            Tool::SearchCases | Tool::SearchLaws => SEARCH,
            Tool::GetDocument => DOCUMENT,
            Tool::GetLawSection => SECTION,
            Tool::CoverageStats => &[],
        }
    }

    fn output_schema(self) -> Value {
        let cursor = json!({ "type": ["string", "null"] });
        let chunks = json!({
            "type": "array",
            "items": { "type": "object", "properties": {
                "field": { "type": "string" }, "offset": { "type": "integer" }, "text": { "type": "string" } } }
        });
        match self {
            Tool::SearchCases | Tool::SearchLaws => json!({
                "type": "object",
                "properties": {
                    "hits": { "type": "array", "items": { "type": "object", "properties": {
                        "dataset": { "type": "string" }, "citation": { "type": "string" },
                        "name": { "type": ["string", "null"] }, "date": { "type": ["string", "null"] },
                        "snippet": { "type": "string" }, "score": { "type": "number" } } } },
                    "total": { "type": "integer" },
                    "page": { "type": "integer" },
                    "page_size": { "type": "integer" }
                }
            }),
            Tool::GetDocument => json!({
                "type": "object",
                "properties": {
                    "document": { "type": "object" },
                    "chunks": chunks,
                    "truncated": { "type": "boolean" },
                    "cursor": cursor,
                    "remaining_chars": { "type": "integer" }
                }
            }),
            Tool::GetLawSection => json!({
                "type": "object",
                "properties": {
                    "dataset": { "type": "string" }, "citation": { "type": "string" },
                    "language": { "type": "string" }, "label": { "type": "string" },
                    "heading": { "type": ["string", "null"] }, "text": { "type": "string" },
                    "chunks": chunks,
                    "truncated": { "type": "boolean" },
                    "cursor": cursor,
                    "remaining_chars": { "type": "integer" }
                }
            }),
            Tool::CoverageStats => json!({
                "type": "object",
                "properties": {
                    "rows": { "type": "array", "items": { "type": "object", "properties": {
                        "dataset": { "type": "string" }, "earliest": { "type": ["string", "null"] },
                        "latest": { "type": ["string", "null"] }, "documents": { "type": "integer" },
                        "tokens": { "type": "integer" } } } },
                    "totals": { "type": "object", "properties": {
                        "documents": { "type": "integer" }, "tokens": { "type": "integer" } } },
                    "tokenizer": { "type": "string" }
                }
            }),
        }
    }

    fn descriptor(self) -> ToolDescriptor {
        let mut properties = Map::new();
        for p in self.params() {
            let mut schema = match p.ty {
                ParamType::String => json!({ "type": "string" }),
                ParamType::Integer => json!({ "type": "integer", "minimum": 0 }),
                ParamType::Date => json!({ "type": "string", "format": "date" }),
                ParamType::OneOf(values) => json!({ "type": "string", "enum": values }),
            };
            schema["description"] = Value::from(p.description);
            properties.insert(p.name.to_owned(), schema);
        }
        let required: Vec<&str> = self.params().iter().filter(|p| p.required).map(|p| p.name).collect();
        ToolDescriptor {
            name: self.name().to_owned(),
            description: self.description().to_owned(),
            input_schema: json!({
                "type": "object",
                "properties": properties,
                "required": required,
                "additionalProperties": false
            }),
            output_schema: self.output_schema(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolDescriptor {
    pub name: String,
    pub description: String,
    #[serde(rename = "inputSchema")]
    pub input_schema: Value,
    #[serde(rename = "outputSchema")]
    pub output_schema: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToolResult {
    pub structured: Value,
    pub text: String,
    pub is_error: bool,
}

impl ToolResult {
    fn ok(structured: Value, text: String) -> Self {
        ToolResult { structured, text, is_error: false }
    }

    fn error(code: &str, message: impl Into<String>) -> Self {
        let message = message.into();
        ToolResult {
            structured: json!({ "error": { "code": code, "message": message } }),
            text: message,
            is_error: true,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "content": [{ "type": "text", "text": self.text }],
            "structuredContent": self.structured,
            "isError": self.is_error
        })
    }
}

/// Checks `args` against the tool's parameters. Returns the arguments as
/// name/text pairs in the order given.
fn check_args(tool: Tool, args: Option<&Value>) -> Result<Vec<(String, String)>, RpcError> {
    let empty = Map::new();
    let args = match args {
        None | Some(Value::Null) => &empty,
        Some(Value::Object(m)) => m,
        Some(_) => return Err(RpcError::new(INVALID_PARAMS, "arguments must be an object")),
    };
    let mut problems: Vec<(String, String)> = Vec::new();
    let mut out = Vec::new();
    for (name, value) in args {
        let Some(p) = tool.params().iter().find(|p| p.name == name) else {
            problems.push((name.clone(), "unknown parameter".into()));
            continue;
        };
        let text = match (p.ty, value) {
            (ParamType::Integer, Value::Number(n)) if n.as_u64().is_some_and(|n| n <= u32::MAX as u64) => {
                Ok(n.to_string())
            }
            (ParamType::Integer, _) => Err("expected a non-negative integer".to_owned()),
            (ParamType::Date, Value::String(s)) if NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok() => Ok(s.clone()),
            (ParamType::Date, _) => Err("expected a YYYY-MM-DD date".to_owned()),
            (ParamType::OneOf(values), Value::String(s)) if values.contains(&s.as_str()) => Ok(s.clone()),
            (ParamType::OneOf(values), _) => Err(format!("expected one of {}", values.join(", "))),
            (ParamType::String, Value::String(s)) => Ok(s.clone()),
            (ParamType::String, _) => Err("expected a string".to_owned()),
        };
        match text {
            Ok(t) => out.push((name.clone(), t)),
            Err(problem) => problems.push((name.clone(), problem)),
        }
    }
    for p in tool.params().iter().filter(|p| p.required) {
        if !args.contains_key(p.name) {
            problems.push((p.name.to_owned(), "required".into()));
        }
    }
    if problems.is_empty() {
        return Ok(out);
    }
    let message = problems.iter().map(|(f, p)| format!("{f}: {p}")).collect::<Vec<_>>().join("; ");
    let fields: Vec<Value> = problems.iter().map(|(f, p)| json!({ "field": f, "problem": p })).collect();
    Err(RpcError {
        code: INVALID_PARAMS,
        message: format!("invalid arguments for {}: {message}", tool.name()),
        data: Some(json!({ "fields": fields })),
    })
}

fn arg<'a>(args: &'a [(String, String)], name: &str) -> Option<&'a str> {
    args.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_str())
}

/// Text fields of a record in response order, skipping absent ones.
fn text_slots(r: &DocumentRecord) -> Vec<(String, &str)> {
    let mut out: Vec<(String, &str)> = Vec::new();
    if let Some(t) = &r.unofficial_text_en {
        out.push(("unofficial_text_en".into(), t));
    }
    if let Some(t) = &r.unofficial_text_fr {
        out.push(("unofficial_text_fr".into(), t));
    }
    for (lang, sections) in [("en", &r.unofficial_sections_en), ("fr", &r.unofficial_sections_fr)] {
        for (i, s) in sections.iter().flatten().enumerate() {
            out.push((format!("unofficial_sections_{lang}[{i}].text"), &s.text));
        }
    }
    out
}

fn text_slots_mut(r: &mut DocumentRecord) -> Vec<&mut String> {
    let mut out: Vec<&mut String> = Vec::new();
    out.extend(r.unofficial_text_en.as_mut());
    out.extend(r.unofficial_text_fr.as_mut());
    out.extend(r.unofficial_sections_en.iter_mut().flatten().map(|s| &mut s.text));
    out.extend(r.unofficial_sections_fr.iter_mut().flatten().map(|s| &mut s.text));
    out
}

fn byte_at(s: &str, chars: usize) -> usize {
    s.char_indices().nth(chars).map(|(i, _)| i).unwrap_or(s.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cursor {
    version: u64,
    slot: usize,
    offset: usize,
}

impl Cursor {
    fn render(self) -> String {
        format!("v{}.s{}.o{}", self.version, self.slot, self.offset)
    }

    fn parse(s: &str) -> Option<Cursor> {
        let mut parts = s.split('.');
        let mut next = |prefix: char| parts.next()?.strip_prefix(prefix)?.parse().ok();
        let c = Cursor { version: next('v')?, slot: next('s')? as usize, offset: next('o')? as usize };
        parts.next().is_none().then_some(c)
    }
}

struct Walk {
    chunks: Vec<Value>,
    cursor: Option<Cursor>,
    remaining: usize,
}

/// Reads up to `budget` characters of `slots[range]`, starting `offset`
/// characters into the first.
fn walk(slots: &[(String, &str)], range: std::ops::Range<usize>, offset: usize, budget: usize, version: u64) -> Walk {
    let mut w = Walk { chunks: Vec::new(), cursor: None, remaining: 0 };
    let mut budget = budget;
    let first = range.start;
    for i in range {
        let (field, text) = &slots[i];
        let start = if i == first { offset } else { 0 };
        let len = text.chars().count().saturating_sub(start);
        if w.cursor.is_some() {
            w.remaining += len;
            continue;
        }
        let take = len.min(budget);
        if take > 0 {
            let from = byte_at(text, start);
            let to = from + byte_at(&text[from..], take);
            w.chunks.push(json!({ "field": field, "offset": start, "text": &text[from..to] }));
        }
        budget -= take;
        if take < len {
            w.cursor = Some(Cursor { version, slot: i, offset: start + take });
            w.remaining += len - take;
        }
    }
    w
}

fn tool_from_name(name: &str) -> Option<Tool> {
    TOOLS.iter().copied().find(|t| t.name() == name)
}

fn render_search(page: &SearchPage, collection: &str) -> String {
    let pages = page.total.div_ceil(page.page_size.max(1) as usize).max(1);
    let mut out =
        format!("{} {collection} found; page {} of {pages}, {} shown", page.total, page.page, page.hits.len());
    let first = (page.page.saturating_sub(1) as usize) * page.page_size as usize;
    for (i, h) in page.hits.iter().enumerate() {
        let date = h.date.map(|d| d.to_string()).unwrap_or_else(|| "undated".into());
        out.push_str(&format!(
            "\n{}. {} | {} | {date}",
            first + i + 1,
            h.citation,
            h.name.as_deref().unwrap_or("(no name)")
        ));
        if !h.snippet.is_empty() {
            out.push_str(&format!("\n   {}", h.snippet));
        }
    }
    out
}

fn truncation_note(tool: Tool, w: &Walk) -> String {
    match w.cursor {
        Some(c) => format!(
            "\n[truncated: {} more characters; call {} again with cursor \"{}\"]",
            w.remaining,
            tool.name(),
            c.render()
        ),
        None => String::new(),
    }
}

fn continuation(tool: Tool, dataset: &str, citation: &str, w: Walk) -> ToolResult {
    let mut text = String::new();
    for c in &w.chunks {
        text.push_str(&format!(
            "--- {} from character {} ---\n{}\n",
            c["field"].as_str().unwrap_or(""),
            c["offset"],
            c["text"].as_str().unwrap_or("")
        ));
    }
    text.push_str(&truncation_note(tool, &w));
    ToolResult::ok(
        json!({
            "dataset": dataset,
            "citation": citation,
            "chunks": w.chunks,
            "truncated": w.cursor.is_some(),
            "cursor": w.cursor.map(Cursor::render),
            "remaining_chars": w.remaining,
        }),
        text.trim_end().to_owned(),
    )
}

/// One client connection.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Session {
    pub protocol_version: Option<String>,
    pub initialized: bool,
}

/// Tool registry and JSON-RPC dispatch over the served snapshot.
#[derive(Debug, Clone)]
pub struct McpServer {
    state: Arc<ServiceState>,
    limit: usize,
}

impl McpServer {
    /// `limit` is the truncation limit in characters per response (at least 1).
    pub fn new(state: Arc<ServiceState>, limit: usize) -> Self {
        McpServer { state, limit: limit.max(1) }
    }

    pub fn state(&self) -> &Arc<ServiceState> {
        &self.state
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn list_tools(&self) -> Vec<ToolDescriptor> {
        TOOLS.iter().map(|t| t.descriptor()).collect()
    }

    /// Runs a tool. Unknown tools and arguments that do not fit the input
    /// schema are protocol errors; failures of the operation itself (no
    /// criteria, unknown document) are error results.
    pub fn call_tool(&self, name: &str, arguments: Option<&Value>) -> Result<ToolResult, RpcError> {
        let tool =
            tool_from_name(name).ok_or_else(|| RpcError::new(INVALID_PARAMS, format!("tool not found: {name}")))?;
        let args = check_args(tool, arguments)?;
        let served = self.state.current();
        match tool {
            Tool::SearchCases => Ok(self.search(&served, DocumentKind::Case, args)),
            Tool::SearchLaws => Ok(self.search(&served, DocumentKind::Law, args)),
            Tool::GetDocument => self.get_document(&served, &args),
            Tool::GetLawSection => self.get_law_section(&served, &args),
            Tool::CoverageStats => Ok(ToolResult::ok(
                serde_json::to_value(&served.coverage).expect("coverage serializes"),
                served.coverage.to_table(),
            )),
        }
    }

    fn search(&self, served: &Served, kind: DocumentKind, args: Vec<(String, String)>) -> ToolResult {
        let page = query_from_pairs(kind, args).and_then(|q| served.index.search(&q).map_err(|e| e.to_string()));
        match page {
            Ok(page) => {
                let text = render_search(&page, kind.collection());
                ToolResult::ok(serde_json::to_value(&page).expect("search page serializes"), text)
            }
            Err(message) => ToolResult::error("invalid_query", message),
        }
    }

    fn parse_cursor(
        &self,
        served: &Served,
        raw: &str,
        slots: &[(String, &str)],
    ) -> Result<Result<Cursor, ToolResult>, RpcError> {
        let bad = || {
            let mut e =
                RpcError::new(INVALID_PARAMS, format!("invalid arguments: cursor: `{raw}` is not a valid cursor"));
            e.data = Some(json!({ "fields": [{ "field": "cursor", "problem": "not a valid cursor" }] }));
            e
        };
        let c = Cursor::parse(raw).ok_or_else(bad)?;
        if c.version != served.version() {
            return Ok(Err(ToolResult::error(
                "stale_cursor",
                format!(
                    "cursor is for corpus version {}, now serving {}; fetch the document again",
                    c.version,
                    served.version()
                ),
            )));
        }
        match slots.get(c.slot) {
            Some((_, text)) if c.offset <= text.chars().count() => Ok(Ok(c)),
            _ => Err(bad()),
        }
    }

    fn get_document(&self, served: &Served, args: &[(String, String)]) -> Result<ToolResult, RpcError> {
        let (dataset, citation) = (arg(args, "dataset").unwrap_or(""), arg(args, "citation").unwrap_or(""));
        let Some(record) = served.snapshot().find(dataset, citation) else {
            return Ok(ToolResult::error("not_found", format!("no document {dataset}/{citation}")));
        };
        let slots = text_slots(record);
        if let Some(raw) = arg(args, "cursor") {
            let c = match self.parse_cursor(served, raw, &slots)? {
                Ok(c) => c,
                Err(result) => return Ok(result),
            };
            let w = walk(&slots, c.slot..slots.len(), c.offset, self.limit, served.version());
            return Ok(continuation(Tool::GetDocument, dataset, citation, w));
        }

        let w = walk(&slots, 0..slots.len(), 0, self.limit, served.version());
        let mut doc = record.clone();
        if let Some(c) = w.cursor {
            for (i, text) in text_slots_mut(&mut doc).into_iter().enumerate() {
                if i == c.slot {
                    let cut = byte_at(text, c.offset);
                    text.truncate(cut);
                } else if i > c.slot {
                    text.clear();
                }
            }
        }
        let lang = if doc.unofficial_text_en.is_some() { Language::En } else { Language::Fr };
        let mut text = format!(
            "{} ({} {}) {}\ndate: {}\nlicense: {}\nurl: {}",
            doc.citation(lang).or(doc.citation_en.as_deref()).or(doc.citation_fr.as_deref()).unwrap_or(citation),
            doc.dataset,
            doc.kind,
            doc.name(lang).unwrap_or(""),
            doc.document_date(lang).map(|d| d.to_string()).unwrap_or_else(|| "undated".into()),
            doc.upstream_license,
            doc.url(lang).unwrap_or(""),
        );
        if let Some(body) = doc.text(lang) {
            text.push_str("\n\n");
            text.push_str(body);
        }
        text.push_str(&truncation_note(Tool::GetDocument, &w));
        let structured = json!({
            "document": doc,
            "truncated": w.cursor.is_some(),
            "cursor": w.cursor.map(Cursor::render),
            "remaining_chars": w.remaining,
        });
        Ok(ToolResult::ok(structured, text))
    }

    fn get_law_section(&self, served: &Served, args: &[(String, String)]) -> Result<ToolResult, RpcError> {
        let (dataset, citation) = (arg(args, "dataset").unwrap_or(""), arg(args, "citation").unwrap_or(""));
        let label = arg(args, "label").unwrap_or("").trim();
        let lang = arg(args, "language").map(|l| Language::from_str(l).expect("checked")).unwrap_or(Language::En);
        let record = served.snapshot().find(dataset, citation).filter(|r| r.kind == DocumentKind::Law);
        let Some(record) = record else {
            return Ok(ToolResult::error("not_found", format!("no law {dataset}/{citation}")));
        };
        let sections = record.sections(lang).unwrap_or(&[]);
        let Some(index) = sections.iter().position(|s| s.label == label) else {
            let labels: Vec<&str> = sections.iter().take(30).map(|s| s.label.as_str()).collect();
            let message = if labels.is_empty() {
                format!("{dataset}/{citation} has no {lang} sections")
            } else {
                format!("{dataset}/{citation} has no {lang} section `{label}`; labels include {}", labels.join(", "))
            };
            return Ok(ToolResult::error("not_found", message));
        };
        let section = &sections[index];
        let slots = text_slots(record);
        let field = format!("unofficial_sections_{lang}[{index}].text");
        let slot = slots.iter().position(|(f, _)| *f == field).expect("section slot");

        if let Some(raw) = arg(args, "cursor") {
            let c = match self.parse_cursor(served, raw, &slots)? {
                Ok(c) if c.slot == slot => c,
                Ok(_) => {
                    return Err(RpcError::new(
                        INVALID_PARAMS,
                        format!("invalid arguments: cursor: `{raw}` does not belong to section {label}"),
                    ))
                }
                Err(result) => return Ok(result),
            };
            let w = walk(&slots, slot..slot + 1, c.offset, self.limit, served.version());
            return Ok(continuation(Tool::GetLawSection, dataset, citation, w));
        }

        let w = walk(&slots, slot..slot + 1, 0, self.limit, served.version());
        let text = w.chunks.first().and_then(|c| c["text"].as_str()).unwrap_or("").to_owned();
        let mut rendered = format!(
            "{} s. {}{}\n{}",
            record.citation(lang).unwrap_or(citation),
            section.label,
            section.heading.as_deref().map(|h| format!(" ({h})")).unwrap_or_default(),
            text
        );
        rendered.push_str(&truncation_note(Tool::GetLawSection, &w));
        let structured = json!({
            "dataset": record.dataset,
            "citation": record.citation(lang).unwrap_or(citation),
            "language": lang,
            "label": section.label,
            "heading": section.heading,
            "text": text,
            "truncated": w.cursor.is_some(),
            "cursor": w.cursor.map(Cursor::render),
            "remaining_chars": w.remaining,
        });
        Ok(ToolResult::ok(structured, rendered))
    }

    fn dispatch(&self, session: &mut Session, method: &str, params: Option<&Value>) -> Result<Value, RpcError> {
        match method {
            "initialize" => {
                let requested = params.and_then(|p| p.get("protocolVersion")).and_then(Value::as_str);
                let version = requested.filter(|v| SUPPORTED_VERSIONS.contains(v)).unwrap_or(PROTOCOL_VERSION);
                session.protocol_version = Some(version.to_owned());
                Ok(json!({
                    "protocolVersion": version,
                    "capabilities": { "tools": { "listChanged": false } },
                    "serverInfo": { "name": "legaldata", "version": env!("CARGO_PKG_VERSION") },
                    "instructions": "Read-only access to a bilingual corpus of court decisions and federal legislation. \
                        Texts are unofficial; each document carries its upstream license."
                }))
            }
            "ping" => Ok(json!({})),
            "tools/list" => Ok(json!({ "tools": self.list_tools() })),
            "tools/call" => {
                let name = params
                    .and_then(|p| p.get("name"))
                    .and_then(Value::as_str)
                    .ok_or_else(|| RpcError::new(INVALID_PARAMS, "tools/call needs a string `name`"))?;
                let result = self.call_tool(name, params.and_then(|p| p.get("arguments")))?;
                Ok(result.to_json())
            }
            other => Err(RpcError::new(METHOD_NOT_FOUND, format!("method not found: {other}"))),
        }
    }

    /// Handles one JSON-RPC message. Notifications and responses yield
    /// `None`.
    pub fn handle_message(&self, session: &mut Session, message: &Value) -> Option<Value> {
        let reply = |id: Value, outcome: Result<Value, RpcError>| {
            Some(match outcome {
                Ok(result) => json!({ "jsonrpc": "2.0", "id": id, "result": result }),
                Err(error) => json!({ "jsonrpc": "2.0", "id": id, "error": error }),
            })
        };
        let Some(obj) = message.as_object() else {
            return reply(Value::Null, Err(RpcError::new(INVALID_REQUEST, "message must be a JSON object")));
        };
        let id = obj.get("id").cloned();
        if obj.get("jsonrpc").and_then(Value::as_str) != Some("2.0") {
            return reply(id.unwrap_or(Value::Null), Err(RpcError::new(INVALID_REQUEST, "jsonrpc must be \"2.0\"")));
        }
        let Some(method) = obj.get("method").and_then(Value::as_str) else {
            if obj.contains_key("result") || obj.contains_key("error") {
                return None;
            }
            return reply(id.unwrap_or(Value::Null), Err(RpcError::new(INVALID_REQUEST, "missing method")));
        };
        let Some(id) = id else {
            if method == "notifications/initialized" {
                session.initialized = true;
            }
            return None;
        };
        reply(id, self.dispatch(session, method, obj.get("params")))
    }

    /// Handles one serialized message.
    pub fn handle_text(&self, session: &mut Session, text: &str) -> Option<String> {
        let response = match serde_json::from_str::<Value>(text) {
            Ok(Value::Array(_)) => Some(json!({
                "jsonrpc": "2.0", "id": null,
                "error": RpcError::new(INVALID_REQUEST, "batched messages are not supported")
            })),
            Ok(message) => self.handle_message(session, &message),
            Err(e) => Some(json!({
                "jsonrpc": "2.0", "id": null,
                "error": RpcError::new(PARSE_ERROR, format!("parse error: {e}"))
            })),
        };
        response.map(|v| v.to_string())
    }
}

/// Serves one session over newline-delimited JSON until `input` ends.
pub fn serve_stdio(server: &McpServer, input: impl BufRead, mut output: impl Write) -> io::Result<()> {
    let mut session = Session::default();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(reply) = server.handle_text(&mut session, &line) {
            writeln!(output, "{reply}")?;
            output.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cursor_text_round_trips() {
        let c = Cursor { version: 12, slot: 3, offset: 20_000 };
        assert_eq!(Cursor::parse(&c.render()), Some(c));
        for bad in ["", "v1.s2", "v1.s2.o3.x", "1.2.3", "vx.s1.o1"] {
            assert_eq!(Cursor::parse(bad), None, "{bad}");
        }
    }

    #[test]
    fn walk_spans_slots_and_resumes() {
        let slots = vec![("a".to_owned(), "héllo"), ("b".to_owned(), ""), ("c".to_owned(), "wörld!")];
        let w = walk(&slots, 0..3, 0, 7, 1);
        assert_eq!(w.chunks.len(), 2);
        assert_eq!(w.chunks[1]["text"], "wö");
        assert_eq!(w.cursor, Some(Cursor { version: 1, slot: 2, offset: 2 }));
        assert_eq!(w.remaining, 4);
        let rest = walk(&slots, 2..3, 2, 100, 1);
        assert_eq!(rest.chunks[0]["text"], "rld!");
        assert_eq!((rest.cursor, rest.remaining), (None, 0));
    }

    #[test]
    fn argument_problems_name_fields() {
        let err = check_args(Tool::GetLawSection, Some(&json!({ "dataset": 3, "language": "de", "extra": true })))
            .unwrap_err();
        assert_eq!(err.code, INVALID_PARAMS);
        let fields: Vec<&str> = err.data.as_ref().unwrap()["fields"]
            .as_array()
            .unwrap()
            .iter()
            .map(|f| f["field"].as_str().unwrap())
            .collect();
        assert_eq!(fields, vec!["dataset", "extra", "language", "citation", "label"]);
    }
}
