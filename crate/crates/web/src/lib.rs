//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export returns a JSON string; errors surface as JS exceptions.
//!
//! ```sh
//! cargo build -p legaldata-web --target wasm32-unknown-unknown --release
//! wasm-bindgen --target web --out-dir crates/web/www/pkg \
//!     target/wasm32-unknown-unknown/release/legaldata_web.wasm
//! ```

use legaldata_core::analytics::judges::JudgePatterns;
use legaldata_core::analytics::metrics::{sentences, text_metrics};
use legaldata_core::MergeTable;
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize)]
struct Readability {
    words: u64,
    sentences: u64,
    syllables: u64,
    /// `None` when the text has no words.
    flesch_reading_ease: Option<f64>,
    sentence_list: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Tokenized {
    merges: usize,
    count: usize,
    /// One list of pieces per whitespace-delimited word.
    words: Vec<Vec<String>>,
}

#[derive(Debug, Serialize)]
struct Attribution {
    judge: Option<String>,
    pattern: Option<String>,
    patterns_version: u32,
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain structs serialize")
}

pub fn readability_json(text: &str) -> String {
    let m = text_metrics(text);
    json(&Readability {
        words: m.words,
        sentences: m.sentences,
        syllables: m.syllables,
        flesch_reading_ease: m.flesch_reading_ease().ok(),
        sentence_list: sentences(text),
    })
}

pub fn tokenize_json(merges: &str, text: &str) -> Result<String, String> {
    let table = MergeTable::parse(merges).map_err(|e| e.to_string())?;
    let words: Vec<Vec<String>> = text.split_whitespace().map(|w| table.encode_word(w)).collect();
    Ok(json(&Tokenized { merges: table.len(), count: words.iter().map(Vec::len).sum(), words }))
}

pub fn judge_json(text: &str) -> String {
    let patterns = JudgePatterns::builtin();
    let hit = patterns.patterns.iter().find_map(|p| {
        let one = JudgePatterns { version: patterns.version, patterns: vec![p.clone()] };
        one.extract_from_text(text).map(|j| (j, p.name.clone()))
    });
    let (judge, pattern) = hit.unzip();
    json(&Attribution { judge, pattern, patterns_version: patterns.version })
}

/// Word, sentence and syllable counts plus the Flesch Reading Ease score.
#[wasm_bindgen]
pub fn readability(text: &str) -> String {
    readability_json(text)
}

/// Splits each word of `text` with the given merge table (`left right` per line).
#[wasm_bindgen]
pub fn tokenize(merges: &str, text: &str) -> Result<String, JsError> {
    tokenize_json(merges, text).map_err(|e| JsError::new(&e))
}

/// Judge surname from a decision header, with the pattern that matched.
#[wasm_bindgen]
pub fn extract_judge(text: &str) -> String {
    judge_json(text)
}
