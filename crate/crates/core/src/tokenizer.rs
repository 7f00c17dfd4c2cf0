//! Pluggable token counting.
//!
//! Two schemes exist: `word-fallback`, which counts whitespace-delimited
//! words, and `bpe`, which applies a ranked merge table to each word.

use std::collections::HashMap;
use std::fmt;

pub const WORD_FALLBACK: &str = "word-fallback";
pub const BPE: &str = "bpe";

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TokenizerError {
    #[error("unknown tokenizer scheme `{0}` (registered: {1})")]
    UnknownScheme(String, String),
    #[error("merge table line {line}: expected two tokens, got `{content}`")]
    BadMergeLine { line: usize, content: String },
}

/// Ranked byte-pair merges. Rank is the 1-based line number in the table file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeTable {
    ranks: HashMap<(String, String), usize>,
}

impl MergeTable {
    /// Parses `tokenA tokenB` lines. Blank lines and lines starting with `#`
    /// are skipped but still consume a line number.
    pub fn parse(source: &str) -> Result<Self, TokenizerError> {
        let mut ranks = HashMap::new();
        for (idx, line) in source.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => {
                    ranks.entry((a.to_owned(), b.to_owned())).or_insert(idx + 1);
                }
                _ => return Err(TokenizerError::BadMergeLine { line: idx + 1, content: line.to_owned() }),
            }
        }
        Ok(MergeTable { ranks })
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    fn rank(&self, a: &str, b: &str) -> Option<usize> {
        self.ranks.get(&(a.to_owned(), b.to_owned())).copied()
    }

    /// Splits one word into pieces by repeatedly applying the lowest-ranked
    /// merge present, each time merging all of its occurrences left to right.
    pub fn encode_word(&self, word: &str) -> Vec<String> {
        let mut pieces: Vec<String> = word.chars().map(String::from).collect();
        loop {
            let best = pieces
                .windows(2)
                .filter_map(|w| self.rank(&w[0], &w[1]).map(|r| (r, w[0].clone(), w[1].clone())))
                .min_by_key(|(r, _, _)| *r);
            let Some((_, left, right)) = best else { break };
            let mut merged = Vec::with_capacity(pieces.len());
            let mut i = 0;
            while i < pieces.len() {
                if i + 1 < pieces.len() && pieces[i] == left && pieces[i + 1] == right {
                    merged.push(format!("{left}{right}"));
                    i += 2;
                } else {
                    merged.push(std::mem::take(&mut pieces[i]));
                    i += 1;
                }
            }
            pieces = merged;
        }
        pieces
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum Tokenizer {
    #[default]
    WordFallback,
    Bpe { label: String, merges: MergeTable },
}

impl Tokenizer {
    pub fn bpe(label: impl Into<String>, merges: MergeTable) -> Self {
        Tokenizer::Bpe { label: label.into(), merges }
    }

    pub fn scheme(&self) -> &'static str {
        match self {
            Tokenizer::WordFallback => WORD_FALLBACK,
            Tokenizer::Bpe { .. } => BPE,
        }
    }

    /// Scheme plus merge-table label; recorded alongside token counts.
    pub fn describe(&self) -> String {
        match self {
            Tokenizer::WordFallback => WORD_FALLBACK.to_owned(),
            Tokenizer::Bpe { label, merges } => format!("{BPE} ({label}, {} merges)", merges.len()),
        }
    }

    pub fn count_tokens(&self, text: &str) -> u64 {
        match self {
            Tokenizer::WordFallback => text.split_whitespace().count() as u64,
            Tokenizer::Bpe { merges, .. } => text.split_whitespace().map(|w| merges.encode_word(w).len() as u64).sum(),
        }
    }
}

impl fmt::Display for Tokenizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Named tokenizers. `word-fallback` is always registered.
#[derive(Debug, Clone)]
pub struct TokenizerRegistry {
    schemes: Vec<(String, Tokenizer)>,
}

impl Default for TokenizerRegistry {
    fn default() -> Self {
        TokenizerRegistry { schemes: vec![(WORD_FALLBACK.to_owned(), Tokenizer::WordFallback)] }
    }
}

impl TokenizerRegistry {
    pub fn with_bpe(mut self, label: impl Into<String>, merges: MergeTable) -> Self {
        self.schemes.retain(|(name, _)| name != BPE);
        self.schemes.push((BPE.to_owned(), Tokenizer::bpe(label, merges)));
        self
    }

    pub fn get(&self, scheme: &str) -> Result<&Tokenizer, TokenizerError> {
        self.schemes.iter().find(|(name, _)| name == scheme).map(|(_, t)| t).ok_or_else(|| {
            let names: Vec<&str> = self.schemes.iter().map(|(n, _)| n.as_str()).collect();
            TokenizerError::UnknownScheme(scheme.to_owned(), names.join(", "))
        })
    }

    pub fn count_tokens(&self, text: &str, scheme: &str) -> Result<u64, TokenizerError> {
        Ok(self.get(scheme)?.count_tokens(text))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MERGES: &str = "l o\nlo w\ne r\nlow er\ni n\nin g\n";

    #[test]
    fn word_fallback_counts_whitespace_words() {
        let reg = TokenizerRegistry::default();
        assert_eq!(reg.count_tokens("the cat sat", WORD_FALLBACK).unwrap(), 3);
        assert_eq!(reg.count_tokens("", WORD_FALLBACK).unwrap(), 0);
        assert_eq!(reg.count_tokens("  \n\t ", WORD_FALLBACK).unwrap(), 0);
    }

    #[test]
    fn empty_text_is_zero_for_bpe() {
        let t = Tokenizer::bpe("fixture", MergeTable::parse(MERGES).unwrap());
        assert_eq!(t.count_tokens(""), 0);
    }

    #[test]
    fn merge_table_applied_to_lowering() {
        // By hand: l o w e r i n g
        //   (l,o)   -> lo w e r i n g
        //   (lo,w)  -> low e r i n g
        //   (e,r)   -> low er i n g
        //   (low,er)-> lower i n g
        //   (i,n)   -> lower in g
        //   (in,g)  -> lower ing
        let table = MergeTable::parse(MERGES).unwrap();
        assert_eq!(table.encode_word("lowering"), vec!["lower", "ing"]);
        let t = Tokenizer::bpe("fixture", table);
        assert_eq!(t.count_tokens("lowering"), 2);
        // "lowing": lo w i n g -> low i n g -> low in g -> low ing
        assert_eq!(t.count_tokens("lowering lowing"), 4);
    }

    #[test]
    fn rank_order_decides_between_competing_pairs() {
        // "era": (e,r) rank 1 beats (r,a) rank 2, leaving "er a".
        let table = MergeTable::parse("e r\nr a\n").unwrap();
        assert_eq!(table.encode_word("era"), vec!["er", "a"]);
        let table = MergeTable::parse("r a\ne r\n").unwrap();
        assert_eq!(table.encode_word("era"), vec!["e", "ra"]);
    }

    #[test]
    fn unknown_scheme_is_a_configuration_error() {
        let reg = TokenizerRegistry::default();
        assert!(matches!(reg.count_tokens("x", "tiktoken"), Err(TokenizerError::UnknownScheme(..))));
        assert!(reg.get(BPE).is_err());
        let reg = reg.with_bpe("t", MergeTable::parse(MERGES).unwrap());
        assert_eq!(reg.count_tokens("lowering", BPE).unwrap(), 2);
    }

    #[test]
    fn malformed_merge_line() {
        let err = MergeTable::parse("#version: 0.2\na b\nabc\n").unwrap_err();
        assert_eq!(err, TokenizerError::BadMergeLine { line: 3, content: "abc".into() });
    }
}
