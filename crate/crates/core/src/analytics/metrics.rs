//! Word, sentence and syllable counting, and the Flesch Reading Ease score.
//!
//! Counting rules:
//! - a word is a whitespace-delimited token containing at least one
//!   alphanumeric character;
//! - a sentence ends at a token whose last non-closing character is `.`,
//!   `!` or `?`, unless the token is a guarded abbreviation or a single
//!   letter initial followed by `.`; trailing words without a terminator form
//!   a final sentence;
//! - syllables in a word are the groups of consecutive `aeiouy` letters
//!   (after case and diacritic folding), less one for a silent trailing `e`
//!   after a consonant when that leaves at least one group, never below 1.

use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::text::fold;

pub const FLESCH_BASE: f64 = 206.835;
pub const FLESCH_SENTENCE_WEIGHT: f64 = 1.015;
pub const FLESCH_SYLLABLE_WEIGHT: f64 = 84.6;

/// Tokens ending in `.` that do not end a sentence. Compared lowercased,
/// after stripping leading opening punctuation.
pub const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "st.", "jr.", "sr.", "hon.", "prof.", "mme.", "me.", "mtre.", "jj.", "v.", "vs.",
    "no.", "nos.", "para.", "paras.", "s.", "ss.", "art.", "arts.", "c.", "ch.", "cf.", "e.g.", "i.e.", "inc.", "ltd.",
    "co.", "corp.", "p.", "pp.", "ibid.", "al.", "sc.", "r.s.c.", "s.c.", "sor.", "dors.",
];

const CLOSING: &[char] = &['"', '\'', '”', '’', ')', ']', '»', '}'];
const OPENING: &[char] = &['"', '\'', '“', '‘', '(', '[', '«', '{'];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextMetrics {
    pub words: u64,
    pub sentences: u64,
    pub syllables: u64,
}

fn is_word(token: &str) -> bool {
    token.chars().any(char::is_alphanumeric)
}

fn ends_sentence(token: &str) -> bool {
    let core = token.trim_end_matches(CLOSING);
    let Some(last) = core.chars().last() else { return false };
    match last {
        '!' | '?' => true,
        '.' => !is_guarded(core),
        _ => false,
    }
}

fn is_guarded(token: &str) -> bool {
    let bare = token.trim_start_matches(OPENING).to_lowercase();
    if ABBREVIATIONS.contains(&bare.as_str()) {
        return true;
    }
    // Initials such as "J." or "A.".
    let mut chars = bare.chars();
    matches!((chars.next(), chars.next(), chars.next()), (Some(c), Some('.'), None) if c.is_alphabetic())
}

pub fn syllables(word: &str) -> u64 {
    let letters: Vec<char> = fold(word).chars().filter(|c| c.is_alphabetic()).collect();
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0u64;
    let mut prev_vowel = false;
    for &c in &letters {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    let n = letters.len();
    if groups > 1 && n >= 2 && letters[n - 1] == 'e' && !is_vowel(letters[n - 2]) {
        groups -= 1;
    }
    groups.max(1)
}

pub fn text_metrics(text: &str) -> TextMetrics {
    let mut m = TextMetrics::default();
    let mut open_segment = false;
    for token in text.split_whitespace() {
        if is_word(token) {
            m.words += 1;
            m.syllables += syllables(token);
            open_segment = true;
        }
        if ends_sentence(token) && open_segment {
            m.sentences += 1;
            open_segment = false;
        }
    }
    if open_segment {
        m.sentences += 1;
    }
    m
}

/// Sentences under the same segmentation rules, tokens re-joined with one space.
pub fn sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    let mut has_word = false;
    for token in text.split_whitespace() {
        current.push(token);
        has_word |= is_word(token);
        if ends_sentence(token) && has_word {
            out.push(current.join(" "));
            current.clear();
            has_word = false;
        }
    }
    if has_word {
        out.push(current.join(" "));
    }
    out
}

pub fn word_count(text: &str) -> u64 {
    text.split_whitespace().filter(|t| is_word(t)).count() as u64
}

impl TextMetrics {
    pub fn flesch_reading_ease(&self) -> Result<f64, AnalyticsError> {
        if self.words == 0 {
            return Err(AnalyticsError::NoWords);
        }
        let words = self.words as f64;
        Ok(FLESCH_BASE
            - FLESCH_SENTENCE_WEIGHT * (words / self.sentences as f64)
            - FLESCH_SYLLABLE_WEIGHT * (self.syllables as f64 / words))
    }
}

pub fn flesch_reading_ease(text: &str) -> Result<f64, AnalyticsError> {
    text_metrics(text).flesch_reading_ease()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_cat_sat() {
        assert_eq!(text_metrics("The cat sat."), TextMetrics { words: 3, sentences: 1, syllables: 3 });
        let score = flesch_reading_ease("The cat sat.").unwrap();
        assert!((score - 119.19).abs() < 1e-9, "{score}");
    }

    #[test]
    fn empty_text() {
        assert_eq!(text_metrics(""), TextMetrics::default());
        assert_eq!(flesch_reading_ease("").unwrap_err(), AnalyticsError::NoWords);
        assert_eq!(flesch_reading_ease(" -- ").unwrap_err(), AnalyticsError::NoWords);
    }

    #[test]
    fn abbreviation_guard() {
        assert_eq!(text_metrics("Mr. Justice Roy agreed.").sentences, 1);
        assert_eq!(text_metrics("See Smith v. Canada. It applies.").sentences, 2);
        assert_eq!(text_metrics("Grammond J. dismissed it. Costs follow!").sentences, 2);
        assert_eq!(text_metrics("Is it allowed? (Yes.) No costs").sentences, 3);
    }

    #[test]
    fn syllable_rules() {
        for (w, n) in [
            ("the", 1),
            ("cat", 1),
            ("sale", 1),
            ("free", 1),
            ("decision", 3),
            ("rhythm", 1),
            ("appeal", 2),
            ("Réfugié", 3),
            ("2025", 1),
            ("queue", 1),
            ("employee", 2),
        ] {
            assert_eq!(syllables(w), n, "{w}");
        }
    }

    #[test]
    fn punctuation_only_tokens_are_not_words() {
        let m = text_metrics("Held — appeal allowed . . .");
        assert_eq!(m.words, 3);
        assert_eq!(m.sentences, 1);
    }

    #[test]
    fn sentences_follow_the_same_rules() {
        assert_eq!(
            sentences("Mr. Justice Roy agreed.  The appeal\nis allowed. trailing"),
            vec!["Mr. Justice Roy agreed.", "The appeal is allowed.", "trailing"]
        );
    }
}
