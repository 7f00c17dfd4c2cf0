//! Text normalization shared by search and analytics.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Lowercases and strips diacritics (`Décision` → `decision`).
pub fn fold(text: &str) -> String {
    text.nfd().filter(|c| !is_combining_mark(*c)).flat_map(char::to_lowercase).collect()
}

/// Folded alphanumeric terms, split on everything else.
pub fn terms(text: &str) -> Vec<String> {
    fold(text).split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(str::to_owned).collect()
}

/// Byte span of each term in `text`, in order, together with the folded term.
///
/// Spans index the original text, so snippets cut from them are verbatim.
pub fn term_spans(text: &str) -> Vec<(usize, usize, String)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            push_folded(&mut out, text, s, i);
        }
    }
    if let Some(s) = start {
        push_folded(&mut out, text, s, text.len());
    }
    out
}

fn push_folded(out: &mut Vec<(usize, usize, String)>, text: &str, start: usize, end: usize) {
    // Folding can split one source word into several terms (e.g. a ligature
    // expanding to punctuation); each part keeps the source span.
    for part in terms(&text[start..end]) {
        out.push((start, end, part));
    }
}

/// Case-insensitive, diacritic-insensitive substring test.
pub fn contains_folded(haystack: &str, needle: &str) -> bool {
    fold(haystack).contains(&fold(needle))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_french_diacritics() {
        assert_eq!(fold("Décision ÉLÈVE Çà"), "decision eleve ca");
        assert_eq!(terms("L'appel est accueilli, réfugié."), vec!["l", "appel", "est", "accueilli", "refugie"]);
    }

    #[test]
    fn spans_index_the_original() {
        let text = "Réfugié — refugee!";
        let spans = term_spans(text);
        assert_eq!(spans.len(), 2);
        assert_eq!(&text[spans[0].0..spans[0].1], "Réfugié");
        assert_eq!(spans[0].2, "refugie");
        assert_eq!(&text[spans[1].0..spans[1].1], "refugee");
    }
}
