//! Tokenization and rule-based sentence splitting shared by every metric.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Lowercases, splits on Unicode whitespace and strips leading/trailing
/// non-alphanumeric characters from each token. Tokens that become empty are
/// dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().filter_map(normalize_token).collect()
}

/// Number of tokens [`tokenize`] would return, without allocating the list.
pub fn count_tokens(text: &str) -> usize {
    text.split_whitespace()
        .filter(|raw| raw.chars().any(char::is_alphanumeric))
        .count()
}

fn normalize_token(raw: &str) -> Option<String> {
    let lowered = raw.to_lowercase();
    let trimmed = lowered.trim_matches(|c: char| !c.is_alphanumeric());
    if trimmed.is_empty() {
        None
    } else {
        Some(trimmed.to_owned())
    }
}

/// Byte offset just past the `limit`-th token of `text`, or `None` when the
/// text holds `limit` tokens or fewer.
pub(crate) fn token_cut_offset(text: &str, limit: usize) -> Option<usize> {
    let mut seen = 0;
    let mut last_end = 0;
    let mut word_has_alnum: Option<bool> = None;
    for (i, c) in text.char_indices().chain(core::iter::once((text.len(), ' '))) {
        if c.is_whitespace() {
            if word_has_alnum == Some(true) {
                if seen == limit {
                    return Some(last_end);
                }
                seen += 1;
                last_end = i;
            }
            word_has_alnum = None;
        } else {
            let entry = word_has_alnum.get_or_insert(false);
            *entry |= c.is_alphanumeric();
        }
    }
    None
}

/// Abbreviations whose trailing period never ends a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abbreviations {
    entries: Vec<String>,
}

pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "dr.", "st.", "u.s.", "vs.", "e.g.", "i.e.", "jr.", "sr.", "no.",
];

impl Default for Abbreviations {
    fn default() -> Self {
        Self::new(DEFAULT_ABBREVIATIONS.iter().copied())
    }
}

impl Abbreviations {
    pub fn new<'a>(entries: impl IntoIterator<Item = &'a str>) -> Self {
        let mut entries: Vec<String> = entries
            .into_iter()
            .map(|e| e.trim().to_lowercase())
            .filter(|e| !e.is_empty())
            .collect();
        entries.sort();
        entries.dedup();
        Self { entries }
    }

    /// One abbreviation per line; blank lines and `#` comments are ignored.
    pub fn from_lines(text: &str) -> Self {
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn contains(&self, word: &str) -> bool {
        let lowered = word.to_lowercase();
        self.entries.binary_search(&lowered).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}')
}

fn is_opening_quote(c: char) -> bool {
    matches!(c, '"' | '\'' | '\u{201c}' | '\u{2018}' | '(' | '[')
}

/// Splits prose into sentences at `.`, `!` or `?` followed by whitespace and
/// an uppercase letter, quote or digit. A period that ends a listed
/// abbreviation does not split.
pub fn split_sentences(text: &str, abbreviations: &Abbreviations) -> Result<Vec<String>> {
    if text.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut seg_start = 0;
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if !is_terminator(c) {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < chars.len() && (is_terminator(chars[j].1) || is_closer(chars[j].1)) {
            j += 1;
        }
        let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
        let mut k = j;
        while k < chars.len() && chars[k].1.is_whitespace() {
            k += 1;
        }
        let boundary = k > j
            && k < chars.len()
            && {
                let next = chars[k].1;
                next.is_uppercase() || next.is_ascii_digit() || is_opening_quote(next)
            }
            && !(c == '.' && j == i + 1 && ends_with_abbreviation(&text[..pos + 1], abbreviations));
        if boundary {
            push_trimmed(&mut sentences, &text[seg_start..end]);
            seg_start = end;
        }
        i = j;
    }
    push_trimmed(&mut sentences, &text[seg_start..]);
    Ok(sentences)
}

fn ends_with_abbreviation(prefix: &str, abbreviations: &Abbreviations) -> bool {
    let word_start = prefix
        .rfind(char::is_whitespace)
        .map_or(0, |p| p + prefix[p..].chars().next().map_or(1, char::len_utf8));
    let word = prefix[word_start..].trim_start_matches(is_opening_quote);
    abbreviations.contains(word)
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_owned());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn split(text: &str) -> Vec<String> {
        split_sentences(text, &Abbreviations::default()).unwrap()
    }

    #[test]
    fn tokenize_strips_punctuation() {
        assert_eq!(tokenize("The cat, sat."), vec!["the", "cat", "sat"]);
        assert!(tokenize("").is_empty());
        assert!(tokenize("  -- ... ").is_empty());
    }

    #[test]
    fn tokenize_keeps_inner_punctuation() {
        // D,O,N,',T,-,S,T,O,P -> lowercase; first and last chars alphanumeric so
        // nothing is stripped. "42!" loses the trailing '!'.
        assert_eq!(tokenize("DON'T-STOP 42!"), vec!["don't-stop", "42"]);
        assert_eq!(tokenize("'quoted'"), vec!["quoted"]);
    }

    #[test]
    fn count_matches_tokenize() {
        for s in ["The cat, sat.", "", "-- a -- b", "DON'T-STOP 42!", "Ünïcode  text\tand\nlines"] {
            assert_eq!(count_tokens(s), tokenize(s).len(), "{s:?}");
        }
    }

    #[test]
    fn cut_offset_stops_at_token_boundary() {
        let text = "one two -- three four";
        assert_eq!(token_cut_offset(text, 2), Some(7));
        assert_eq!(&text[..token_cut_offset(text, 3).unwrap()], "one two -- three");
        assert_eq!(token_cut_offset(text, 4), None);
        assert_eq!(token_cut_offset(text, 0), Some(0));
    }

    #[test]
    fn splits_on_terminators() {
        assert_eq!(split("He ran. She hid!"), vec!["He ran.", "She hid!"]);
        assert_eq!(split("One sentence only"), vec!["One sentence only"]);
        assert_eq!(split("Why? 42 people came."), vec!["Why?", "42 people came."]);
    }

    #[test]
    fn abbreviations_do_not_split() {
        assert_eq!(split("Dr. Lee spoke. End."), vec!["Dr. Lee spoke.", "End."]);
        assert_eq!(
            split("They flew to the U.S. Then home."),
            vec!["They flew to the U.S. Then home."]
        );
        assert_eq!(split("Mr. and Mrs. Smith left."), vec!["Mr. and Mrs. Smith left."]);
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(split("It was 3 p.m. when he left."), vec!["It was 3 p.m. when he left."]);
    }

    #[test]
    fn closing_quote_stays_with_sentence() {
        assert_eq!(
            split("She said \"Run.\" He ran."),
            vec!["She said \"Run.\"", "He ran."]
        );
    }

    #[test]
    fn empty_input_is_rejected() {
        assert_eq!(split_sentences("   \n", &Abbreviations::default()), Err(Error::EmptyInput));
    }

    #[test]
    fn abbreviation_file_parsing() {
        let abbrevs = Abbreviations::from_lines("# comment\nCapt.\n\nLt.\n");
        assert!(abbrevs.contains("capt."));
        assert!(abbrevs.contains("LT."));
        assert!(!abbrevs.contains("dr."));
    }
}
