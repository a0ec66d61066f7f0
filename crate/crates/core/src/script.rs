//! Script-aware segmentation for Tibetan and mixed Latin text.
//!
//! All spans are expressed in codepoint offsets. A Tibetan "word" is one
//! tsheg-delimited syllable; other scripts split on whitespace and ASCII
//! punctuation. Sentences end at shad runs, at `.`/`!`/`?` runs followed by
//! whitespace or end of line, and never cross a line break. Paragraphs are
//! separated by one or more blank lines.

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};

pub const TSHEG: char = '\u{0F0B}';
pub const SHAD: char = '\u{0F0D}';
pub const NYIS_SHAD: char = '\u{0F0E}';

/// Half-open codepoint range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TextSpan {
    pub start: usize,
    pub end: usize,
}

impl TextSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, other: &TextSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// Every segmentation of one text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentedText {
    pub words: Vec<TextSpan>,
    pub sentences: Vec<TextSpan>,
    pub paragraphs: Vec<TextSpan>,
    pub lines: Vec<TextSpan>,
}

impl SegmentedText {
    pub fn new(text: &str) -> Self {
        let chars: Vec<char> = text.chars().collect();
        Self {
            words: words_in(&chars),
            sentences: sentences_in(&chars),
            paragraphs: paragraphs_in(&chars),
            lines: lines_in(&chars),
        }
    }
}

/// A text together with its codepoint-to-byte map, so spans can be sliced
/// back out as `&str` without rescanning.
#[derive(Debug, Clone)]
pub struct IndexedText<'a> {
    text: &'a str,
    bounds: Vec<usize>,
}

impl<'a> IndexedText<'a> {
    pub fn new(text: &'a str) -> Self {
        let mut bounds: Vec<usize> = text.char_indices().map(|(i, _)| i).collect();
        bounds.push(text.len());
        Self { text, bounds }
    }

    pub fn text(&self) -> &'a str {
        self.text
    }

    pub fn char_len(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn slice(&self, span: TextSpan) -> &'a str {
        &self.text[self.bounds[span.start]..self.bounds[span.end]]
    }
}

pub fn is_tibetan_codepoint(cp: char) -> bool {
    ('\u{0F00}'..='\u{0FFF}').contains(&cp)
}

pub fn is_word_delimiter(cp: char) -> bool {
    matches!(cp, TSHEG | SHAD | NYIS_SHAD) || cp.is_whitespace() || cp.is_ascii_punctuation()
}

fn is_shad(cp: char) -> bool {
    matches!(cp, SHAD | NYIS_SHAD)
}

fn is_ascii_terminator(cp: char) -> bool {
    matches!(cp, '.' | '!' | '?')
}

/// True iff the word contains at least one codepoint of general category
/// Letter (`L*`). Tibetan consonants are `Lo`; vowel signs are marks and do
/// not count on their own.
pub fn is_alphabetic_word(word: &str) -> bool {
    word.chars().any(|c| {
        matches!(
            get_general_category(c),
            GeneralCategory::UppercaseLetter
                | GeneralCategory::LowercaseLetter
                | GeneralCategory::TitlecaseLetter
                | GeneralCategory::ModifierLetter
                | GeneralCategory::OtherLetter
        )
    })
}

pub fn split_words(text: &str) -> Vec<TextSpan> {
    let chars: Vec<char> = text.chars().collect();
    words_in(&chars)
}

pub fn split_sentences(text: &str) -> Vec<TextSpan> {
    let chars: Vec<char> = text.chars().collect();
    sentences_in(&chars)
}

pub fn split_paragraphs(text: &str) -> Vec<TextSpan> {
    let chars: Vec<char> = text.chars().collect();
    paragraphs_in(&chars)
}

pub fn split_lines(text: &str) -> Vec<TextSpan> {
    let chars: Vec<char> = text.chars().collect();
    lines_in(&chars)
}

/// Convenience: the word strings of `text`, in order.
pub fn words(text: &str) -> Vec<&str> {
    let idx = IndexedText::new(text);
    split_words(text).into_iter().map(|s| idx.slice(s)).collect()
}

pub(crate) fn words_in(chars: &[char]) -> Vec<TextSpan> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &c) in chars.iter().enumerate() {
        if is_word_delimiter(c) {
            if let Some(s) = start.take() {
                out.push(TextSpan::new(s, i));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(TextSpan::new(s, chars.len()));
    }
    out
}

/// Lines are the `\n`-separated pieces, newline excluded. A trailing
/// newline does not open an extra empty line.
pub(crate) fn lines_in(chars: &[char]) -> Vec<TextSpan> {
    let mut out = Vec::new();
    if chars.is_empty() {
        return out;
    }
    let mut start = 0;
    for (i, &c) in chars.iter().enumerate() {
        if c == '\n' {
            out.push(TextSpan::new(start, i));
            start = i + 1;
        }
    }
    if start < chars.len() {
        out.push(TextSpan::new(start, chars.len()));
    }
    out
}

fn trimmed(chars: &[char], mut start: usize, mut end: usize) -> Option<TextSpan> {
    while start < end && chars[start].is_whitespace() {
        start += 1;
    }
    while end > start && chars[end - 1].is_whitespace() {
        end -= 1;
    }
    (start < end).then(|| TextSpan::new(start, end))
}

pub(crate) fn sentences_in(chars: &[char]) -> Vec<TextSpan> {
    let mut out = Vec::new();
    for line in lines_in(chars) {
        let mut start = line.start;
        let mut i = line.start;
        while i < line.end {
            let c = chars[i];
            if is_shad(c) || is_ascii_terminator(c) {
                let mut j = i;
                let mut saw_shad = false;
                while j < line.end && (is_shad(chars[j]) || is_ascii_terminator(chars[j])) {
                    saw_shad |= is_shad(chars[j]);
                    j += 1;
                }
                // Tibetan writing often puts a space between doubled shads
                // ("། །"); fold those into the same terminator run.
                if saw_shad {
                    let mut k = j;
                    while k < line.end && chars[k].is_whitespace() {
                        k += 1;
                    }
                    while k < line.end && is_shad(chars[k]) {
                        k += 1;
                        j = k;
                        while k < line.end && chars[k].is_whitespace() {
                            k += 1;
                        }
                    }
                }
                let boundary = saw_shad || j == line.end || chars[j].is_whitespace();
                if boundary {
                    out.extend(trimmed(chars, start, j));
                    start = j;
                }
                i = j;
            } else {
                i += 1;
            }
        }
        out.extend(trimmed(chars, start, line.end));
    }
    out
}

pub(crate) fn paragraphs_in(chars: &[char]) -> Vec<TextSpan> {
    let mut out = Vec::new();
    let mut para: Option<(usize, usize)> = None;
    for line in lines_in(chars) {
        let blank = chars[line.start..line.end].iter().all(|c| c.is_whitespace());
        if blank {
            if let Some((s, e)) = para.take() {
                out.extend(trimmed(chars, s, e));
            }
        } else {
            para = Some(match para {
                Some((s, _)) => (s, line.end),
                None => (line.start, line.end),
            });
        }
    }
    if let Some((s, e)) = para {
        out.extend(trimmed(chars, s, e));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(text: &str, spans: &[TextSpan]) -> Vec<String> {
        let idx = IndexedText::new(text);
        spans.iter().map(|s| idx.slice(*s).to_string()).collect()
    }

    #[test]
    fn tibetan_block_membership() {
        assert!(is_tibetan_codepoint('\u{0F40}'));
        assert!(!is_tibetan_codepoint('A'));
        assert!(is_tibetan_codepoint(TSHEG));
        assert!(is_tibetan_codepoint('\u{0F00}'));
        assert!(is_tibetan_codepoint('\u{0FFF}'));
        assert!(!is_tibetan_codepoint('\u{1000}'));
    }

    #[test]
    fn words_split_on_tsheg_and_space() {
        assert_eq!(words("བོད་ཡིག"), vec!["བོད", "ཡིག"]);
        assert_eq!(words("hello world"), vec!["hello", "world"]);
        assert!(words("").is_empty());
        assert_eq!(words("བཀྲ་ཤིས་བདེ་ལེགས། hi, there"), vec!["བཀྲ", "ཤིས", "བདེ", "ལེགས", "hi", "there"]);
        assert!(words("  ,,, ་།").is_empty());
    }

    #[test]
    fn sentence_examples() {
        let t = "ཀ་ཁ། ག་ང། ཅ་ཆ།";
        assert_eq!(texts(t, &split_sentences(t)), vec!["ཀ་ཁ།", "ག་ང།", "ཅ་ཆ།"]);
        assert_eq!(texts("a. b.", &split_sentences("a. b.")), vec!["a.", "b."]);
        assert_eq!(split_sentences("no terminators here").len(), 1);
        assert!(split_sentences("").is_empty());
    }

    #[test]
    fn decimal_point_is_not_a_boundary() {
        assert_eq!(split_sentences("pi is 3.14 roughly. ok").len(), 2);
    }

    #[test]
    fn ellipsis_stays_with_its_sentence() {
        let t = "wait... what?! fine";
        assert_eq!(texts(t, &split_sentences(t)), vec!["wait...", "what?!", "fine"]);
    }

    #[test]
    fn doubled_shad_is_one_terminator() {
        let t = "ཀ་ཁ།། ག་ང། །ཅ་ཆ";
        assert_eq!(texts(t, &split_sentences(t)), vec!["ཀ་ཁ།།", "ག་ང། །", "ཅ་ཆ"]);
    }

    #[test]
    fn sentences_break_at_newlines() {
        let t = "- one\n- two\n";
        assert_eq!(texts(t, &split_sentences(t)), vec!["- one", "- two"]);
    }

    #[test]
    fn paragraph_examples() {
        assert_eq!(split_paragraphs("p1\n\np2").len(), 2);
        assert_eq!(split_paragraphs("p1\np1-continued").len(), 1);
        assert!(split_paragraphs("").is_empty());
        let t = "  first para  \n \n\n second\nstill second \n";
        assert_eq!(texts(t, &split_paragraphs(t)), vec!["first para", "second\nstill second"]);
    }

    #[test]
    fn alphabetic_words() {
        assert!(is_alphabetic_word("བོད"));
        assert!(!is_alphabetic_word("123"));
        assert!(is_alphabetic_word("a1"));
        assert!(!is_alphabetic_word("\u{0F72}"));
        assert!(!is_alphabetic_word("༡༢"));
    }

    #[test]
    fn lines_ignore_trailing_newline() {
        assert_eq!(split_lines("a\nb\n").len(), 2);
        assert_eq!(split_lines("a\n\nb").len(), 3);
        assert!(split_lines("").is_empty());
    }

    #[test]
    fn sentences_nest_in_paragraphs() {
        let t = "ཀ་ཁ། ག། \nnext line. and\n\nnew para! ok";
        let seg = SegmentedText::new(t);
        for s in &seg.sentences {
            assert_eq!(seg.paragraphs.iter().filter(|p| p.contains(s)).count(), 1);
        }
    }
}
