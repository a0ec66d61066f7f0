//! Repetition and quality measurements over word, sentence, paragraph and
//! line units.
//!
//! Character counts are codepoints. Word n-gram coverage counts only the
//! codepoints of the words themselves; the denominator is the full text,
//! delimiters included.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};

use crate::script::{self, IndexedText, TextSpan};

/// One text with all of its segmentations materialized as string slices.
#[derive(Debug, Clone)]
pub struct Analysis<'a> {
    pub text: &'a str,
    pub char_len: usize,
    pub words: Vec<&'a str>,
    pub sentences: Vec<&'a str>,
    pub paragraphs: Vec<&'a str>,
    pub lines: Vec<&'a str>,
}

impl<'a> Analysis<'a> {
    pub fn new(text: &'a str) -> Self {
        let chars: Vec<char> = text.chars().collect();
        let idx = IndexedText::new(text);
        let slice = |spans: Vec<TextSpan>| spans.into_iter().map(|s| idx.slice(s)).collect::<Vec<_>>();
        Self {
            text,
            char_len: chars.len(),
            words: slice(script::words_in(&chars)),
            sentences: slice(script::sentences_in(&chars)),
            paragraphs: slice(script::paragraphs_in(&chars)),
            lines: slice(script::lines_in(&chars)),
        }
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }
}

pub(crate) fn char_len(s: &str) -> usize {
    s.chars().count()
}

fn ratio(num: f64, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num / den as f64
    }
}

/// Count and total codepoints of the items that repeat an earlier item.
pub fn duplicate_stats(items: &[&str]) -> (usize, usize) {
    let mut seen = HashSet::with_capacity(items.len());
    let mut count = 0;
    let mut chars = 0;
    for item in items {
        if !seen.insert(*item) {
            count += 1;
            chars += char_len(item);
        }
    }
    (count, chars)
}

/// Character share of the most frequent word n-gram that occurs at least
/// twice: `count * ngram_chars / text_chars`. Ties on count go to the
/// n-gram with more characters, then to the earliest one.
pub fn top_ngram_char_fraction_of(a: &Analysis<'_>, n: usize) -> f64 {
    if n == 0 || a.words.len() < n || a.char_len == 0 {
        return 0.0;
    }
    // (count, chars, first index)
    let mut grams: HashMap<&[&str], (usize, usize, usize)> = HashMap::new();
    for (i, w) in a.words.windows(n).enumerate() {
        match grams.entry(w) {
            Entry::Occupied(mut e) => e.get_mut().0 += 1,
            Entry::Vacant(e) => {
                e.insert((1, w.iter().map(|x| char_len(x)).sum(), i));
            }
        }
    }
    let best = grams
        .values()
        .filter(|g| g.0 >= 2)
        .max_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)).then(y.2.cmp(&x.2)));
    match best {
        Some(&(count, chars, _)) => (count * chars) as f64 / a.char_len as f64,
        None => 0.0,
    }
}

/// Share of codepoints covered by any word n-gram occurring at least twice.
/// Overlapping occurrences mark each word once.
pub fn dup_ngram_char_fraction_of(a: &Analysis<'_>, n: usize) -> f64 {
    if n == 0 || a.words.len() < n || a.char_len == 0 {
        return 0.0;
    }
    let mut counts: HashMap<&[&str], usize> = HashMap::new();
    for w in a.words.windows(n) {
        *counts.entry(w).or_default() += 1;
    }
    let mut marked = vec![false; a.words.len()];
    for (i, w) in a.words.windows(n).enumerate() {
        if counts[w] >= 2 {
            marked[i..i + n].iter_mut().for_each(|m| *m = true);
        }
    }
    let covered: usize =
        a.words.iter().zip(&marked).filter(|(_, m)| **m).map(|(w, _)| char_len(w)).sum();
    covered as f64 / a.char_len as f64
}

pub fn top_ngram_char_fraction(text: &str, n: usize) -> f64 {
    top_ngram_char_fraction_of(&Analysis::new(text), n)
}

pub fn dup_ngram_char_fraction(text: &str, n: usize) -> f64 {
    dup_ngram_char_fraction_of(&Analysis::new(text), n)
}

/// Fraction of sentences that exactly repeat an earlier sentence.
pub fn dup_sentence_fraction(a: &Analysis<'_>) -> f64 {
    ratio(duplicate_stats(&a.sentences).0 as f64, a.sentences.len())
}

pub fn dup_paragraph_fraction(a: &Analysis<'_>) -> f64 {
    ratio(duplicate_stats(&a.paragraphs).0 as f64, a.paragraphs.len())
}

/// Codepoints inside repeated sentences over all codepoints of the text.
pub fn dup_sentence_char_fraction(a: &Analysis<'_>) -> f64 {
    ratio(duplicate_stats(&a.sentences).1 as f64, a.char_len)
}

/// After dropping blank lines: codepoints in lines that repeat an earlier
/// line, over codepoints of all remaining lines.
pub fn dup_line_char_fraction(a: &Analysis<'_>) -> f64 {
    let lines: Vec<&str> = a.lines.iter().copied().filter(|l| !l.trim().is_empty()).collect();
    let total: usize = lines.iter().map(|l| char_len(l)).sum();
    ratio(duplicate_stats(&lines).1 as f64, total)
}

pub fn mean_word_len(a: &Analysis<'_>) -> f64 {
    ratio(a.words.iter().map(|w| char_len(w)).sum::<usize>() as f64, a.words.len())
}

/// `#` plus every occurrence of each ellipsis form, over word count.
pub fn symbol_word_ratio(a: &Analysis<'_>, ellipses: &[String]) -> f64 {
    let hashes = a.text.matches('#').count();
    let dots: usize = ellipses.iter().map(|e| a.text.matches(e.as_str()).count()).sum();
    ratio((hashes + dots) as f64, a.words.len())
}

pub fn alpha_word_fraction(a: &Analysis<'_>) -> f64 {
    ratio(a.words.iter().filter(|w| script::is_alphabetic_word(w)).count() as f64, a.words.len())
}

pub fn bullet_sentence_fraction(a: &Analysis<'_>, bullets: &[char]) -> f64 {
    let n = a
        .sentences
        .iter()
        .filter(|s| s.chars().next().is_some_and(|c| bullets.contains(&c)))
        .count();
    ratio(n as f64, a.sentences.len())
}

pub fn ellipsis_sentence_fraction(a: &Analysis<'_>, ellipses: &[String]) -> f64 {
    let n = a
        .sentences
        .iter()
        .filter(|s| ellipses.iter().any(|e| s.ends_with(e.as_str())))
        .count();
    ratio(n as f64, a.sentences.len())
}

pub fn short_sentence_fraction(a: &Analysis<'_>, max_len: usize) -> f64 {
    let n = a.sentences.iter().filter(|s| char_len(s) <= max_len).count();
    ratio(n as f64, a.sentences.len())
}

/// Newlines per word. With no words the newline count itself is returned.
pub fn newline_word_ratio(a: &Analysis<'_>) -> f64 {
    let newlines = a.text.matches('\n').count() as f64;
    if a.words.is_empty() {
        newlines
    } else {
        newlines / a.words.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_phrase_top_bigram() {
        // "ab cd" ten times: 40 word codepoints out of 59.
        let t = ["ab cd"; 10].join(" ");
        let f = top_ngram_char_fraction(&t, 2);
        assert!((f - 40.0 / 59.0).abs() < 1e-15);
    }

    #[test]
    fn distinct_words_have_no_repetition() {
        let t = "one two three four five six seven eight nine ten eleven twelve";
        for n in 2..=10 {
            assert_eq!(top_ngram_char_fraction(t, n), 0.0);
            assert_eq!(dup_ngram_char_fraction(t, n), 0.0);
        }
        assert_eq!(top_ngram_char_fraction("single", 2), 0.0);
        assert_eq!(dup_ngram_char_fraction("a b c", 5), 0.0);
    }

    #[test]
    fn sentence_twice_is_fully_covered_by_five_grams() {
        let t = "alpha beta gamma delta epsilon. alpha beta gamma delta epsilon.";
        // 2 * 26 word codepoints out of 63.
        assert!((dup_ngram_char_fraction(t, 5) - 52.0 / 63.0).abs() < 1e-15);
    }

    #[test]
    fn tie_break_prefers_longer_ngram() {
        let t = "a b x a b y cc dd z cc dd";
        // "a b" and "cc dd" both appear twice; "cc dd" covers more.
        assert!((top_ngram_char_fraction(t, 2) - 8.0 / 25.0).abs() < 1e-15);
    }

    #[test]
    fn duplicates() {
        let a = Analysis::new("Same thing. Same thing. Same thing. Same thing.");
        assert_eq!(dup_sentence_fraction(&a), 0.75);
        assert_eq!(dup_paragraph_fraction(&a), 0.0);
        let a = Analysis::new("x y\n\nx y\n\nz");
        assert!((dup_paragraph_fraction(&a) - 1.0 / 3.0).abs() < 1e-15);
        let a = Analysis::new("aaaa\n\nbb\naaaa\n  \n");
        assert!((dup_line_char_fraction(&a) - 4.0 / 10.0).abs() < 1e-15);
    }

    #[test]
    fn symbols_and_sentences() {
        let a = Analysis::new("# heading\nwait... what…\n- item one\n- item two");
        let ell = vec!["...".to_string(), "…".to_string()];
        assert!((symbol_word_ratio(&a, &ell) - 3.0 / 7.0).abs() < 1e-15);
        assert!((bullet_sentence_fraction(&a, &['-']) - 2.0 / 5.0).abs() < 1e-15);
        assert!((ellipsis_sentence_fraction(&a, &ell) - 2.0 / 5.0).abs() < 1e-15);
        assert!((newline_word_ratio(&a) - 3.0 / 7.0).abs() < 1e-15);
    }
}
