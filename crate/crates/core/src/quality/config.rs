use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NgramThreshold {
    pub n: usize,
    pub max_frac: f64,
}

/// Every threshold used by the quality chain. Defaults are the values the
/// Tibetan pipeline was run with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    /// Character share of the single most frequent repeated word n-gram.
    pub top_ngram_max_frac: Vec<NgramThreshold>,
    /// Character share covered by all repeated word n-grams.
    pub dup_ngram_max_frac: Vec<NgramThreshold>,
    pub dup_sentence_char_max_frac: f64,
    pub dup_sentence_max_frac: f64,
    pub dup_paragraph_max_frac: f64,

    pub min_words: usize,
    pub max_words: usize,
    pub min_avg_word_len: f64,
    pub max_avg_word_len: f64,
    pub max_symbol_word_ratio: f64,
    pub min_alpha_word_frac: f64,
    pub max_bullet_frac: f64,
    pub max_ellipsis_frac: f64,

    pub c4_min_line_words: usize,
    pub short_sentence_len: usize,
    pub max_short_sentence_frac: f64,
    pub max_dup_char_frac: f64,
    pub max_newline_word_ratio: f64,

    pub bullet_prefixes: Vec<char>,
    pub ellipsis_suffixes: Vec<String>,
    pub policy_phrases: Vec<String>,
    pub badword_path: Option<PathBuf>,
    pub sensitive_path: Option<PathBuf>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        let dup = [0.15, 0.14, 0.13, 0.12, 0.11, 0.10]
            .iter()
            .zip(5..)
            .map(|(&max_frac, n)| NgramThreshold { n, max_frac })
            .collect();
        Self {
            top_ngram_max_frac: vec![
                NgramThreshold { n: 2, max_frac: 0.20 },
                NgramThreshold { n: 3, max_frac: 0.18 },
                NgramThreshold { n: 4, max_frac: 0.16 },
            ],
            dup_ngram_max_frac: dup,
            dup_sentence_char_max_frac: 0.20,
            dup_sentence_max_frac: 0.30,
            dup_paragraph_max_frac: 0.30,
            min_words: 50,
            max_words: 10_000,
            min_avg_word_len: 2.0,
            max_avg_word_len: 10.0,
            max_symbol_word_ratio: 0.1,
            min_alpha_word_frac: 0.80,
            max_bullet_frac: 0.90,
            max_ellipsis_frac: 0.30,
            c4_min_line_words: 3,
            short_sentence_len: 30,
            max_short_sentence_frac: 0.67,
            max_dup_char_frac: 0.01,
            max_newline_word_ratio: 0.3,
            bullet_prefixes: vec!['•', '-', '*', '‣', '·'],
            ellipsis_suffixes: vec!["...".into(), "…".into()],
            policy_phrases: [
                "terms of use",
                "privacy policy",
                "cookie policy",
                "uses cookies",
                "use of cookie",
                "use cookie",
            ]
            .map(String::from)
            .to_vec(),
            badword_path: None,
            sensitive_path: None,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let fracs = [
            ("dup_sentence_char_max_frac", self.dup_sentence_char_max_frac),
            ("dup_sentence_max_frac", self.dup_sentence_max_frac),
            ("dup_paragraph_max_frac", self.dup_paragraph_max_frac),
            ("max_symbol_word_ratio", self.max_symbol_word_ratio),
            ("min_alpha_word_frac", self.min_alpha_word_frac),
            ("max_bullet_frac", self.max_bullet_frac),
            ("max_ellipsis_frac", self.max_ellipsis_frac),
            ("max_short_sentence_frac", self.max_short_sentence_frac),
            ("max_dup_char_frac", self.max_dup_char_frac),
            ("max_newline_word_ratio", self.max_newline_word_ratio),
        ];
        for (name, v) in fracs {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} = {v} is outside [0, 1]"));
            }
        }
        for t in self.top_ngram_max_frac.iter().chain(&self.dup_ngram_max_frac) {
            if !(0.0..=1.0).contains(&t.max_frac) {
                return bad(format!("{}-gram threshold {} is outside [0, 1]", t.n, t.max_frac));
            }
        }
        if self.top_ngram_max_frac.iter().any(|t| t.n < 2) {
            return bad("top n-gram rules need n >= 2".into());
        }
        if self.dup_ngram_max_frac.iter().any(|t| t.n < 1) {
            return bad("duplicate n-gram rules need n >= 1".into());
        }
        if self.min_words >= self.max_words {
            return bad(format!("min_words {} must be below max_words {}", self.min_words, self.max_words));
        }
        if self.min_avg_word_len >= self.max_avg_word_len {
            return bad("min_avg_word_len must be below max_avg_word_len".into());
        }
        if self.ellipsis_suffixes.iter().any(String::is_empty) {
            return bad("empty ellipsis suffix".into());
        }
        Ok(())
    }
}

/// A term list: UTF-8, one term per line, `#` comments and blank lines
/// ignored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermList {
    terms: Vec<String>,
}

impl TermList {
    pub fn new(terms: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { terms: terms.into_iter().map(Into::into).filter(|t: &String| !t.is_empty()).collect() }
    }

    pub fn parse(data: &str) -> Self {
        Self::new(
            data.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let data = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&data))
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_published_thresholds() {
        let c = FilterConfig::default();
        let top: Vec<f64> = c.top_ngram_max_frac.iter().map(|t| t.max_frac).collect();
        assert_eq!(top, vec![0.20, 0.18, 0.16]);
        let dup: Vec<(usize, f64)> = c.dup_ngram_max_frac.iter().map(|t| (t.n, t.max_frac)).collect();
        assert_eq!(dup, vec![(5, 0.15), (6, 0.14), (7, 0.13), (8, 0.12), (9, 0.11), (10, 0.10)]);
        assert_eq!((c.min_words, c.max_words), (50, 10_000));
        assert_eq!(c.short_sentence_len, 30);
        c.validate().unwrap();
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut c = FilterConfig { max_dup_char_frac: 1.5, ..Default::default() };
        assert!(c.validate().is_err());
        c = FilterConfig { min_words: 20_000, ..Default::default() };
        assert!(c.validate().is_err());
        c = FilterConfig { min_avg_word_len: 12.0, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn toml_roundtrip() {
        let c = FilterConfig::default();
        let s = toml::to_string(&c).unwrap();
        let back: FilterConfig = toml::from_str(&s).unwrap();
        assert_eq!(c, back);
        let partial: FilterConfig = toml::from_str("min_words = 10").unwrap();
        assert_eq!(partial.min_words, 10);
        assert_eq!(partial.max_words, 10_000);
    }

    #[test]
    fn term_list_parsing() {
        let t = TermList::parse("# comment\nfoo\n\n  bar  \n#baz\n");
        assert_eq!(t.terms(), &["foo".to_string(), "bar".to_string()]);
    }
}
