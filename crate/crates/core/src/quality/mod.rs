//! Heuristic quality filters: Gopher repetition, Gopher quality, C4, FineWeb
//! and sensitive-term filtering, run as one chain.
//!
//! Every comparison is strict: a document sitting exactly on a threshold is
//! kept. Each filter records all of its measurements, prefixed with the
//! filter family, whether or not the document survives.

mod config;
pub mod metrics;

use std::collections::BTreeMap;

pub use config::{FilterConfig, NgramThreshold, TermList};
pub use metrics::Analysis;

use crate::error::Result;
use crate::outcome::{FilterOutcome, Verdict};
use crate::script;

pub const JAVASCRIPT_MARKER: &str = "Javascript";

/// Config plus loaded term lists; immutable once built and shared across
/// workers.
#[derive(Debug, Clone, Default)]
pub struct QualityFilter {
    pub config: FilterConfig,
    pub badwords: TermList,
    pub sensitive: TermList,
}

impl QualityFilter {
    pub fn new(config: FilterConfig) -> Result<Self> {
        config.validate()?;
        let badwords = TermList::load_optional(config.badword_path.as_deref())?;
        let sensitive = TermList::load_optional(config.sensitive_path.as_deref())?;
        Ok(Self { config, badwords, sensitive })
    }

    pub fn with_terms(config: FilterConfig, badwords: TermList, sensitive: TermList) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, badwords, sensitive })
    }

    pub fn run(&self, text: &str) -> ChainOutcome {
        run_quality_chain(text, self)
    }
}

struct Recorder {
    prefix: &'static str,
    values: BTreeMap<String, f64>,
    failed: Option<String>,
}

impl Recorder {
    fn new(prefix: &'static str) -> Self {
        Self { prefix, values: BTreeMap::new(), failed: None }
    }

    fn record(&mut self, name: &str, value: f64) {
        self.values.insert(format!("{}.{name}", self.prefix), value);
    }

    /// Records `value` and marks the first failing rule.
    fn check(&mut self, name: &str, value: f64, fails: bool, reason: impl FnOnce() -> String) {
        self.record(name, value);
        if fails && self.failed.is_none() {
            self.failed = Some(reason());
        }
    }

    fn finish(self) -> FilterOutcome {
        match self.failed {
            Some(r) => FilterOutcome::removed(r, self.values),
            None => FilterOutcome::kept(self.values),
        }
    }
}

/// Rules, in evaluation order: duplicate sentences, duplicate paragraphs,
/// characters in duplicate sentences, top n-gram share (n = 2..4), then
/// all-repeated n-gram share (n = 5..10).
pub fn gopher_repetition(text: &str, cfg: &FilterConfig) -> FilterOutcome {
    gopher_repetition_of(&Analysis::new(text), cfg)
}

pub fn gopher_repetition_of(a: &Analysis<'_>, cfg: &FilterConfig) -> FilterOutcome {
    let mut r = Recorder::new("gopher_rep");
    let v = metrics::dup_sentence_fraction(a);
    r.check("dup_sentence_frac", v, v > cfg.dup_sentence_max_frac, || "gopher.dup_sentence_frac".into());
    let v = metrics::dup_paragraph_fraction(a);
    r.check("dup_paragraph_frac", v, v > cfg.dup_paragraph_max_frac, || "gopher.dup_paragraph_frac".into());
    let v = metrics::dup_sentence_char_fraction(a);
    r.check("dup_sentence_char_frac", v, v > cfg.dup_sentence_char_max_frac, || {
        "gopher.dup_sentence_char_frac".into()
    });
    for t in &cfg.top_ngram_max_frac {
        let v = metrics::top_ngram_char_fraction_of(a, t.n);
        r.check(&format!("top_{}gram_char_frac", t.n), v, v > t.max_frac, || format!("gopher.top_{}gram", t.n));
    }
    for t in &cfg.dup_ngram_max_frac {
        let v = metrics::dup_ngram_char_fraction_of(a, t.n);
        r.check(&format!("dup_{}gram_char_frac", t.n), v, v > t.max_frac, || format!("gopher.dup_{}gram", t.n));
    }
    r.finish()
}

pub fn gopher_quality(text: &str, cfg: &FilterConfig) -> FilterOutcome {
    gopher_quality_of(&Analysis::new(text), cfg)
}

pub fn gopher_quality_of(a: &Analysis<'_>, cfg: &FilterConfig) -> FilterOutcome {
    let mut r = Recorder::new("gopher_quality");
    let n = a.word_count();
    r.check("word_count", n as f64, n < cfg.min_words, || "gopher.too_few_words".into());
    r.check("word_count", n as f64, n > cfg.max_words, || "gopher.too_many_words".into());
    let v = metrics::mean_word_len(a);
    r.check("avg_word_len", v, v < cfg.min_avg_word_len, || "gopher.avg_word_len_low".into());
    r.check("avg_word_len", v, v > cfg.max_avg_word_len, || "gopher.avg_word_len_high".into());
    let v = metrics::symbol_word_ratio(a, &cfg.ellipsis_suffixes);
    r.check("symbol_word_ratio", v, v > cfg.max_symbol_word_ratio, || "gopher.symbol_ratio".into());
    let v = metrics::alpha_word_fraction(a);
    r.check("alpha_word_frac", v, v < cfg.min_alpha_word_frac, || "gopher.alpha_words".into());
    let v = metrics::bullet_sentence_fraction(a, &cfg.bullet_prefixes);
    r.check("bullet_frac", v, v > cfg.max_bullet_frac, || "gopher.bullet_frac".into());
    let v = metrics::ellipsis_sentence_fraction(a, &cfg.ellipsis_suffixes);
    r.check("ellipsis_frac", v, v > cfg.max_ellipsis_frac, || "gopher.ellipsis_frac".into());
    r.finish()
}

fn has_citation_marker(text: &str) -> bool {
    let b = text.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'[' {
            let mut j = i + 1;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            if j > i + 1 && j < b.len() && b[j] == b']' {
                return true;
            }
            i = j.max(i + 1);
        } else {
            i += 1;
        }
    }
    false
}

fn has_badword(text: &str, words: &[&str], badwords: &TermList) -> Option<String> {
    if badwords.is_empty() {
        return None;
    }
    let lower_words: std::collections::HashSet<String> = words.iter().map(|w| w.to_lowercase()).collect();
    let lower_text = text.to_lowercase();
    badwords
        .terms()
        .iter()
        .find(|term| {
            let t = term.to_lowercase();
            if t.chars().any(script::is_word_delimiter) {
                lower_text.contains(&t)
            } else {
                lower_words.contains(&t)
            }
        })
        .cloned()
}

/// Page-level C4 rules, then line-level cleanup. Returns the rewritten text
/// when lines were dropped.
pub fn c4_filter(text: &str, cfg: &FilterConfig, badwords: &TermList) -> (FilterOutcome, Option<String>) {
    let mut m = BTreeMap::new();
    let words = script::words(text);
    let lines: Vec<&str> = text.split('\n').collect();
    m.insert("c4.lines".to_string(), lines.len() as f64);

    let page_reason = if let Some(term) = has_badword(text, &words, badwords) {
        Some(("c4.badword", Some(term)))
    } else if text.to_lowercase().contains("lorem ipsum") {
        Some(("c4.lorem_ipsum", None))
    } else if text.contains(['{', '}']) {
        Some(("c4.curly_brace", None))
    } else if has_citation_marker(text) {
        Some(("c4.citation", None))
    } else {
        None
    };
    if let Some((reason, detail)) = page_reason {
        m.insert("c4.lines_dropped".to_string(), 0.0);
        let out = FilterOutcome::removed(reason, m);
        return (match detail {
            Some(d) => out.with_detail(d),
            None => out,
        }, None);
    }

    let policy: Vec<String> = cfg.policy_phrases.iter().map(|p| p.to_lowercase()).collect();
    let mut kept = Vec::with_capacity(lines.len());
    let mut dropped = 0usize;
    for line in &lines {
        if line.trim().is_empty() {
            kept.push(*line);
            continue;
        }
        let lower = line.to_lowercase();
        let drop = line.contains(JAVASCRIPT_MARKER)
            || policy.iter().any(|p| lower.contains(p.as_str()))
            || script::split_words(line).len() < cfg.c4_min_line_words;
        if drop {
            dropped += 1;
        } else {
            kept.push(*line);
        }
    }
    m.insert("c4.lines_dropped".to_string(), dropped as f64);
    if kept.iter().all(|l| l.trim().is_empty()) {
        return (FilterOutcome::removed("c4.empty", m), None);
    }
    if dropped == 0 {
        return (FilterOutcome::kept(m), None);
    }
    let rewritten = kept.join("\n");
    let outcome = FilterOutcome { verdict: Verdict::Transformed { lines_dropped: dropped }, measurements: m, detail: None };
    (outcome, Some(rewritten))
}

pub fn fineweb_filter(text: &str, cfg: &FilterConfig) -> FilterOutcome {
    fineweb_filter_of(&Analysis::new(text), cfg)
}

pub fn fineweb_filter_of(a: &Analysis<'_>, cfg: &FilterConfig) -> FilterOutcome {
    let mut r = Recorder::new("fineweb");
    let v = metrics::short_sentence_fraction(a, cfg.short_sentence_len);
    r.check("short_sentence_frac", v, v > cfg.max_short_sentence_frac, || "fineweb.short_sentence_frac".into());
    let v = metrics::dup_line_char_fraction(a);
    r.check("dup_line_char_frac", v, v > cfg.max_dup_char_frac, || "fineweb.dup_line_chars".into());
    let v = metrics::newline_word_ratio(a);
    r.check("newline_word_ratio", v, v > cfg.max_newline_word_ratio, || "fineweb.newline_ratio".into());
    r.finish()
}

/// Removes the document if any term occurs as a substring. The first
/// matching term, in list order, is reported.
pub fn sensitive_filter(text: &str, terms: &TermList) -> FilterOutcome {
    let hit = terms.terms().iter().position(|t| text.contains(t.as_str()));
    let mut m = BTreeMap::new();
    m.insert("sensitive.terms_checked".to_string(), terms.terms().len() as f64);
    match hit {
        Some(i) => {
            m.insert("sensitive.term_index".to_string(), i as f64);
            FilterOutcome::removed("sensitive.term", m).with_detail(terms.terms()[i].clone())
        }
        None => FilterOutcome::kept(m),
    }
}

/// Aggregated chain verdict and, when C4 dropped lines, the surviving text.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutcome {
    pub outcome: FilterOutcome,
    pub text: Option<String>,
}

/// Gopher repetition, Gopher quality, C4, FineWeb, sensitive terms; stops
/// at the first removal. Filters after C4 see the rewritten text.
pub fn run_quality_chain(text: &str, filter: &QualityFilter) -> ChainOutcome {
    let cfg = &filter.config;
    let mut measurements = BTreeMap::new();
    let finish = |out: FilterOutcome, mut measurements: BTreeMap<String, f64>, verdict: Option<Verdict>, text| {
        measurements.extend(out.measurements);
        ChainOutcome {
            outcome: FilterOutcome { verdict: verdict.unwrap_or(out.verdict), measurements, detail: out.detail },
            text,
        }
    };

    let a = Analysis::new(text);
    for step in [gopher_repetition_of(&a, cfg), gopher_quality_of(&a, cfg)] {
        if step.is_removed() {
            return finish(step, measurements, None, None);
        }
        measurements.extend(step.measurements);
    }

    let (c4, rewritten) = c4_filter(text, cfg, &filter.badwords);
    if c4.is_removed() {
        return finish(c4, measurements, None, None);
    }
    let transformed = matches!(c4.verdict, Verdict::Transformed { .. }).then(|| c4.verdict.clone());
    measurements.extend(c4.measurements);

    let current = rewritten.as_deref().unwrap_or(text);
    let fw = fineweb_filter(current, cfg);
    if fw.is_removed() {
        return finish(fw, measurements, None, None);
    }
    measurements.extend(fw.measurements);

    let sens = sensitive_filter(current, &filter.sensitive);
    if sens.is_removed() {
        return finish(sens, measurements, None, None);
    }
    finish(sens, measurements, transformed, rewritten)
}

#[cfg(test)]
mod tests;
