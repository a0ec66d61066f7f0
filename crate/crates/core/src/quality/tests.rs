use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::synth::TibetanLexicon;

fn cfg() -> FilterConfig {
    FilterConfig::default()
}

/// Distinct, purely alphabetic filler words of four letters.
fn filler(count: usize, offset: usize) -> Vec<String> {
    (offset..offset + count)
        .map(|i| {
            let mut w = String::new();
            let mut x = i;
            for _ in 0..4 {
                w.push((b'a' + (x % 26) as u8) as char);
                x /= 26;
            }
            w
        })
        .collect()
}

fn clean_tibetan(seed: u64) -> String {
    let lex = TibetanLexicon::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    lex.document(&mut rng, 4)
}

#[test]
fn sentence_repeated_four_times() {
    let t = "The same sentence again and again. The same sentence again and again. \
             The same sentence again and again. The same sentence again and again.";
    let out = gopher_repetition(t, &cfg());
    assert_eq!(out.reason(), Some("gopher.dup_sentence_frac"));
    assert_eq!(out.measurements["gopher_rep.dup_sentence_frac"], 0.75);
}

#[test]
fn ten_distinct_sentences_kept() {
    let words = filler(60, 0);
    let t: Vec<String> = words.chunks(6).map(|c| format!("{}.", c.join(" "))).collect();
    let out = gopher_repetition(&t.join(" "), &cfg());
    assert_eq!(out.verdict, Verdict::Kept, "{out:?}");
}

#[test]
fn three_gram_at_seventeen_percent_kept() {
    // "xa yb zc" (6 word codepoints) three times; 18 / 106 ≈ 0.1698.
    let mut words: Vec<String> = filler(16, 100);
    for at in [0, 6, 12] {
        words.splice(at..at, ["xa", "yb", "zc"].map(String::from));
    }
    let t = words.join(" ");
    let a = Analysis::new(&t);
    let f = metrics::top_ngram_char_fraction_of(&a, 3);
    assert_eq!(a.char_len, 106);
    assert!((f - 18.0 / 106.0).abs() < 1e-15 && f < 0.18);
    let out = gopher_repetition(&t, &FilterConfig { dup_ngram_max_frac: vec![], ..cfg() });
    assert!(!out.is_removed(), "{out:?}");
}

#[test]
fn word_count_bounds() {
    let few = filler(49, 0).join(" ");
    assert_eq!(gopher_quality(&few, &cfg()).reason(), Some("gopher.too_few_words"));
    let fifty = filler(50, 0).join(" ");
    let out = gopher_quality(&fifty, &cfg());
    assert_eq!(out.verdict, Verdict::Kept);
    assert_eq!(out.measurements["gopher_quality.avg_word_len"], 4.0);
}

/// 80 one-line sentences carrying 100 words, 25 of them ending in "…".
/// Each ellipsis also counts as a symbol, so 25 symbols over 100 words
/// trips the symbol rule (0.25 > 0.1) before the ellipsis rule is reached.
#[test]
fn ellipsis_heavy_document() {
    let build = |words_total: usize| {
        let words = filler(words_total, 0);
        let mut lines: Vec<String> = Vec::new();
        let per = words_total / 80;
        let extra = words_total % 80;
        let mut it = words.into_iter();
        for i in 0..80 {
            let take = per + usize::from(i < extra);
            let mut s = it.by_ref().take(take).collect::<Vec<_>>().join(" ");
            s.push_str(if i < 25 { "…" } else { "." });
            lines.push(s);
        }
        lines.join("\n")
    };
    let hundred = build(100);
    let out = gopher_quality(&hundred, &cfg());
    assert!((out.measurements["gopher_quality.ellipsis_frac"] - 0.3125).abs() < 1e-15);
    assert_eq!(out.reason(), Some("gopher.symbol_ratio"));

    let longer = build(300);
    let out = gopher_quality(&longer, &cfg());
    assert!((out.measurements["gopher_quality.ellipsis_frac"] - 0.3125).abs() < 1e-15);
    assert_eq!(out.reason(), Some("gopher.ellipsis_frac"));
}

#[test]
fn c4_page_rules() {
    let (out, _) = c4_filter("some text here { more words here", &cfg(), &TermList::default());
    assert_eq!(out.reason(), Some("c4.curly_brace"));
    let (out, _) = c4_filter("Lorem Ipsum dolor sit amet", &cfg(), &TermList::default());
    assert_eq!(out.reason(), Some("c4.lorem_ipsum"));
    let (out, _) = c4_filter("as shown before [12] in the study", &cfg(), &TermList::default());
    assert_eq!(out.reason(), Some("c4.citation"));
    let (out, _) = c4_filter("brackets [x] and [] are fine here", &cfg(), &TermList::default());
    assert!(!out.is_removed());
    let bad = TermList::new(["darn"]);
    let (out, _) = c4_filter("well Darn it all to pieces", &cfg(), &bad);
    assert_eq!(out.reason(), Some("c4.badword"));
    assert_eq!(out.detail.as_deref(), Some("darn"));
    let (out, _) = c4_filter("darnation is a different word", &cfg(), &bad);
    assert!(!out.is_removed());
}

#[test]
fn c4_drops_short_lines() {
    let page = "first line has words\ntwo words\nsecond line has words\nalso two\nthird line has words";
    let (out, text) = c4_filter(page, &cfg(), &TermList::default());
    assert_eq!(out.verdict, Verdict::Transformed { lines_dropped: 2 });
    assert_eq!(text.unwrap(), "first line has words\nsecond line has words\nthird line has words");
}

#[test]
fn c4_line_markers() {
    let page = "enable Javascript to view this page\nplease read our Privacy Policy today\nthe javascript word in lowercase stays\nnormal line of text";
    let (out, text) = c4_filter(page, &cfg(), &TermList::default());
    assert_eq!(out.verdict, Verdict::Transformed { lines_dropped: 2 });
    assert_eq!(text.unwrap(), "the javascript word in lowercase stays\nnormal line of text");
    let (out, _) = c4_filter("a b\nc d", &cfg(), &TermList::default());
    assert_eq!(out.reason(), Some("c4.empty"));
}

#[test]
fn c4_keeps_blank_lines() {
    let page = "para one has words\n\npara two has words";
    let (out, text) = c4_filter(page, &cfg(), &TermList::default());
    assert_eq!(out.verdict, Verdict::Kept);
    assert!(text.is_none());
}

#[test]
fn fineweb_short_sentences_at_two_thirds() {
    let long: String = filler(40, 0).join(" ");
    assert_eq!(long.chars().count(), 199);
    let t = format!("abcdefghi.\nabcdefghijk.\n{long}.");
    let a = Analysis::new(&t);
    let lens: Vec<usize> = a.sentences.iter().map(|s| s.chars().count()).collect();
    assert_eq!(lens, vec![10, 12, 200]);
    let out = fineweb_filter(&t, &cfg());
    assert!((out.measurements["fineweb.short_sentence_frac"] - 2.0 / 3.0).abs() < 1e-15);
    assert_ne!(out.reason(), Some("fineweb.short_sentence_frac"));
}

#[test]
fn fineweb_single_line_has_no_newlines() {
    let t = filler(100, 0).join(" ");
    let out = fineweb_filter(&t, &cfg());
    assert_eq!(out.measurements["fineweb.newline_word_ratio"], 0.0);
    assert_ne!(out.reason(), Some("fineweb.newline_ratio"));
}

#[test]
fn sensitive_terms() {
    assert!(!sensitive_filter("anything at all", &TermList::default()).is_removed());
    let out = sensitive_filter("contains X here", &TermList::new(["X"]));
    assert_eq!(out.reason(), Some("sensitive.term"));
    assert_eq!(out.detail.as_deref(), Some("X"));
    assert!(!sensitive_filter("nothing here", &TermList::new(["X"])).is_removed());
}

#[test]
fn chain_reports_first_failing_family() {
    // Too few words for Gopher and all-short sentences for FineWeb.
    let t = "a b.\nc d.\ne f.";
    let out = run_quality_chain(t, &QualityFilter::default());
    assert!(out.outcome.reason().unwrap().starts_with("gopher."));
    assert_eq!(out.outcome.reason(), Some("gopher.too_few_words"));
}

#[test]
fn clean_document_passes_every_family() {
    let t = clean_tibetan(11);
    let out = run_quality_chain(&t, &QualityFilter::default());
    assert_eq!(out.outcome.verdict, Verdict::Kept, "{:?}", out.outcome);
    for group in ["gopher_rep.", "gopher_quality.", "c4.", "fineweb.", "sensitive."] {
        assert!(out.outcome.measurements.keys().any(|k| k.starts_with(group)), "missing {group}");
    }
    assert!(out.text.is_none());
}

#[test]
fn short_lines_only_flaw_is_transformed() {
    let t = format!("{}\nཀ་ཁ\n{}", clean_tibetan(12), clean_tibetan(13));
    let out = run_quality_chain(&t, &QualityFilter::default());
    assert_eq!(out.outcome.verdict, Verdict::Transformed { lines_dropped: 1 }, "{:?}", out.outcome);
    assert!(!out.text.unwrap().contains("\nཀ་ཁ\n"));
}

#[test]
fn sensitive_runs_on_rewritten_text() {
    let t = format!("{}\nbad X\n{}", clean_tibetan(14), clean_tibetan(15));
    let filter = QualityFilter::with_terms(cfg(), TermList::default(), TermList::new(["X"])).unwrap();
    let out = run_quality_chain(&t, &filter);
    assert_eq!(out.outcome.verdict, Verdict::Transformed { lines_dropped: 1 });
}
