//! Deterministic synthetic text used for fixtures, seed profiles and the
//! tokenizer training corpus.
//!
//! Tibetan syllables are assembled from the orthographic slots (prefix,
//! superscript, root, subscript, vowel, suffix, post-suffix), drawn into a
//! Zipf-distributed lexicon of one to three syllable words. The output has
//! no linguistic content; it only reproduces the script statistics the
//! filters and the BPE trainer care about.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use crate::script::{SHAD, TSHEG};

const ROOTS: &[char] = &[
    'ཀ', 'ཁ', 'ག', 'ང', 'ཅ', 'ཆ', 'ཇ', 'ཉ', 'ཏ', 'ཐ', 'ད', 'ན', 'པ', 'ཕ', 'བ', 'མ', 'ཙ', 'ཚ', 'ཛ', 'ཝ',
    'ཞ', 'ཟ', 'འ', 'ཡ', 'ར', 'ལ', 'ཤ', 'ས', 'ཧ', 'ཨ',
];
const PREFIXES: &[char] = &['ག', 'ད', 'བ', 'མ', 'འ'];
const SUPERSCRIPTS: &[char] = &['ར', 'ལ', 'ས'];
const SUBSCRIPTS: &[char] = &['\u{0FB1}', '\u{0FB2}', '\u{0FB3}', '\u{0FAD}'];
const VOWELS: &[char] = &['\u{0F72}', '\u{0F74}', '\u{0F7A}', '\u{0F7C}'];
const SUFFIXES: &[char] = &['ག', 'ང', 'ད', 'ན', 'བ', 'མ', 'འ', 'ར', 'ལ', 'ས'];

/// Roots that take a superscript in ordinary orthography.
const STACKABLE: &[char] = &['ཀ', 'ག', 'ང', 'ཇ', 'ཉ', 'ཏ', 'ད', 'ན', 'བ', 'མ', 'ཙ', 'ཛ'];

fn subjoined(root: char) -> char {
    char::from_u32(root as u32 + 0x50).expect("subjoined form exists for stackable roots")
}

fn syllable(rng: &mut impl Rng) -> String {
    let mut s = String::new();
    if rng.random_bool(0.25) {
        s.push(*PREFIXES.choose(rng).unwrap());
    }
    if rng.random_bool(0.2) {
        s.push(*SUPERSCRIPTS.choose(rng).unwrap());
        s.push(subjoined(*STACKABLE.choose(rng).unwrap()));
    } else {
        s.push(*ROOTS.choose(rng).unwrap());
        if rng.random_bool(0.2) {
            s.push(*SUBSCRIPTS.choose(rng).unwrap());
        }
    }
    if rng.random_bool(0.6) {
        s.push(*VOWELS.choose(rng).unwrap());
    }
    if rng.random_bool(0.65) {
        s.push(*SUFFIXES.choose(rng).unwrap());
        if rng.random_bool(0.1) {
            s.push('ས');
        }
    }
    s
}

/// A Zipfian lexicon of multi-syllable Tibetan words.
#[derive(Debug, Clone)]
pub struct TibetanLexicon {
    words: Vec<String>,
    zipf: Zipf<f64>,
}

impl TibetanLexicon {
    pub fn new(seed: u64, syllables: usize, words: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inventory: Vec<String> = Vec::with_capacity(syllables);
        let mut seen = std::collections::HashSet::new();
        while inventory.len() < syllables {
            let s = syllable(&mut rng);
            if seen.insert(s.clone()) {
                inventory.push(s);
            }
        }
        let syl_zipf = Zipf::new(syllables as f64, 1.0).unwrap();
        let mut lex = Vec::with_capacity(words);
        let mut seen = std::collections::HashSet::new();
        while lex.len() < words {
            let n = match rng.random_range(0..10) {
                0..=3 => 1,
                4..=7 => 2,
                _ => 3,
            };
            let parts: Vec<&str> = (0..n)
                .map(|_| inventory[syl_zipf.sample(&mut rng) as usize - 1].as_str())
                .collect();
            let w = parts.join(&TSHEG.to_string());
            if seen.insert(w.clone()) {
                lex.push(w);
            }
        }
        Self { zipf: Zipf::new(words as f64, 1.05).unwrap(), words: lex }
    }

    pub fn word(&self, rng: &mut impl Rng) -> &str {
        &self.words[self.zipf.sample(rng) as usize - 1]
    }

    /// One shad-terminated sentence of `min..=max` lexicon words.
    pub fn sentence(&self, rng: &mut impl Rng, min: usize, max: usize) -> String {
        let n = rng.random_range(min..=max);
        let mut s = String::new();
        for i in 0..n {
            if i > 0 {
                s.push(TSHEG);
            }
            s.push_str(self.word(rng));
        }
        s.push(SHAD);
        s
    }

    /// Paragraphs of sentences; sentences separated by a space, paragraphs by
    /// a newline.
    pub fn document(&self, rng: &mut impl Rng, paragraphs: usize) -> String {
        let mut out = String::new();
        for p in 0..paragraphs {
            if p > 0 {
                out.push('\n');
            }
            let n = rng.random_range(3..=7);
            let sents: Vec<String> = (0..n).map(|_| self.sentence(rng, 6, 18)).collect();
            out.push_str(&sents.join(" "));
        }
        out
    }
}

impl Default for TibetanLexicon {
    fn default() -> Self {
        Self::new(0x0B0D, 2500, 12000)
    }
}

/// Roughly `target_bytes` of Tibetan running text, one document per line.
pub fn tibetan_corpus(seed: u64, target_bytes: usize) -> Vec<String> {
    let lex = TibetanLexicon::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::new();
    let mut total = 0;
    while total < target_bytes {
        let paras = rng.random_range(1..=4);
        let d = lex.document(&mut rng, paras).replace('\n', " ");
        total += d.len();
        docs.push(d);
    }
    docs
}

const EN_WORDS: &[&str] = &[
    "the", "of", "and", "to", "in", "is", "that", "for", "it", "as", "was", "with", "be", "by", "on",
    "not", "he", "this", "are", "or", "his", "from", "at", "which", "but", "have", "an", "had",
    "they", "you", "were", "their", "one", "all", "we", "can", "her", "has", "there", "been", "if",
    "more", "when", "will", "would", "who", "so", "no", "people", "time", "world", "year", "water",
    "river", "mountain", "valley", "village", "market", "school", "teacher", "student", "language",
    "history", "culture", "music", "season", "winter", "summer", "morning", "evening", "family",
    "children", "travel", "road", "journey", "weather", "harvest", "barley", "festival", "library",
    "museum", "government", "council", "report", "research", "science", "nature", "animal", "forest",
    "garden", "kitchen", "recipe", "bread", "butter", "tea", "city", "country", "north", "south",
    "small", "large", "early", "late", "new", "old", "long", "short", "bright", "quiet", "simple",
    "careful", "important", "different", "local", "public", "walked", "studied", "wrote", "carried",
    "built", "opened", "listened", "remembered", "explained", "gathered", "described", "returned",
];

/// Plain English prose from a fixed word list.
pub fn english_document(rng: &mut impl Rng, sentences: usize) -> String {
    let mut out = Vec::with_capacity(sentences);
    for _ in 0..sentences {
        let n = rng.random_range(8..=20);
        let mut words: Vec<&str> = (0..n).map(|_| *EN_WORDS.choose(rng).unwrap()).collect();
        let first = words[0];
        let cap = first[..1].to_uppercase() + &first[1..];
        words[0] = "";
        let rest = words[1..].join(" ");
        out.push(format!("{cap} {rest}."));
    }
    out.join(" ")
}

const ZH_CHARS: &str = "的一是在不了有和人这中大为上个国我以要他时来用们生到作地于出就分对成会可主发年动同工也能下过子说产种面而方后多定行学法所民得经十三之进着等部度家电力里如水化高自二理起小物现实加量都两体制机当使点从业本去把性好应开它合还因由其些然前外天政四日那社义事平形相全表间样与关各重新线内数正心反你明看原又么利比或但质气第向道命此变条只没结解问意建月公无系军很情者最立代想已通并提直题党程展五果料象员革位入常文总次品式活设及管特件长求老头基资边流路级少图山统接知较将组见计别她手角期根论运农指几九区强放决西被干做必战先回则任取据处理府研质";

pub fn chinese_document(rng: &mut impl Rng, sentences: usize) -> String {
    let chars: Vec<char> = ZH_CHARS.chars().collect();
    let mut out = String::new();
    for _ in 0..sentences {
        let n = rng.random_range(10..=30);
        for _ in 0..n {
            out.push(*chars.choose(rng).unwrap());
        }
        out.push('。');
    }
    out
}
