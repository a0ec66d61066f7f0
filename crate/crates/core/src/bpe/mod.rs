//! Byte-level BPE: training, vocabulary extension, encoding and compression
//! measurement.
//!
//! There is no pre-tokenization. Every document is a single byte string and
//! merges may span spaces, tshegs and punctuation alike.

mod files;
mod merge;
mod train;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::script::is_tibetan_codepoint;

pub use files::{escape_token, unescape_token};
pub use merge::merge_vocab;
pub use train::{train_bpe, train_bpe_reference, TrainConfig};

pub type TokenId = u32;

/// Dense id space of byte sequences. Special tokens live in the same id
/// space but are looked up by name and never produced by merges.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    tokens: Vec<Vec<u8>>,
    special: Vec<bool>,
    by_bytes: HashMap<Vec<u8>, TokenId>,
    by_special: HashMap<Vec<u8>, TokenId>,
}

impl Vocabulary {
    /// The 256 single-byte tokens, id = byte value.
    pub fn byte_level() -> Self {
        let mut v = Self::default();
        for b in 0..=255u8 {
            v.push(vec![b], false);
        }
        v
    }

    fn push(&mut self, bytes: Vec<u8>, special: bool) -> TokenId {
        let id = self.tokens.len() as TokenId;
        if special {
            self.by_special.insert(bytes.clone(), id);
        } else {
            self.by_bytes.insert(bytes.clone(), id);
        }
        self.tokens.push(bytes);
        self.special.push(special);
        id
    }

    /// Add a regular token, returning the existing id if already present.
    pub fn add_token(&mut self, bytes: &[u8]) -> TokenId {
        match self.by_bytes.get(bytes) {
            Some(&id) => id,
            None => self.push(bytes.to_vec(), false),
        }
    }

    pub fn add_special(&mut self, name: &str) -> TokenId {
        match self.by_special.get(name.as_bytes()) {
            Some(&id) => id,
            None => self.push(name.as_bytes().to_vec(), true),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, id: TokenId) -> Option<&[u8]> {
        self.tokens.get(id as usize).map(Vec::as_slice)
    }

    pub fn id_of(&self, bytes: &[u8]) -> Option<TokenId> {
        self.by_bytes.get(bytes).copied()
    }

    pub fn special_id(&self, name: &str) -> Option<TokenId> {
        self.by_special.get(name.as_bytes()).copied()
    }

    pub fn is_special(&self, id: TokenId) -> bool {
        self.special.get(id as usize).copied().unwrap_or(false)
    }

    pub fn iter(&self) -> impl Iterator<Item = (TokenId, &[u8], bool)> {
        self.tokens.iter().zip(&self.special).enumerate().map(|(i, (t, &s))| (i as TokenId, t.as_slice(), s))
    }

    /// Ids of the single-byte primitives, or `None` if one is missing.
    pub fn byte_ids(&self) -> Option<[TokenId; 256]> {
        let mut ids = [0; 256];
        for (b, slot) in ids.iter_mut().enumerate() {
            *slot = self.id_of(&[b as u8])?;
        }
        Some(ids)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MergeRule {
    pub rank: u32,
    pub left: TokenId,
    pub right: TokenId,
    pub result: TokenId,
}

/// A vocabulary with its ranked merges; the unit that encodes and decodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tokenizer {
    vocab: Vocabulary,
    merges: Vec<MergeRule>,
    ranks: HashMap<(TokenId, TokenId), (u32, TokenId)>,
    byte_ids: [TokenId; 256],
}

impl Tokenizer {
    pub fn byte_level() -> Self {
        Self::new(Vocabulary::byte_level(), Vec::new()).expect("byte vocabulary is complete")
    }

    /// Checks that every merge is consistent with the vocabulary and that
    /// ranks are `0..n` in order.
    pub fn new(vocab: Vocabulary, merges: Vec<MergeRule>) -> Result<Self> {
        let byte_ids =
            vocab.byte_ids().ok_or_else(|| Error::IncompatibleVocab("missing single-byte tokens".into()))?;
        let mut ranks = HashMap::with_capacity(merges.len());
        for (i, m) in merges.iter().enumerate() {
            if m.rank as usize != i {
                return Err(Error::Corrupt(format!("merge {i} has rank {}", m.rank)));
            }
            let get = |id: TokenId| match vocab.token(id) {
                Some(t) if !vocab.is_special(id) => Ok(t),
                _ => Err(Error::UnknownToken(id)),
            };
            let mut joined = get(m.left)?.to_vec();
            joined.extend_from_slice(get(m.right)?);
            if get(m.result)? != joined.as_slice() {
                return Err(Error::Corrupt(format!("merge rank {} result is not left ++ right", m.rank)));
            }
            if ranks.insert((m.left, m.right), (m.rank, m.result)).is_some() {
                return Err(Error::Corrupt(format!("pair ({}, {}) merged twice", m.left, m.right)));
            }
        }
        Ok(Self { vocab, merges, ranks, byte_ids })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn merges(&self) -> &[MergeRule] {
        &self.merges
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn add_special(&mut self, name: &str) -> TokenId {
        self.vocab.add_special(name)
    }

    pub fn special_id(&self, name: &str) -> Option<TokenId> {
        self.vocab.special_id(name)
    }

    pub fn rank_of(&self, left: TokenId, right: TokenId) -> Option<u32> {
        self.ranks.get(&(left, right)).map(|r| r.0)
    }

    /// Text is treated as plain bytes: special-token names inside it are
    /// not recognized.
    pub fn encode(&self, text: &str) -> Vec<TokenId> {
        self.encode_bytes(text.as_bytes())
    }

    /// Repeatedly merge every occurrence of the lowest-ranked adjacent pair,
    /// left to right, until no ranked pair remains.
    pub fn encode_bytes(&self, bytes: &[u8]) -> Vec<TokenId> {
        let n = bytes.len();
        if n < 2 || self.merges.is_empty() {
            return bytes.iter().map(|&b| self.byte_ids[b as usize]).collect();
        }
        const NONE: usize = usize::MAX;
        let mut tok: Vec<TokenId> = bytes.iter().map(|&b| self.byte_ids[b as usize]).collect();
        let mut next: Vec<usize> = (1..=n).collect();
        next[n - 1] = NONE;
        let mut prev: Vec<usize> = (0..n).map(|i| i.wrapping_sub(1)).collect();
        prev[0] = NONE;
        let mut alive = vec![true; n];

        let mut heap: BinaryHeap<Reverse<(u32, usize)>> = BinaryHeap::new();
        for i in 0..n - 1 {
            if let Some(&(rank, _)) = self.ranks.get(&(tok[i], tok[i + 1])) {
                heap.push(Reverse((rank, i)));
            }
        }
        let mut batch = Vec::new();
        while let Some(&Reverse((rank, _))) = heap.peek() {
            batch.clear();
            while let Some(&Reverse((r, pos))) = heap.peek() {
                if r != rank {
                    break;
                }
                heap.pop();
                batch.push(pos);
            }
            let rule = self.merges[rank as usize];
            for &i in &batch {
                let j = next[i];
                if !alive[i] || j == NONE || tok[i] != rule.left || tok[j] != rule.right {
                    continue;
                }
                tok[i] = rule.result;
                alive[j] = false;
                next[i] = next[j];
                if next[j] != NONE {
                    prev[next[j]] = i;
                }
            }
            // New neighbour pairs are only ranked once the whole batch is
            // applied, so a lower-ranked pair created mid-batch cannot jump
            // ahead of the remaining occurrences.
            for &i in &batch {
                if !alive[i] || tok[i] != rule.result {
                    continue;
                }
                let p = prev[i];
                if p != NONE {
                    if let Some(&(r, _)) = self.ranks.get(&(tok[p], tok[i])) {
                        heap.push(Reverse((r, p)));
                    }
                }
                let q = next[i];
                if q != NONE {
                    if let Some(&(r, _)) = self.ranks.get(&(tok[i], tok[q])) {
                        heap.push(Reverse((r, i)));
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(n / 2);
        let mut i = 0;
        while i != NONE {
            out.push(tok[i]);
            i = next[i];
        }
        out
    }

    pub fn encode_batch<T: AsRef<str> + Sync>(&self, texts: &[T]) -> Vec<Vec<TokenId>> {
        texts.par_iter().map(|t| self.encode(t.as_ref())).collect()
    }

    pub fn decode_bytes(&self, ids: &[TokenId]) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for &id in ids {
            out.extend_from_slice(self.vocab.token(id).ok_or(Error::UnknownToken(id))?);
        }
        Ok(out)
    }

    /// Invalid UTF-8 (possible when decoding a partial sequence) becomes
    /// U+FFFD.
    pub fn decode(&self, ids: &[TokenId]) -> Result<String> {
        Ok(String::from_utf8_lossy(&self.decode_bytes(ids)?).into_owned())
    }

    pub fn decode_strict(&self, ids: &[TokenId]) -> Result<String> {
        String::from_utf8(self.decode_bytes(ids)?).map_err(|_| Error::InvalidUtf8)
    }

    /// SHA-256 over the serialized vocabulary and merges.
    pub fn fingerprint(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(self.vocab_text().as_bytes());
        h.update([0u8]);
        h.update(self.merges_text().as_bytes());
        h.finalize().into()
    }

    pub fn compression(&self, text: &str) -> CompressionReport {
        compression_report(self, text)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ScriptCounts {
    pub codepoints: usize,
    pub tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressionReport {
    pub codepoints: usize,
    pub tokens: usize,
    /// Codepoints per token.
    pub ratio: f64,
    /// Keyed by "tibetan" and "other". A token is attributed to the script
    /// of the codepoint its first byte falls in.
    pub per_script: BTreeMap<String, ScriptCounts>,
}

impl CompressionReport {
    pub fn script_ratio(&self, script: &str) -> Option<f64> {
        let c = self.per_script.get(script)?;
        (c.tokens > 0).then(|| c.codepoints as f64 / c.tokens as f64)
    }
}

fn script_name(c: char) -> &'static str {
    if is_tibetan_codepoint(c) {
        "tibetan"
    } else {
        "other"
    }
}

pub fn compression_report(tok: &Tokenizer, text: &str) -> CompressionReport {
    let ids = tok.encode(text);
    let mut per_script: BTreeMap<String, ScriptCounts> = BTreeMap::new();
    // Script of the codepoint owning each byte offset.
    let mut owner: Vec<&'static str> = Vec::with_capacity(text.len());
    for c in text.chars() {
        let s = script_name(c);
        per_script.entry(s.to_string()).or_default().codepoints += 1;
        owner.extend(std::iter::repeat_n(s, c.len_utf8()));
    }
    let mut offset = 0;
    for &id in &ids {
        let s = owner[offset];
        per_script.entry(s.to_string()).or_default().tokens += 1;
        offset += tok.vocab.token(id).map_or(0, <[u8]>::len);
    }
    let codepoints = text.chars().count();
    let tokens = ids.len();
    CompressionReport {
        codepoints,
        tokens,
        ratio: if tokens == 0 { 0.0 } else { codepoints as f64 / tokens as f64 },
        per_script,
    }
}

#[cfg(test)]
mod tests;
