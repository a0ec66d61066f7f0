use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{MergeRule, TokenId, Tokenizer, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Final size including the 256 byte tokens, excluding specials.
    pub target_size: usize,
    /// A pair must occur at least this often to be merged.
    pub min_pair_count: u64,
    /// Appended after training.
    pub specials: Vec<String>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { target_size: 15_000, min_pair_count: 1, specials: vec!["<|endoftext|>".into()] }
    }
}

impl TrainConfig {
    pub fn with_target(target_size: usize) -> Self {
        Self { target_size, specials: Vec::new(), ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.target_size <= 256 {
            return Err(Error::Config(format!("target_size {} must exceed 256", self.target_size)));
        }
        if self.min_pair_count == 0 {
            return Err(Error::Config("min_pair_count must be at least 1".into()));
        }
        Ok(())
    }
}

type Pair = (TokenId, TokenId);

/// Heap entry ordered by count, then by the smaller left token bytes, then
/// the smaller right token bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Candidate {
    count: u64,
    left: Arc<[u8]>,
    right: Arc<[u8]>,
    pair: Pair,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| other.left.cmp(&self.left))
            .then_with(|| other.right.cmp(&self.right))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NONE: u32 = u32::MAX;

struct State {
    tok: Vec<TokenId>,
    prev: Vec<u32>,
    next: Vec<u32>,
    counts: HashMap<Pair, u64>,
    positions: HashMap<Pair, Vec<u32>>,
    bytes: Vec<Arc<[u8]>>,
    heap: BinaryHeap<Candidate>,
}

impl State {
    fn candidate(&self, pair: Pair, count: u64) -> Candidate {
        Candidate {
            count,
            left: self.bytes[pair.0 as usize].clone(),
            right: self.bytes[pair.1 as usize].clone(),
            pair,
        }
    }

    fn dec(&mut self, pair: Pair) {
        if let Some(c) = self.counts.get_mut(&pair) {
            *c -= 1;
        }
    }

    fn inc(&mut self, pair: Pair, pos: u32, dirty: &mut Vec<Pair>) {
        *self.counts.entry(pair).or_insert(0) += 1;
        self.positions.entry(pair).or_default().push(pos);
        dirty.push(pair);
    }

    fn pop_best(&mut self) -> Option<(Pair, u64)> {
        while let Some(top) = self.heap.pop() {
            let actual = self.counts.get(&top.pair).copied().unwrap_or(0);
            if actual == top.count {
                return Some((top.pair, actual));
            }
            if actual > 0 && actual < top.count {
                self.heap.push(Candidate { count: actual, ..top });
            }
        }
        None
    }

    /// Merge every non-overlapping occurrence of `pair`, left to right.
    fn apply(&mut self, pair: Pair, new_id: TokenId) {
        let mut pos = self.positions.remove(&pair).unwrap_or_default();
        pos.sort_unstable();
        pos.dedup();
        let mut dirty = Vec::new();
        for i in pos {
            let iu = i as usize;
            let j = self.next[iu];
            if self.tok[iu] != pair.0 || j == NONE || self.tok[j as usize] != pair.1 {
                continue;
            }
            let p = self.prev[iu];
            let q = self.next[j as usize];
            if p != NONE {
                self.dec((self.tok[p as usize], pair.0));
            }
            self.dec(pair);
            if q != NONE {
                self.dec((pair.1, self.tok[q as usize]));
            }
            self.tok[iu] = new_id;
            self.tok[j as usize] = NONE;
            self.next[iu] = q;
            if q != NONE {
                self.prev[q as usize] = i;
            }
            if p != NONE {
                self.inc((self.tok[p as usize], new_id), p, &mut dirty);
            }
            if q != NONE {
                self.inc((new_id, self.tok[q as usize]), i, &mut dirty);
            }
        }
        self.counts.remove(&pair);
        dirty.sort_unstable();
        dirty.dedup();
        for d in dirty {
            let c = self.counts[&d];
            if c > 0 {
                let cand = self.candidate(d, c);
                self.heap.push(cand);
            }
        }
    }
}

/// Train a byte-level BPE tokenizer. Pairs never span document boundaries.
///
/// Ties between equally frequent pairs go to the lexicographically smaller
/// left token bytes, then right token bytes.
pub fn train_bpe<T: AsRef<str> + Sync>(corpus: &[T], config: &TrainConfig) -> Result<Tokenizer> {
    config.validate()?;
    let total: usize = corpus.iter().map(|d| d.as_ref().len()).sum();
    if total == 0 {
        return Err(Error::EmptyCorpus);
    }
    if total >= NONE as usize {
        return Err(Error::Config("corpus exceeds 4 GiB".into()));
    }
    let mut tok = Vec::with_capacity(total);
    let mut prev = Vec::with_capacity(total);
    let mut next = Vec::with_capacity(total);
    for doc in corpus {
        let bytes = doc.as_ref().as_bytes();
        let start = tok.len() as u32;
        for (k, &b) in bytes.iter().enumerate() {
            let i = start + k as u32;
            tok.push(b as TokenId);
            prev.push(if k == 0 { NONE } else { i - 1 });
            next.push(if k + 1 == bytes.len() { NONE } else { i + 1 });
        }
    }

    // Initial pair statistics, counted per shard and merged.
    let shards: Vec<(usize, usize)> = {
        let step = total.div_ceil(rayon::current_num_threads().max(1) * 4).max(1 << 16);
        (0..total).step_by(step).map(|s| (s, (s + step).min(total))).collect()
    };
    let partial: Vec<HashMap<Pair, Vec<u32>>> = shards
        .par_iter()
        .map(|&(s, e)| {
            let mut m: HashMap<Pair, Vec<u32>> = HashMap::new();
            for i in s..e {
                let j = next[i];
                if j != NONE {
                    m.entry((tok[i], tok[j as usize])).or_default().push(i as u32);
                }
            }
            m
        })
        .collect();
    let mut positions: HashMap<Pair, Vec<u32>> = HashMap::new();
    for m in partial {
        for (k, mut v) in m {
            positions.entry(k).or_default().append(&mut v);
        }
    }
    let counts: HashMap<Pair, u64> = positions.iter().map(|(k, v)| (*k, v.len() as u64)).collect();

    let mut vocab = Vocabulary::byte_level();
    let bytes: Vec<Arc<[u8]>> = (0..=255u8).map(|b| Arc::from(vec![b])).collect();
    let mut st = State { tok, prev, next, counts, positions, bytes, heap: BinaryHeap::new() };
    let init: Vec<Candidate> = st.counts.iter().map(|(&p, &c)| st.candidate(p, c)).collect();
    st.heap = BinaryHeap::from(init);

    let mut merges = Vec::new();
    while vocab.len() < config.target_size {
        let Some((pair, count)) = st.pop_best() else { break };
        if count < config.min_pair_count {
            break;
        }
        let mut joined = st.bytes[pair.0 as usize].to_vec();
        joined.extend_from_slice(&st.bytes[pair.1 as usize]);
        let new_id = vocab.add_token(&joined);
        debug_assert_eq!(new_id as usize, st.bytes.len());
        st.bytes.push(Arc::from(joined));
        merges.push(MergeRule { rank: merges.len() as u32, left: pair.0, right: pair.1, result: new_id });
        st.apply(pair, new_id);
    }
    for s in &config.specials {
        vocab.add_special(s);
    }
    Tokenizer::new(vocab, merges)
}

/// Straightforward trainer that recounts every pair after each merge. Used
/// to check [`train_bpe`]; quadratic, only for small corpora.
pub fn train_bpe_reference<T: AsRef<str>>(corpus: &[T], config: &TrainConfig) -> Result<Tokenizer> {
    config.validate()?;
    let mut docs: Vec<Vec<TokenId>> =
        corpus.iter().map(|d| d.as_ref().bytes().map(TokenId::from).collect()).collect();
    if docs.iter().all(Vec::is_empty) {
        return Err(Error::EmptyCorpus);
    }
    let mut vocab = Vocabulary::byte_level();
    let mut merges = Vec::new();
    while vocab.len() < config.target_size {
        let mut counts: BTreeMap<Pair, u64> = BTreeMap::new();
        for d in &docs {
            for w in d.windows(2) {
                *counts.entry((w[0], w[1])).or_default() += 1;
            }
        }
        let tok = |id: TokenId| vocab.token(id).unwrap();
        let best = counts.iter().max_by(|(a, ca), (b, cb)| {
            ca.cmp(cb).then_with(|| tok(b.0).cmp(tok(a.0))).then_with(|| tok(b.1).cmp(tok(a.1)))
        });
        let Some((&pair, &count)) = best else { break };
        if count < config.min_pair_count {
            break;
        }
        let mut joined = tok(pair.0).to_vec();
        joined.extend_from_slice(tok(pair.1));
        let new_id = vocab.add_token(&joined);
        merges.push(MergeRule { rank: merges.len() as u32, left: pair.0, right: pair.1, result: new_id });
        for d in &mut docs {
            let mut out = Vec::with_capacity(d.len());
            let mut i = 0;
            while i < d.len() {
                if i + 1 < d.len() && (d[i], d[i + 1]) == pair {
                    out.push(new_id);
                    i += 2;
                } else {
                    out.push(d[i]);
                    i += 1;
                }
            }
            *d = out;
        }
    }
    for s in &config.specials {
        vocab.add_special(s);
    }
    Tokenizer::new(vocab, merges)
}
