//! Brute-force reference implementations shared by the integration tests.
//!
//! Everything here is deliberately quadratic and written without reusing
//! the library's own bookkeeping, so agreement with the fast paths means
//! something.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rand::Rng;

/// Distinct lowercase ASCII words of `len` letters, indexed from `offset`.
pub fn filler(count: usize, offset: usize, len: usize) -> Vec<String> {
    (offset..offset + count)
        .map(|i| {
            let mut w = String::new();
            let mut x = i;
            for _ in 0..len {
                w.push((b'a' + (x % 26) as u8) as char);
                x /= 26;
            }
            w
        })
        .collect()
}

fn clen(s: &str) -> usize {
    s.chars().count()
}

/// Top n-gram character share: for each window, count equal windows by
/// direct comparison. Ties go to more characters, then earlier position.
pub fn top_ngram_oracle(words: &[&str], char_len: usize, n: usize) -> f64 {
    if n == 0 || words.len() < n || char_len == 0 {
        return 0.0;
    }
    let windows = words.len() - n + 1;
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..windows {
        let first = (0..=i).find(|&j| words[j..j + n] == words[i..i + n]).unwrap();
        if first != i {
            continue;
        }
        let count = (0..windows).filter(|&j| words[j..j + n] == words[i..i + n]).count();
        if count < 2 {
            continue;
        }
        let chars: usize = words[i..i + n].iter().map(|w| clen(w)).sum();
        let better = match best {
            None => true,
            Some((c, ch, _)) => count > c || (count == c && chars > ch),
        };
        if better {
            best = Some((count, chars, i));
        }
    }
    best.map_or(0.0, |(c, ch, _)| (c * ch) as f64 / char_len as f64)
}

/// Share of characters in words covered by some repeated n-gram window.
pub fn dup_ngram_oracle(words: &[&str], char_len: usize, n: usize) -> f64 {
    if n == 0 || words.len() < n || char_len == 0 {
        return 0.0;
    }
    let windows = words.len() - n + 1;
    let mut covered = 0;
    for (k, w) in words.iter().enumerate() {
        let lo = k.saturating_sub(n - 1);
        let hi = k.min(windows - 1);
        let hit = (lo..=hi).any(|i| (0..windows).any(|j| j != i && words[j..j + n] == words[i..i + n]));
        if hit {
            covered += clen(w);
        }
    }
    covered as f64 / char_len as f64
}

/// (count, chars) of items equal to some earlier item.
pub fn repeats_oracle(items: &[&str]) -> (usize, usize) {
    let mut count = 0;
    let mut chars = 0;
    for k in 0..items.len() {
        if (0..k).any(|j| items[j] == items[k]) {
            count += 1;
            chars += clen(items[k]);
        }
    }
    (count, chars)
}

pub fn frac(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs());
    scale == 0.0 || (a - b).abs() <= tol * scale
}

/// Shingle sets built by slicing the whitespace/punctuation word list.
pub fn shingle_set(words: &[&str], k: usize) -> HashSet<String> {
    if words.is_empty() {
        return HashSet::new();
    }
    if words.len() < k {
        return HashSet::from([words.join(" ")]);
    }
    (0..=words.len() - k).map(|i| words[i..i + k].join(" ")).collect()
}

pub fn jaccard(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.iter().filter(|x| b.contains(*x)).count();
    inter as f64 / (a.len() + b.len() - inter) as f64
}

/// Random lowercase token of `len` letters.
pub fn token(rng: &mut impl Rng, len: usize) -> String {
    (0..len).map(|_| rng.random_range(b'a'..=b'z') as char).collect()
}

/// Breadth-first reachability over `edges`, following only nodes for which
/// `allowed` holds.
pub fn reachable(start: usize, edges: &[Vec<usize>], allowed: impl Fn(usize) -> bool) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &v in &edges[u] {
            if allowed(v) && seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Applies merge rules one at a time, each to every occurrence left to
/// right, in rank order, on a byte-token sequence.
pub fn naive_bpe(bytes: &[u8], merges: &[(Vec<u8>, Vec<u8>)]) -> Vec<Vec<u8>> {
    let mut seq: Vec<Vec<u8>> = bytes.iter().map(|b| vec![*b]).collect();
    let rank: HashMap<(&[u8], &[u8]), usize> =
        merges.iter().enumerate().map(|(i, (l, r))| ((l.as_slice(), r.as_slice()), i)).collect();
    loop {
        let best = seq
            .windows(2)
            .filter_map(|w| rank.get(&(w[0].as_slice(), w[1].as_slice())).copied())
            .min();
        let Some(r) = best else { break };
        let (l, rr) = &merges[r];
        let mut out = Vec::with_capacity(seq.len());
        let mut i = 0;
        while i < seq.len() {
            if i + 1 < seq.len() && &seq[i] == l && &seq[i + 1] == rr {
                out.push([l.as_slice(), rr.as_slice()].concat());
                i += 2;
            } else {
                out.push(seq[i].clone());
                i += 1;
            }
        }
        seq = out;
    }
    seq
}
