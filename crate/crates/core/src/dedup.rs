//! MinHash near-duplicate detection with LSH banding.
//!
//! Documents are reduced to sets of word 5-gram shingles. Each of the
//! `num_hashes` hash functions is a keyed 64-bit hash of the shingle pushed
//! through a per-index odd multiplier and a finalizer, and the signature keeps
//! the minimum of each. Documents sharing any band of `rows_per_band`
//! consecutive minima become candidates; candidates whose estimated Jaccard
//! reaches `confirm_threshold` are joined, and the connected components are
//! the duplicate clusters.

use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_64_with_seed;

use crate::error::{Error, Result};
use crate::io::{read_all, write_atomic, ByteReader};
use crate::script;

const SIDECAR_MAGIC: &[u8; 4] = b"MHSG";
const SIDECAR_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinHashParams {
    pub num_hashes: usize,
    pub bands: usize,
    pub rows_per_band: usize,
    pub shingle_words: usize,
    pub seed: u64,
    pub confirm_threshold: f64,
}

impl Default for MinHashParams {
    fn default() -> Self {
        Self { num_hashes: 112, bands: 14, rows_per_band: 8, shingle_words: 5, seed: 1, confirm_threshold: 0.8 }
    }
}

impl MinHashParams {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_hashes == 0 || self.num_hashes != self.bands * self.rows_per_band {
            return Err(Error::Config(format!(
                "num_hashes ({}) must equal bands ({}) x rows_per_band ({})",
                self.num_hashes, self.bands, self.rows_per_band
            )));
        }
        if self.shingle_words == 0 {
            return Err(Error::Config("shingle_words must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.confirm_threshold) {
            return Err(Error::Config(format!("confirm_threshold {} is outside [0, 1]", self.confirm_threshold)));
        }
        Ok(())
    }

    /// True when `sig` was produced with these parameters.
    pub fn describes(&self, sig: &MinHashSignature) -> bool {
        sig.mins.len() == self.num_hashes && sig.seed == self.seed && sig.shingle_words == self.shingle_words
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinHashSignature {
    pub doc_id: String,
    pub seed: u64,
    pub shingle_words: usize,
    pub mins: Vec<u64>,
}

impl MinHashSignature {
    /// Key of band `b`, or `None` when the signature is too short.
    pub fn band_key(&self, b: usize, rows: usize) -> Option<u64> {
        let rows = self.mins.get(b * rows..(b + 1) * rows)?;
        let mut bytes = Vec::with_capacity(rows.len() * 8);
        for m in rows {
            bytes.extend_from_slice(&m.to_le_bytes());
        }
        Some(xxh3_64_with_seed(&bytes, b as u64))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateCluster {
    /// Positions in the input order, ascending.
    pub members: Vec<usize>,
    pub member_ids: Vec<String>,
    pub representative: usize,
}

/// Contiguous word n-grams joined by a single space. Shorter texts give a
/// single shingle made of all their words.
pub fn shingle(text: &str, params: &MinHashParams) -> HashSet<String> {
    let words = script::words(text);
    let n = params.shingle_words.max(1);
    if words.len() < n {
        let whole = if words.is_empty() { text.trim().to_string() } else { words.join(" ") };
        return HashSet::from([whole]);
    }
    words.windows(n).map(|w| w.join(" ")).collect()
}

fn fmix64(mut k: u64) -> u64 {
    k ^= k >> 33;
    k = k.wrapping_mul(0xff51_afd7_ed55_8ccd);
    k ^= k >> 33;
    k = k.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    k ^ (k >> 33)
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The per-index hash family: `(a_i, b_i)` with every `a_i` odd.
#[derive(Debug, Clone)]
pub struct HashFamily {
    seed: u64,
    coeffs: Vec<(u64, u64)>,
}

impl HashFamily {
    pub fn new(params: &MinHashParams) -> Self {
        let mut state = params.seed;
        let coeffs = (0..params.num_hashes)
            .map(|_| (splitmix64(&mut state) | 1, splitmix64(&mut state)))
            .collect();
        Self { seed: params.seed, coeffs }
    }

    pub fn base(&self, shingle: &str) -> u64 {
        xxh3_64_with_seed(shingle.as_bytes(), self.seed)
    }

    pub fn hash(&self, i: usize, base: u64) -> u64 {
        let (a, b) = self.coeffs[i];
        fmix64(base.wrapping_mul(a).wrapping_add(b))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

fn signature_with(family: &HashFamily, doc_id: &str, text: &str, params: &MinHashParams) -> MinHashSignature {
    let mut mins = vec![u64::MAX; family.len()];
    for sh in shingle(text, params) {
        let base = family.base(&sh);
        for (i, m) in mins.iter_mut().enumerate() {
            *m = (*m).min(family.hash(i, base));
        }
    }
    MinHashSignature { doc_id: doc_id.to_string(), seed: params.seed, shingle_words: params.shingle_words, mins }
}

pub fn compute_signature(doc_id: &str, text: &str, params: &MinHashParams) -> MinHashSignature {
    signature_with(&HashFamily::new(params), doc_id, text, params)
}

/// Signatures for a whole corpus, computed in parallel, in input order.
pub fn compute_signatures<I, T>(docs: &[(I, T)], params: &MinHashParams) -> Vec<MinHashSignature>
where
    I: AsRef<str> + Sync,
    T: AsRef<str> + Sync,
{
    let family = HashFamily::new(params);
    docs.par_iter().map(|(id, text)| signature_with(&family, id.as_ref(), text.as_ref(), params)).collect()
}

pub fn estimate_jaccard(a: &MinHashSignature, b: &MinHashSignature) -> Result<f64> {
    if a.mins.len() != b.mins.len() || a.seed != b.seed || a.shingle_words != b.shingle_words {
        return Err(Error::ParamsMismatch);
    }
    if a.mins.is_empty() {
        return Ok(1.0);
    }
    let agree = a.mins.iter().zip(&b.mins).filter(|(x, y)| x == y).count();
    Ok(agree as f64 / a.mins.len() as f64)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Keeps the smaller index as root so roots are representatives.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Pairs `(i, j)`, `i < j`, that share at least one band.
pub fn candidate_pairs(signatures: &[MinHashSignature], params: &MinHashParams) -> Vec<(usize, usize)> {
    let keys: Vec<Vec<Option<u64>>> = signatures
        .par_iter()
        .map(|s| (0..params.bands).map(|b| s.band_key(b, params.rows_per_band)).collect())
        .collect();
    let mut pairs = HashSet::new();
    for b in 0..params.bands {
        let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
        for (i, k) in keys.iter().enumerate() {
            if let Some(k) = k[b] {
                buckets.entry(k).or_default().push(i);
            }
        }
        for members in buckets.values().filter(|m| m.len() > 1) {
            for (x, &i) in members.iter().enumerate() {
                for &j in &members[x + 1..] {
                    pairs.insert((i, j));
                }
            }
        }
    }
    let mut pairs: Vec<_> = pairs.into_iter().collect();
    pairs.sort_unstable();
    pairs
}

pub fn find_duplicates(signatures: &[MinHashSignature], params: &MinHashParams) -> Result<Vec<DuplicateCluster>> {
    params.validate()?;
    if signatures.iter().any(|s| !params.describes(s)) {
        return Err(Error::ParamsMismatch);
    }

    // Exact signature copies are merged up front so that large groups of
    // identical documents do not blow up the pairwise candidate list.
    let mut uf = UnionFind::new(signatures.len());
    let mut first_seen: HashMap<&[u64], usize> = HashMap::new();
    let mut unique = Vec::new();
    for (i, s) in signatures.iter().enumerate() {
        match first_seen.get(s.mins.as_slice()) {
            Some(&f) => uf.union(f, i),
            None => {
                first_seen.insert(&s.mins, i);
                unique.push(i);
            }
        }
    }
    let unique_sigs: Vec<MinHashSignature> = unique.iter().map(|&i| signatures[i].clone()).collect();
    for (a, b) in candidate_pairs(&unique_sigs, params) {
        if estimate_jaccard(&unique_sigs[a], &unique_sigs[b])? >= params.confirm_threshold {
            uf.union(unique[a], unique[b]);
        }
    }

    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); signatures.len()];
    for i in 0..signatures.len() {
        let r = uf.find(i);
        groups[r].push(i);
    }
    Ok(groups
        .into_iter()
        .filter(|g| g.len() >= 2)
        .map(|members| DuplicateCluster {
            representative: members[0],
            member_ids: members.iter().map(|&i| signatures[i].doc_id.clone()).collect(),
            members,
        })
        .collect())
}

/// Result of deduplicating a corpus: a keep flag per input document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DedupResult {
    pub keep: Vec<bool>,
    pub clusters: Vec<DuplicateCluster>,
}

impl DedupResult {
    pub fn removed(&self) -> usize {
        self.keep.iter().filter(|k| !**k).count()
    }
}

pub fn deduplicate_signatures(signatures: &[MinHashSignature], params: &MinHashParams) -> Result<DedupResult> {
    let clusters = find_duplicates(signatures, params)?;
    let mut keep = vec![true; signatures.len()];
    for c in &clusters {
        for &m in &c.members[1..] {
            keep[m] = false;
        }
    }
    Ok(DedupResult { keep, clusters })
}

/// Ids of the documents to keep, in input order.
pub fn deduplicate<I, T>(corpus: &[(I, T)], params: &MinHashParams) -> Result<Vec<String>>
where
    I: AsRef<str> + Sync,
    T: AsRef<str> + Sync,
{
    params.validate()?;
    let sigs = compute_signatures(corpus, params);
    let res = deduplicate_signatures(&sigs, params)?;
    Ok(corpus.iter().zip(&res.keep).filter(|(_, k)| **k).map(|((id, _), _)| id.as_ref().to_string()).collect())
}

/// Persist signatures so that later runs can dedup against them.
pub fn write_signatures(path: &Path, params: &MinHashParams, sigs: &[MinHashSignature]) -> Result<()> {
    if sigs.iter().any(|s| !params.describes(s)) {
        return Err(Error::ParamsMismatch);
    }
    write_atomic(path, |w| {
        w.write_all(SIDECAR_MAGIC)?;
        w.write_all(&SIDECAR_VERSION.to_le_bytes())?;
        for v in [params.num_hashes, params.bands, params.rows_per_band, params.shingle_words] {
            w.write_all(&(v as u32).to_le_bytes())?;
        }
        w.write_all(&params.seed.to_le_bytes())?;
        w.write_all(&params.confirm_threshold.to_bits().to_le_bytes())?;
        w.write_all(&(sigs.len() as u64).to_le_bytes())?;
        for s in sigs {
            w.write_all(&(s.doc_id.len() as u32).to_le_bytes())?;
            w.write_all(s.doc_id.as_bytes())?;
            for m in &s.mins {
                w.write_all(&m.to_le_bytes())?;
            }
        }
        Ok(())
    })
}

pub fn read_signatures(path: &Path) -> Result<(MinHashParams, Vec<MinHashSignature>)> {
    let buf = read_all(path)?;
    let mut r = ByteReader::new(&buf);
    if r.take(4)? != SIDECAR_MAGIC {
        return Err(Error::Corrupt(format!("{} is not a signature file", path.display())));
    }
    let version = r.u32()?;
    if version != SIDECAR_VERSION {
        return Err(Error::Corrupt(format!("unsupported signature file version {version}")));
    }
    let num_hashes = r.u32()? as usize;
    let bands = r.u32()? as usize;
    let rows_per_band = r.u32()? as usize;
    let shingle_words = r.u32()? as usize;
    let seed = r.u64()?;
    let confirm_threshold = f64::from_bits(r.u64()?);
    let params = MinHashParams { num_hashes, bands, rows_per_band, shingle_words, seed, confirm_threshold };
    params.validate().map_err(|e| Error::Corrupt(e.to_string()))?;
    let count = r.u64()?;
    let mut sigs = Vec::new();
    for _ in 0..count {
        let len = r.u32()? as usize;
        let doc_id = std::str::from_utf8(r.take(len)?).map_err(|_| Error::InvalidUtf8)?.to_string();
        let mins = (0..num_hashes).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        sigs.push(MinHashSignature { doc_id, seed, shingle_words, mins });
    }
    if r.remaining() != 0 {
        return Err(Error::Corrupt(format!("{} trailing bytes in signature file", r.remaining())));
    }
    Ok((params, sigs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> MinHashParams {
        MinHashParams::default()
    }

    fn numbered(range: std::ops::Range<usize>) -> String {
        range.map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn shingle_counts() {
        assert_eq!(shingle("a b c d e", &p()).len(), 1);
        assert_eq!(shingle("a b c d e f g", &p()).len(), 3);
        assert_eq!(shingle("ཀ་ཁ", &p()), HashSet::from(["ཀ ཁ".to_string()]));
        assert_eq!(shingle("  ... ", &p()), HashSet::from(["...".to_string()]));
    }

    #[test]
    fn identical_texts_match() {
        let a = compute_signature("a", "the quick brown fox jumps over the lazy dog", &p());
        let b = compute_signature("b", "the quick brown fox jumps over the lazy dog", &p());
        assert_eq!(a.mins, b.mins);
        assert_eq!(a.mins.len(), 112);
        assert_eq!(estimate_jaccard(&a, &a).unwrap(), 1.0);
        assert_eq!(estimate_jaccard(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_params_are_rejected() {
        let a = compute_signature("a", "x y z", &p());
        let b = compute_signature("b", "x y z", &MinHashParams::with_seed(9));
        assert!(matches!(estimate_jaccard(&a, &b), Err(Error::ParamsMismatch)));
        assert!(find_duplicates(&[a, b], &p()).is_err());
    }

    #[test]
    fn invalid_params() {
        assert!(MinHashParams { bands: 13, ..p() }.validate().is_err());
        assert!(MinHashParams { shingle_words: 0, ..p() }.validate().is_err());
    }

    #[test]
    fn two_identical_documents_cluster() {
        let docs = [("a", numbered(0..50)), ("b", numbered(100..150)), ("c", numbered(0..50))];
        let sigs = compute_signatures(&docs, &p());
        let clusters = find_duplicates(&sigs, &p()).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].members, vec![0, 2]);
        assert_eq!(clusters[0].member_ids, vec!["a", "c"]);
        assert_eq!(clusters[0].representative, 0);
    }

    #[test]
    fn chains_form_one_cluster() {
        // b differs from a in 16 positions, c from b in another 16: a and c
        // agree on 80/112 < 0.8 yet all three end up together.
        let base: Vec<u64> = (0..112).collect();
        let mut b = base.clone();
        b[..16].iter_mut().for_each(|m| *m += 1000);
        let mut c = b.clone();
        c[96..].iter_mut().for_each(|m| *m += 1000);
        let mk = |id: &str, mins: Vec<u64>| MinHashSignature { doc_id: id.into(), seed: 1, shingle_words: 5, mins };
        let sigs = vec![mk("a", base), mk("b", b), mk("c", c)];
        assert!(estimate_jaccard(&sigs[0], &sigs[2]).unwrap() < 0.8);
        let clusters = find_duplicates(&sigs, &p()).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].members, vec![0, 1, 2]);
    }

    #[test]
    fn deduplicate_keeps_first_copy() {
        let distinct: Vec<(String, String)> =
            (0..10).map(|i| (format!("d{i}"), numbered(i * 100..i * 100 + 40))).collect();
        let ids: Vec<String> = distinct.iter().map(|d| d.0.clone()).collect();
        assert_eq!(deduplicate(&distinct, &p()).unwrap(), ids);

        let copies: Vec<(String, String)> = (0..5).map(|i| (format!("c{i}"), numbered(0..30))).collect();
        assert_eq!(deduplicate(&copies, &p()).unwrap(), vec!["c0".to_string()]);
    }

    #[test]
    fn sidecar_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sigs.bin");
        let docs = [("α", numbered(0..20)), ("b", numbered(5..30))];
        let sigs = compute_signatures(&docs, &p());
        write_signatures(&path, &p(), &sigs).unwrap();
        let (params, back) = read_signatures(&path).unwrap();
        assert_eq!(params, p());
        assert_eq!(back, sigs);

        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(read_signatures(&path), Err(Error::Corrupt(_))));
    }
}
