//! Fixed-length sample packing and its binary format.
//!
//! Layout, all little-endian: `PKDS`, u32 version, u32 sample_length,
//! u64 sample_count, 32-byte vocabulary fingerprint, then
//! `sample_count * sample_length` u32 token ids.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bpe::{TokenId, Tokenizer};
use crate::error::{Error, Result};
use crate::io::{read_all, write_atomic, ByteReader};

pub const PACK_MAGIC: &[u8; 4] = b"PKDS";
pub const PACK_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedDataset {
    sample_length: usize,
    fingerprint: [u8; 32],
    ids: Vec<TokenId>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackStats {
    pub documents: usize,
    pub tokens: usize,
    pub separators: usize,
    pub samples: usize,
    pub dropped_tail: usize,
}

impl PackedDataset {
    pub fn sample_length(&self) -> usize {
        self.sample_length
    }

    pub fn fingerprint(&self) -> &[u8; 32] {
        &self.fingerprint
    }

    pub fn len(&self) -> usize {
        self.ids.len() / self.sample_length
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn sample(&self, i: usize) -> Option<&[TokenId]> {
        self.ids.get(i * self.sample_length..(i + 1) * self.sample_length)
    }

    pub fn samples(&self) -> impl Iterator<Item = &[TokenId]> {
        self.ids.chunks_exact(self.sample_length)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(52 + self.ids.len() * 4);
        out.extend_from_slice(PACK_MAGIC);
        out.extend_from_slice(&PACK_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.sample_length as u32).to_le_bytes());
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.fingerprint);
        for id in &self.ids {
            out.extend_from_slice(&id.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(buf);
        if r.take(4)? != PACK_MAGIC {
            return Err(Error::Corrupt("not a packed dataset".into()));
        }
        let version = r.u32()?;
        if version != PACK_VERSION {
            return Err(Error::Corrupt(format!("unsupported packed dataset version {version}")));
        }
        let sample_length = r.u32()? as usize;
        if sample_length < 2 {
            return Err(Error::Corrupt(format!("sample length {sample_length}")));
        }
        let count = r.u64()? as usize;
        let fingerprint: [u8; 32] = r.take(32)?.try_into().expect("32 bytes");
        let expected = count.checked_mul(sample_length).and_then(|n| n.checked_mul(4));
        if expected != Some(r.remaining()) {
            return Err(Error::Corrupt(format!(
                "header announces {count} samples of {sample_length} ids but {} bytes follow",
                r.remaining()
            )));
        }
        let body = r.take(r.remaining())?;
        let ids = body.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(Self { sample_length, fingerprint, ids })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes = self.to_bytes();
        write_atomic(path, |w| w.write_all(&bytes))
    }

    /// Load and, when `expected` is given, check the vocabulary fingerprint.
    pub fn load(path: &Path, expected: Option<&[u8; 32]>) -> Result<Self> {
        let ds = Self::from_bytes(&read_all(path)?)?;
        if let Some(fp) = expected {
            if fp != &ds.fingerprint {
                return Err(Error::FingerprintMismatch { expected: hex(&ds.fingerprint), found: hex(fp) });
            }
        }
        Ok(ds)
    }
}

fn hex(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}

/// Concatenate token streams with a separator after each and cut the result
/// into `sample_length` pieces. The incomplete tail is dropped.
pub fn pack<I>(streams: I, sample_length: usize, separator: TokenId, fingerprint: [u8; 32]) -> Result<(PackedDataset, PackStats)>
where
    I: IntoIterator<Item = Vec<TokenId>>,
{
    if sample_length < 2 {
        return Err(Error::Config(format!("sample_length {sample_length} must be at least 2")));
    }
    let mut stats = PackStats::default();
    let mut ids = Vec::new();
    for s in streams {
        stats.documents += 1;
        stats.tokens += s.len();
        stats.separators += 1;
        ids.extend(s);
        ids.push(separator);
    }
    let keep = ids.len() / sample_length * sample_length;
    stats.dropped_tail = ids.len() - keep;
    stats.samples = keep / sample_length;
    ids.truncate(keep);
    Ok((PackedDataset { sample_length, fingerprint, ids }, stats))
}

pub fn pack_documents<T: AsRef<str> + Sync>(
    texts: &[T],
    tokenizer: &Tokenizer,
    sample_length: usize,
    separator: &str,
) -> Result<(PackedDataset, PackStats)> {
    let sep = tokenizer
        .special_id(separator)
        .ok_or_else(|| Error::Config(format!("vocabulary has no special token {separator:?}")))?;
    let streams: Vec<Vec<TokenId>> = texts.par_iter().map(|t| tokenizer.encode(t.as_ref())).collect();
    pack(streams, sample_length, sep, tokenizer.fingerprint())
}

/// Pack and persist in one step.
pub fn pretokenize<T: AsRef<str> + Sync>(
    texts: &[T],
    tokenizer: &Tokenizer,
    sample_length: usize,
    separator: &str,
    out: &Path,
) -> Result<PackStats> {
    let (ds, stats) = pack_documents(texts, tokenizer, sample_length, separator)?;
    ds.save(out)?;
    Ok(stats)
}
