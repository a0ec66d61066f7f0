//! Plain-text vocabulary and merges files.
//!
//! Vocabulary: one token per line, id = line number. Printable characters
//! stand for themselves, `\\` is a backslash, `\xHH` is a raw byte, and a
//! leading `\S` marks a special token. Merges: `rank\tleft\tright\tresult`.

use std::fmt::Write as _;
use std::path::Path;

use super::{MergeRule, Tokenizer, Vocabulary};
use crate::error::{Error, Result};
use crate::io::{read_string, write_string_atomic};

pub const VOCAB_FILE: &str = "vocab.txt";
pub const MERGES_FILE: &str = "merges.tsv";

pub fn escape_token(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len());
    for chunk in bytes.utf8_chunks() {
        for c in chunk.valid().chars() {
            if c == '\\' {
                out.push_str("\\\\");
            } else if c.is_control() || c.is_whitespace() {
                let mut buf = [0u8; 4];
                for b in c.encode_utf8(&mut buf).bytes() {
                    let _ = write!(out, "\\x{b:02X}");
                }
            } else {
                out.push(c);
            }
        }
        for b in chunk.invalid() {
            let _ = write!(out, "\\x{b:02X}");
        }
    }
    out
}

pub fn unescape_token(s: &str) -> Result<Vec<u8>> {
    let bad = || Error::Corrupt(format!("bad escape in vocabulary line {s:?}"));
    let mut out = Vec::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            let mut buf = [0u8; 4];
            out.extend_from_slice(c.encode_utf8(&mut buf).as_bytes());
            continue;
        }
        match chars.next() {
            Some('\\') => out.push(b'\\'),
            Some('x') => {
                let hex: String = chars.by_ref().take(2).collect();
                if hex.len() != 2 {
                    return Err(bad());
                }
                out.push(u8::from_str_radix(&hex, 16).map_err(|_| bad())?);
            }
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

impl Tokenizer {
    pub fn vocab_text(&self) -> String {
        let mut out = String::new();
        for (_, bytes, special) in self.vocab.iter() {
            if special {
                out.push_str("\\S");
            }
            out.push_str(&escape_token(bytes));
            out.push('\n');
        }
        out
    }

    pub fn merges_text(&self) -> String {
        let mut out = String::new();
        for m in &self.merges {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", m.rank, m.left, m.right, m.result);
        }
        out
    }

    pub fn from_texts(vocab_text: &str, merges_text: &str) -> Result<Self> {
        let mut vocab = Vocabulary::default();
        for (i, line) in vocab_text.lines().enumerate() {
            let (special, body) = match line.strip_prefix("\\S") {
                Some(rest) => (true, rest),
                None => (false, line),
            };
            let bytes = unescape_token(body)?;
            let duplicate = if special {
                vocab.by_special.contains_key(&bytes)
            } else {
                vocab.by_bytes.contains_key(&bytes)
            };
            if duplicate || bytes.is_empty() {
                return Err(Error::Corrupt(format!("vocabulary line {} repeats or is empty", i + 1)));
            }
            vocab.push(bytes, special);
        }
        let mut merges = Vec::new();
        for (i, line) in merges_text.lines().enumerate() {
            let fields: Vec<u32> = line
                .split('\t')
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Corrupt(format!("merges line {}: {line:?}", i + 1)))?;
            let [rank, left, right, result] = fields[..] else {
                return Err(Error::Corrupt(format!("merges line {} needs 4 fields", i + 1)));
            };
            merges.push(MergeRule { rank, left, right, result });
        }
        Tokenizer::new(vocab, merges)
    }

    /// Writes `vocab.txt` and `merges.tsv` into `dir`.
    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_string_atomic(&dir.join(VOCAB_FILE), &self.vocab_text())?;
        write_string_atomic(&dir.join(MERGES_FILE), &self.merges_text())
    }

    pub fn load_dir(dir: &Path) -> Result<Self> {
        Self::from_texts(&read_string(&dir.join(VOCAB_FILE))?, &read_string(&dir.join(MERGES_FILE))?)
    }
}
