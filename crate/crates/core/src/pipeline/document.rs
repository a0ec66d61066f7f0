use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Stage;
use crate::error::{Error, Result};
use crate::io::{open, write_atomic};
use crate::langid::LanguageScore;
use crate::outcome::FilterOutcome;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    OpenSource,
    #[default]
    Crawl,
    Synthetic,
    Private,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::OpenSource => "open_source",
            Source::Crawl => "crawl",
            Source::Synthetic => "synthetic",
            Source::Private => "private",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrailEntry {
    pub stage: Stage,
    pub outcome: FilterOutcome,
}

/// One corpus record. Records without a `source` (such as crawler pages)
/// are read as `crawl`; a missing `id` becomes a content hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    #[serde(default)]
    pub id: String,
    #[serde(default)]
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    pub text: String,
    #[serde(default)]
    pub lang_scores: Vec<LanguageScore>,
    #[serde(default)]
    pub filter_trail: Vec<TrailEntry>,
}

impl Document {
    pub fn new(source: Source, text: impl Into<String>) -> Self {
        let text = text.into();
        Self { id: content_id(&text), source, url: None, text, lang_scores: Vec::new(), filter_trail: Vec::new() }
    }

    /// Top-scoring language, or "und" before language identification.
    pub fn language(&self) -> &str {
        self.lang_scores.first().map_or("und", |s| s.language.as_str())
    }

    pub fn removal(&self) -> Option<(Stage, &str)> {
        self.filter_trail.iter().find_map(|t| t.outcome.reason().map(|r| (t.stage, r)))
    }
}

/// First 16 hex digits of the SHA-256 of the text.
pub fn content_id(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Fill missing ids with content hashes and make every id unique by
/// suffixing repeats with `-2`, `-3`, ... in input order.
pub fn assign_ids(mut docs: Vec<Document>) -> Vec<Document> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    for d in &mut docs {
        if d.id.is_empty() {
            d.id = content_id(&d.text);
        }
        let n = seen.entry(d.id.clone()).or_insert(0);
        *n += 1;
        if *n > 1 {
            let mut k = *n;
            let mut candidate = format!("{}-{k}", d.id);
            while seen.contains_key(&candidate) {
                k += 1;
                candidate = format!("{}-{k}", d.id);
            }
            seen.insert(candidate.clone(), 1);
            d.id = candidate;
        }
    }
    docs
}

pub fn read_documents(path: &Path) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line)
            .map_err(|e| Error::Corrupt(format!("{}:{}: {e}", path.display(), i + 1)))?;
        docs.push(doc);
    }
    Ok(assign_ids(docs))
}

pub fn write_documents(path: &Path, docs: &[Document]) -> Result<()> {
    let lines = docs.iter().map(serde_json::to_string).collect::<std::result::Result<Vec<_>, _>>()?;
    write_atomic(path, |w| {
        for l in &lines {
            w.write_all(l.as_bytes())?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })
}
