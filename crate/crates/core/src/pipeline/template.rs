//! Instruction templates that turn aligned sentence pairs into synthetic
//! documents.
//!
//! A template is free text with exactly one `{source}` and one `{target}`
//! slot. The built-in set is neutral placeholder wording; real templates
//! are loaded from a TOML table of `id = "template text"` entries.

use std::collections::BTreeMap;
use std::path::Path;

use super::{Document, Source};
use crate::error::{Error, Result};
use crate::io::read_string;

const SOURCE_SLOT: &str = "{source}";
const TARGET_SLOT: &str = "{target}";

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece {
    Lit(String),
    Source,
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    raw: String,
    pieces: Vec<Piece>,
}

impl Template {
    pub fn parse(raw: &str) -> Result<Self> {
        for slot in [SOURCE_SLOT, TARGET_SLOT] {
            match raw.matches(slot).count() {
                1 => {}
                0 => return Err(Error::Template(format!("template {raw:?} has no {slot} slot"))),
                _ => return Err(Error::Template(format!("template {raw:?} repeats the {slot} slot"))),
            }
        }
        let mut pieces = Vec::new();
        let mut rest = raw;
        while !rest.is_empty() {
            let next = [(SOURCE_SLOT, Piece::Source), (TARGET_SLOT, Piece::Target)]
                .into_iter()
                .filter_map(|(s, p)| rest.find(s).map(|i| (i, s, p)))
                .min_by_key(|x| x.0);
            match next {
                Some((i, slot, piece)) => {
                    if i > 0 {
                        pieces.push(Piece::Lit(rest[..i].to_string()));
                    }
                    pieces.push(piece);
                    rest = &rest[i + slot.len()..];
                }
                None => {
                    pieces.push(Piece::Lit(rest.to_string()));
                    rest = "";
                }
            }
        }
        Ok(Self { raw: raw.to_string(), pieces })
    }

    pub fn as_str(&self) -> &str {
        &self.raw
    }

    /// Substitution is a single pass, so slot markers inside the inserted
    /// texts are left alone.
    pub fn fill(&self, source: &str, target: &str) -> String {
        let mut out = String::with_capacity(self.raw.len() + source.len() + target.len());
        for p in &self.pieces {
            match p {
                Piece::Lit(s) => out.push_str(s),
                Piece::Source => out.push_str(source),
                Piece::Target => out.push_str(target),
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TemplateSet {
    templates: BTreeMap<String, Template>,
}

impl TemplateSet {
    /// Placeholder wording, one template per direction.
    pub fn builtin() -> Self {
        let mut set = Self::default();
        set.insert("to_tibetan", "Translate the following text into Tibetan.\n{source}\n{target}").unwrap();
        set.insert("from_tibetan", "Translate the following Tibetan text.\n{target}\n{source}").unwrap();
        set
    }

    pub fn insert(&mut self, id: &str, raw: &str) -> Result<()> {
        let t = Template::parse(raw).map_err(|e| Error::Template(format!("{id}: {e}")))?;
        self.templates.insert(id.to_string(), t);
        Ok(())
    }

    pub fn parse_toml(text: &str) -> Result<Self> {
        let table: BTreeMap<String, String> = toml::from_str(text).map_err(|e| Error::Template(e.to_string()))?;
        let mut set = Self::default();
        for (id, raw) in &table {
            set.insert(id, raw)?;
        }
        Ok(set)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse_toml(&read_string(path)?)
    }

    pub fn get(&self, id: &str) -> Option<&Template> {
        self.templates.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.templates.keys().map(String::as_str)
    }
}

/// Build a synthetic document from one aligned pair.
pub fn format_parallel(source: &str, target: &str, template_id: &str, set: &TemplateSet) -> Result<Document> {
    if source.trim().is_empty() || target.trim().is_empty() {
        return Err(Error::Template("both sides of a parallel pair must be non-empty".into()));
    }
    let t = set.get(template_id).ok_or_else(|| Error::Template(format!("unknown template {template_id:?}")))?;
    Ok(Document::new(Source::Synthetic, t.fill(source, target)))
}
