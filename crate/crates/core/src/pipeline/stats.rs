use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Document, Source, Stage};
use crate::bpe::Tokenizer;
use crate::outcome::{FilterOutcome, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageStats {
    pub stage: Stage,
    pub input: usize,
    /// Includes transformed documents.
    pub kept: usize,
    pub removed: usize,
    pub transformed: usize,
    pub reasons: BTreeMap<String, usize>,
}

impl StageStats {
    pub fn new(stage: Stage) -> Self {
        Self { stage, input: 0, kept: 0, removed: 0, transformed: 0, reasons: BTreeMap::new() }
    }

    pub fn record(&mut self, outcome: &FilterOutcome) {
        self.input += 1;
        match &outcome.verdict {
            Verdict::Removed { reason } => {
                self.removed += 1;
                *self.reasons.entry(reason.clone()).or_default() += 1;
            }
            Verdict::Transformed { .. } => {
                self.kept += 1;
                self.transformed += 1;
            }
            Verdict::Kept => self.kept += 1,
        }
    }

    pub fn reconciles(&self) -> bool {
        self.input == self.kept + self.removed && self.reasons.values().sum::<usize>() == self.removed
    }
}

/// Documents, UTF-8 bytes and tokens for one (source, language) cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeRow {
    pub source: Source,
    pub language: String,
    pub documents: usize,
    pub bytes: usize,
    pub tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    /// Name of the vocabulary used for token counts.
    pub vocabulary: String,
    pub input_documents: usize,
    pub output_documents: usize,
    pub stages: Vec<StageStats>,
    /// Volume of the output, sorted by source then language.
    pub volume: Vec<VolumeRow>,
}

pub(crate) fn vocabulary_name(tok: Option<&Tokenizer>) -> String {
    match tok {
        None => "byte-level".into(),
        Some(t) => {
            let fp: String = t.fingerprint()[..8].iter().map(|b| format!("{b:02x}")).collect();
            format!("bpe-{}-{fp}", t.vocab_size())
        }
    }
}

fn volume(docs: &[Document], tok: Option<&Tokenizer>) -> Vec<VolumeRow> {
    let tokens: Vec<usize> = docs
        .par_iter()
        .map(|d| match tok {
            Some(t) => t.encode(&d.text).len(),
            None => d.text.len(),
        })
        .collect();
    let mut cells: BTreeMap<(Source, String), VolumeRow> = BTreeMap::new();
    for (d, n) in docs.iter().zip(tokens) {
        let row = cells.entry((d.source, d.language().to_string())).or_insert_with(|| VolumeRow {
            source: d.source,
            language: d.language().to_string(),
            documents: 0,
            bytes: 0,
            tokens: 0,
        });
        row.documents += 1;
        row.bytes += d.text.len();
        row.tokens += n;
    }
    cells.into_values().collect()
}

impl StatsReport {
    pub(crate) fn build(
        input: &[Document],
        output: &[Document],
        stages: Vec<StageStats>,
        tok: Option<&Tokenizer>,
    ) -> Self {
        Self {
            vocabulary: vocabulary_name(tok),
            input_documents: input.len(),
            output_documents: output.len(),
            stages,
            volume: volume(output, tok),
        }
    }

    pub fn total(&self) -> (usize, usize, usize) {
        self.volume.iter().fold((0, 0, 0), |acc, r| (acc.0 + r.documents, acc.1 + r.bytes, acc.2 + r.tokens))
    }

    /// Every stage balances and consecutive stages chain.
    pub fn reconciles(&self) -> bool {
        let mut expected = self.input_documents;
        for s in &self.stages {
            if !s.reconciles() || s.input != expected {
                return false;
            }
            expected = s.kept;
        }
        expected == self.output_documents && self.total().0 == self.output_documents
    }

    /// Table-style rendering for terminals.
    pub fn to_table(&self) -> String {
        let mut out = format!("vocabulary: {}\n", self.vocabulary);
        out.push_str(&format!("{:<12} {:<6} {:>10} {:>14} {:>14}\n", "source", "lang", "docs", "bytes", "tokens"));
        for r in &self.volume {
            out.push_str(&format!(
                "{:<12} {:<6} {:>10} {:>14} {:>14}\n",
                r.source.as_str(),
                r.language,
                r.documents,
                r.bytes,
                r.tokens
            ));
        }
        let (d, b, t) = self.total();
        out.push_str(&format!("{:<12} {:<6} {:>10} {:>14} {:>14}\n", "total", "", d, b, t));
        for s in &self.stages {
            out.push_str(&format!(
                "stage {:<8} in {:>8} kept {:>8} removed {:>8} transformed {:>8}\n",
                s.stage.as_str(),
                s.input,
                s.kept,
                s.removed,
                s.transformed
            ));
            for (reason, n) in &s.reasons {
                out.push_str(&format!("    {reason:<40} {n:>8}\n"));
            }
        }
        out
    }
}

/// Volume report for an existing corpus, without running any stage.
pub fn stats(docs: &[Document], tok: Option<&Tokenizer>) -> StatsReport {
    StatsReport::build(docs, docs, Vec::new(), tok)
}
