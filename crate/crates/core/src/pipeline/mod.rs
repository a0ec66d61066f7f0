//! End-to-end orchestration: the document schema, the pipeline config, the
//! stage runner and its report, packing and parallel-data templating.

mod config;
mod document;
mod pack;
mod stats;
mod template;

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

pub use config::{PackConfig, PipelineConfig, Stage};
pub use document::{assign_ids, content_id, read_documents, write_documents, Document, Source, TrailEntry};
pub use pack::{pack, pack_documents, pretokenize, PackStats, PackedDataset, PACK_MAGIC, PACK_VERSION};
pub use stats::{stats, StageStats, StatsReport, VolumeRow};
pub use template::{format_parallel, Template, TemplateSet};

use crate::bpe::Tokenizer;
use crate::dedup::{compute_signatures, deduplicate_signatures};
use crate::error::{Error, Result};
use crate::langid::{self, LanguageClassifier, NgramClassifier};
use crate::outcome::FilterOutcome;
use crate::quality::{run_quality_chain, QualityFilter};

/// A configured pipeline with its resources loaded.
pub struct Pipeline {
    pub config: PipelineConfig,
    classifier: Arc<dyn LanguageClassifier>,
    quality: QualityFilter,
    tokenizer: Option<Tokenizer>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub kept: Vec<Document>,
    pub removed: Vec<Document>,
    pub report: StatsReport,
}

impl Pipeline {
    pub fn from_config(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        let classifier: Arc<dyn LanguageClassifier> = match &config.profiles_dir {
            Some(dir) => Arc::new(NgramClassifier::from_dir(dir)?),
            None => Arc::new(langid::builtin().clone()),
        };
        let quality = QualityFilter::new(config.quality.clone())?;
        let tokenizer = config.vocab_dir.as_deref().map(Tokenizer::load_dir).transpose()?;
        Ok(Self { config, classifier, quality, tokenizer })
    }

    pub fn with_parts(
        config: PipelineConfig,
        classifier: Arc<dyn LanguageClassifier>,
        quality: QualityFilter,
        tokenizer: Option<Tokenizer>,
    ) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, classifier, quality, tokenizer })
    }

    pub fn tokenizer(&self) -> Option<&Tokenizer> {
        self.tokenizer.as_ref()
    }

    /// Run every configured stage in order. Output order follows input order;
    /// removed documents are listed stage by stage.
    pub fn run(&self, docs: Vec<Document>) -> Result<PipelineOutput> {
        self.run_stages(docs, &self.config.stages)
    }

    /// Run an arbitrary subset of stages in the given order.
    pub fn run_stages(&self, docs: Vec<Document>, stages: &[Stage]) -> Result<PipelineOutput> {
        let mut docs = assign_ids(docs);
        let input = docs.clone();
        let mut removed = Vec::new();
        let mut stage_stats = Vec::new();
        for &stage in stages {
            let processed = match stage {
                Stage::Langid => self.langid_stage(docs)?,
                Stage::Quality => self.quality_stage(docs),
                Stage::Dedup => self.dedup_stage(docs)?,
            };
            let mut st = StageStats::new(stage);
            let mut kept = Vec::with_capacity(processed.len());
            for d in processed {
                let outcome = &d.filter_trail.last().expect("stage recorded an outcome").outcome;
                st.record(outcome);
                if outcome.is_removed() {
                    removed.push(d);
                } else {
                    kept.push(d);
                }
            }
            stage_stats.push(st);
            docs = kept;
        }
        let report = StatsReport::build(&input, &docs, stage_stats, self.tokenizer.as_ref());
        Ok(PipelineOutput { kept: docs, removed, report })
    }

    fn langid_stage(&self, docs: Vec<Document>) -> Result<Vec<Document>> {
        let lang = self.config.language.as_str();
        let threshold = self.config.lang_threshold;
        docs.into_par_iter()
            .map(|mut d| {
                let outcome = match self.classifier.classify(&d.text) {
                    Ok(scores) => {
                        let o = langid::language_verdict(&scores, lang, threshold);
                        d.lang_scores = scores;
                        o
                    }
                    Err(Error::EmptyText) => FilterOutcome::removed("lang.empty_text", Default::default()),
                    Err(e) => return Err(e),
                };
                d.filter_trail.push(TrailEntry { stage: Stage::Langid, outcome });
                Ok(d)
            })
            .collect()
    }

    fn quality_stage(&self, docs: Vec<Document>) -> Vec<Document> {
        docs.into_par_iter()
            .map(|mut d| {
                let chain = run_quality_chain(&d.text, &self.quality);
                if let Some(t) = chain.text {
                    d.text = t;
                }
                d.filter_trail.push(TrailEntry { stage: Stage::Quality, outcome: chain.outcome });
                d
            })
            .collect()
    }

    fn dedup_stage(&self, mut docs: Vec<Document>) -> Result<Vec<Document>> {
        let params = &self.config.minhash;
        let pairs: Vec<(&str, &str)> = docs.iter().map(|d| (d.id.as_str(), d.text.as_str())).collect();
        let sigs = compute_signatures(&pairs, params);
        let result = deduplicate_signatures(&sigs, params)?;
        let mut cluster_of: HashMap<usize, (usize, usize)> = HashMap::new();
        for c in &result.clusters {
            for &m in &c.members {
                cluster_of.insert(m, (c.representative, c.members.len()));
            }
        }
        let rep_ids: HashMap<usize, String> =
            result.clusters.iter().map(|c| (c.representative, docs[c.representative].id.clone())).collect();
        for (i, d) in docs.iter_mut().enumerate() {
            let mut m = std::collections::BTreeMap::new();
            let outcome = match cluster_of.get(&i) {
                Some(&(rep, size)) => {
                    m.insert("dedup.cluster_size".to_string(), size as f64);
                    if rep == i {
                        FilterOutcome::kept(m)
                    } else {
                        FilterOutcome::removed("dedup.near_duplicate", m).with_detail(rep_ids[&rep].clone())
                    }
                }
                None => FilterOutcome::kept(m),
            };
            d.filter_trail.push(TrailEntry { stage: Stage::Dedup, outcome });
        }
        Ok(docs)
    }
}
