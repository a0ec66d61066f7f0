use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bpe::TrainConfig;
use crate::crawl::CrawlConfig;
use crate::dedup::MinHashParams;
use crate::error::{Error, Result};
use crate::langid::{DEFAULT_THRESHOLD, TIBETAN};
use crate::quality::FilterConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Langid,
    Quality,
    Dedup,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Langid => "langid",
            Stage::Quality => "quality",
            Stage::Dedup => "dedup",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PackConfig {
    pub sample_length: usize,
    /// Name of the special token placed after every document.
    pub separator: String,
}

impl Default for PackConfig {
    fn default() -> Self {
        Self { sample_length: 4096, separator: "<|endoftext|>".into() }
    }
}

/// Everything the toolkit can be configured with, in one TOML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub stages: Vec<Stage>,
    /// Target language code kept by the language filter.
    pub language: String,
    /// Documents whose target-language confidence is strictly below this are
    /// removed.
    pub lang_threshold: f64,
    /// Directory of `<lang>.tsv` profiles; the built-in profiles otherwise.
    pub profiles_dir: Option<PathBuf>,
    /// Directory holding `vocab.txt` and `merges.tsv`.
    pub vocab_dir: Option<PathBuf>,
    pub templates_path: Option<PathBuf>,
    pub quality: FilterConfig,
    pub minhash: MinHashParams,
    pub tokenizer: TrainConfig,
    pub pack: PackConfig,
    pub crawl: CrawlConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            stages: vec![Stage::Langid, Stage::Quality, Stage::Dedup],
            language: TIBETAN.into(),
            lang_threshold: DEFAULT_THRESHOLD,
            profiles_dir: None,
            vocab_dir: None,
            templates_path: None,
            quality: FilterConfig::default(),
            minhash: MinHashParams::default(),
            tokenizer: TrainConfig::default(),
            pack: PackConfig::default(),
            crawl: CrawlConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let mut sorted = self.stages.clone();
        sorted.sort();
        if sorted != [Stage::Langid, Stage::Quality, Stage::Dedup] {
            return Err(Error::Config(format!(
                "stages must list langid, quality and dedup exactly once each, got {:?}",
                self.stages
            )));
        }
        if !(0.0..=1.0).contains(&self.lang_threshold) {
            return Err(Error::Config(format!("lang_threshold {} is outside [0, 1]", self.lang_threshold)));
        }
        if self.language.trim().is_empty() {
            return Err(Error::Config("language is empty".into()));
        }
        if self.pack.sample_length < 2 {
            return Err(Error::Config("pack.sample_length must be at least 2".into()));
        }
        self.quality.validate()?;
        self.minhash.validate()?;
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(base) = path.parent() {
            cfg.resolve_paths(base);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        fix(&mut self.profiles_dir);
        fix(&mut self.vocab_dir);
        fix(&mut self.templates_path);
        fix(&mut self.quality.badword_path);
        fix(&mut self.quality.sensitive_path);
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
