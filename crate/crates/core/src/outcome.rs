use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Kept,
    Removed { reason: String },
    Transformed { lines_dropped: usize },
}

/// Verdict of one filter plus everything it measured on the way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterOutcome {
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(default)]
    pub measurements: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl FilterOutcome {
    pub fn kept(measurements: BTreeMap<String, f64>) -> Self {
        Self { verdict: Verdict::Kept, measurements, detail: None }
    }

    pub fn removed(reason: impl Into<String>, measurements: BTreeMap<String, f64>) -> Self {
        Self { verdict: Verdict::Removed { reason: reason.into() }, measurements, detail: None }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn is_removed(&self) -> bool {
        matches!(self.verdict, Verdict::Removed { .. })
    }

    pub fn reason(&self) -> Option<&str> {
        match &self.verdict {
            Verdict::Removed { reason } => Some(reason),
            _ => None,
        }
    }
}
