//! Tibetan pre-training corpus curation.
//!
//! The crate covers the whole path from raw web pages to packed training
//! samples: script-aware segmentation ([`script`]), language identification
//! ([`langid`]), heuristic quality filters ([`quality`]), MinHash
//! near-duplicate removal ([`dedup`]), byte-level BPE training and
//! vocabulary extension ([`bpe`]), a same-domain crawler ([`crawl`]) and the
//! orchestration layer that ties them together ([`pipeline`]).

pub mod bpe;
pub mod crawl;
pub mod dedup;
pub mod error;
pub mod io;
pub mod langid;
pub mod outcome;
pub mod pipeline;
pub mod quality;
pub mod script;
pub mod synth;

pub use error::{Error, Result};
pub use outcome::{FilterOutcome, Verdict};
