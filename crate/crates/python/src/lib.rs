use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use tibcorpus::bpe::{merge_vocab, train_bpe, TrainConfig};
use tibcorpus::dedup::{compute_signatures, find_duplicates, MinHashParams};
use tibcorpus::langid::{builtin, LanguageClassifier};
use tibcorpus::pipeline::{read_documents, write_documents, Pipeline, PipelineConfig};
use tibcorpus::quality::QualityFilter;
use tibcorpus::{script, Error, FilterOutcome, Verdict};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::Corrupt(_) | Error::FingerprintMismatch { .. } | Error::ParamsMismatch | Error::IncompatibleVocab(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn outcome_dict<'py>(py: Python<'py>, o: &FilterOutcome) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    match &o.verdict {
        Verdict::Kept => d.set_item("verdict", "kept")?,
        Verdict::Removed { reason } => {
            d.set_item("verdict", "removed")?;
            d.set_item("reason", reason)?;
        }
        Verdict::Transformed { lines_dropped } => {
            d.set_item("verdict", "transformed")?;
            d.set_item("lines_dropped", lines_dropped)?;
        }
    }
    d.set_item("measurements", o.measurements.clone())?;
    if let Some(detail) = &o.detail {
        d.set_item("detail", detail)?;
    }
    Ok(d)
}

/// Words of `text`: tsheg-delimited syllables for Tibetan, whitespace and
/// punctuation delimited tokens elsewhere.
#[pyfunction]
fn words(text: &str) -> Vec<String> {
    script::words(text).into_iter().map(String::from).collect()
}

#[pyfunction]
fn sentences(text: &str) -> Vec<String> {
    let t = script::IndexedText::new(text);
    script::split_sentences(text).into_iter().map(|s| t.slice(s).to_string()).collect()
}

/// Ranked `(language, confidence)` pairs from the built-in profiles.
#[pyfunction]
fn classify(text: &str) -> PyResult<Vec<(String, f64)>> {
    let scores = builtin().classify(text).map_err(py_err)?;
    Ok(scores.into_iter().map(|s| (s.language, s.confidence)).collect())
}

/// Runs the quality filter chain with default thresholds. The result dict
/// carries `verdict`, optional `reason`, `measurements` and, when lines
/// were dropped, the rewritten `text`.
#[pyfunction]
fn quality<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let chain = QualityFilter::default().run(text);
    let d = outcome_dict(py, &chain.outcome)?;
    if let Some(t) = chain.text {
        d.set_item("text", t)?;
    }
    Ok(d)
}

/// Near-duplicate clusters as lists of indices into `texts`; the first
/// index of each cluster is the one to keep.
#[pyfunction]
#[pyo3(signature = (texts, seed = 1))]
fn near_duplicates(texts: Vec<String>, seed: u64) -> PyResult<Vec<Vec<usize>>> {
    let params = MinHashParams::with_seed(seed);
    let docs: Vec<(String, &str)> = texts.iter().enumerate().map(|(i, t)| (i.to_string(), t.as_str())).collect();
    let sigs = compute_signatures(&docs, &params);
    let clusters = find_duplicates(&sigs, &params).map_err(py_err)?;
    Ok(clusters.into_iter().map(|c| c.members).collect())
}

/// Runs the full pipeline over a JSONL file and returns the stage report.
#[pyfunction]
#[pyo3(signature = (input, kept, removed = None, config = None))]
fn run_pipeline<'py>(
    py: Python<'py>,
    input: PathBuf,
    kept: PathBuf,
    removed: Option<PathBuf>,
    config: Option<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = match config {
        Some(p) => PipelineConfig::load(&p).map_err(py_err)?,
        None => PipelineConfig::default(),
    };
    let pipeline = Pipeline::from_config(cfg).map_err(py_err)?;
    let out = pipeline.run(read_documents(&input).map_err(py_err)?).map_err(py_err)?;
    write_documents(&kept, &out.kept).map_err(py_err)?;
    if let Some(p) = removed {
        write_documents(&p, &out.removed).map_err(py_err)?;
    }
    let json = serde_json::to_string(&out.report).map_err(|e| py_err(e.into()))?;
    py.import("json")?.call_method1("loads", (json,))
}

#[pyclass(name = "Tokenizer", frozen)]
struct PyTokenizer {
    inner: tibcorpus::bpe::Tokenizer,
}

#[pymethods]
impl PyTokenizer {
    #[staticmethod]
    fn byte_level() -> Self {
        Self { inner: tibcorpus::bpe::Tokenizer::byte_level() }
    }

    /// Loads `vocab.txt` and `merges.tsv` from a directory.
    #[staticmethod]
    fn load(dir: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: tibcorpus::bpe::Tokenizer::load_dir(&dir).map_err(py_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (texts, vocab_size = 15000, specials = None, min_pair_count = 1))]
    fn train(texts: Vec<String>, vocab_size: usize, specials: Option<Vec<String>>, min_pair_count: u64) -> PyResult<Self> {
        let mut cfg = TrainConfig { target_size: vocab_size, min_pair_count, ..TrainConfig::default() };
        if let Some(s) = specials {
            cfg.specials = s;
        }
        Ok(Self { inner: train_bpe(&texts, &cfg).map_err(py_err)? })
    }

    /// A new tokenizer: this vocabulary extended with `addition`.
    fn merge(&self, addition: &PyTokenizer) -> PyResult<Self> {
        Ok(Self { inner: merge_vocab(&self.inner, &addition.inner).map_err(py_err)? })
    }

    fn save(&self, dir: PathBuf) -> PyResult<()> {
        self.inner.save_dir(&dir).map_err(py_err)
    }

    fn encode(&self, text: &str) -> Vec<u32> {
        self.inner.encode(text)
    }

    fn decode(&self, ids: Vec<u32>) -> PyResult<String> {
        self.inner.decode_strict(&ids).map_err(py_err)
    }

    fn special_id(&self, name: &str) -> Option<u32> {
        self.inner.special_id(name)
    }

    #[getter]
    fn vocab_size(&self) -> usize {
        self.inner.vocab_size()
    }

    #[getter]
    fn fingerprint(&self) -> String {
        self.inner.fingerprint().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.vocab_size()
    }

    fn __repr__(&self) -> String {
        format!("Tokenizer(vocab_size={}, merges={})", self.inner.vocab_size(), self.inner.merges().len())
    }
}

#[pymodule]
#[pyo3(name = "tibcorpus")]
fn tibcorpus_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(words, m)?)?;
    m.add_function(wrap_pyfunction!(sentences, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(quality, m)?)?;
    m.add_function(wrap_pyfunction!(near_duplicates, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_class::<PyTokenizer>()?;
    Ok(())
}
