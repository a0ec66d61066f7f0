//! `tibcorpus`: crawl, filter, deduplicate, tokenize and pack a Tibetan
//! pre-training corpus.
//!
//! Exit status is 0 on success, 2 for configuration and usage errors and 3
//! for I/O or data errors.

mod http;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use tibcorpus::bpe::{merge_vocab, train_bpe, Tokenizer};
use tibcorpus::crawl::{crawl, parse_seed_file};
use tibcorpus::dedup::{compute_signatures, write_signatures};
use tibcorpus::io::{read_string, write_atomic, write_string_atomic};
use tibcorpus::pipeline::{
    pack_documents, read_documents, stats, write_documents, Document, Pipeline, PipelineConfig, PipelineOutput, Stage,
    StatsReport,
};
use tibcorpus::{Error, Result};

#[derive(Parser)]
#[command(name = "tibcorpus", version, about = "Tibetan pre-training corpus curation")]
struct Cli {
    /// TOML config file; built-in defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Overrides the MinHash seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Crawl same-domain pages from seed URLs into JSONL.
    Crawl(CrawlArgs),
    /// Run language identification and quality filtering.
    Filter(StageArgs),
    /// Remove near-duplicates with MinHash LSH.
    Dedup(DedupArgs),
    /// Train a byte-level BPE vocabulary.
    TrainTokenizer(TrainArgs),
    /// Extend a base vocabulary with a trained one.
    MergeVocab(MergeArgs),
    /// Encode documents to token ids.
    Tokenize(TokenizeArgs),
    /// Tokenize and pack documents into fixed-length samples.
    Pack(PackArgs),
    /// Print volume statistics for a document file.
    Stats(StatsArgs),
    /// Run every stage and write kept, removed, report and packed outputs.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct CrawlArgs {
    /// Seed file, one URL per line.
    #[arg(long)]
    seeds: PathBuf,
    #[arg(long)]
    max_pages: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    delay_ms: Option<u64>,
    /// Output JSONL of pages.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StageArgs {
    #[arg(long)]
    input: PathBuf,
    /// Kept documents.
    #[arg(long)]
    out: PathBuf,
    /// Removed documents with their filter trail.
    #[arg(long)]
    removed: Option<PathBuf>,
    /// Stage report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct DedupArgs {
    #[command(flatten)]
    io: StageArgs,
    /// Also write the MinHash signatures of the input.
    #[arg(long)]
    signatures: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// JSONL documents to train on.
    #[arg(long)]
    input: PathBuf,
    /// Directory for vocab.txt and merges.tsv.
    #[arg(long)]
    out: PathBuf,
    /// Vocabulary size including the 256 byte tokens.
    #[arg(long)]
    vocab_size: Option<usize>,
}

#[derive(Args)]
struct MergeArgs {
    /// Base vocabulary directory; plain byte-level when omitted.
    #[arg(long)]
    base: Option<PathBuf>,
    #[arg(long)]
    addition: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TokenizeArgs {
    /// Vocabulary directory; falls back to `vocab_dir` in the config.
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long)]
    input: PathBuf,
    /// JSONL of `{"id", "ids"}` records.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PackArgs {
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    sample_length: Option<usize>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Count tokens with this vocabulary instead of bytes.
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    input: PathBuf,
    /// Receives kept.jsonl, removed.jsonl, report.json and, with a
    /// vocabulary, packed.bin.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    vocab: Option<PathBuf>,
}

#[derive(Serialize)]
struct Encoded<'a> {
    id: &'a str,
    ids: Vec<u32>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot size the thread pool: {e}")))?;
    }
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.minhash.seed = seed;
    }

    match cli.command {
        Command::Crawl(a) => run_crawl(config, a),
        Command::Filter(a) => {
            let stages: Vec<Stage> = config.stages.iter().copied().filter(|s| *s != Stage::Dedup).collect();
            run_stages(config, &a, &stages).map(|_| ())
        }
        Command::Dedup(a) => {
            run_stages(config.clone(), &a.io, &[Stage::Dedup])?;
            if let Some(path) = &a.signatures {
                let docs = read_documents(&a.io.input)?;
                let pairs: Vec<(&str, &str)> = docs.iter().map(|d| (d.id.as_str(), d.text.as_str())).collect();
                write_signatures(path, &config.minhash, &compute_signatures(&pairs, &config.minhash))?;
            }
            Ok(())
        }
        Command::TrainTokenizer(a) => {
            let mut train = config.tokenizer.clone();
            if let Some(n) = a.vocab_size {
                train.target_size = n;
            }
            let docs = read_documents(&a.input)?;
            let texts: Vec<&str> = docs.iter().map(|d| d.text.as_str()).collect();
            let tok = train_bpe(&texts, &train)?;
            tok.save_dir(&a.out)?;
            eprintln!("trained {} tokens ({} merges) into {}", tok.vocab_size(), tok.merges().len(), a.out.display());
            Ok(())
        }
        Command::MergeVocab(a) => {
            let base = match &a.base {
                Some(dir) => Tokenizer::load_dir(dir)?,
                None => Tokenizer::byte_level(),
            };
            let merged = merge_vocab(&base, &Tokenizer::load_dir(&a.addition)?)?;
            merged.save_dir(&a.out)?;
            eprintln!(
                "base {} + {} new = {} tokens in {}",
                base.vocab_size(),
                merged.vocab_size() - base.vocab_size(),
                merged.vocab_size(),
                a.out.display()
            );
            Ok(())
        }
        Command::Tokenize(a) => {
            let tok = load_tokenizer(a.vocab.as_deref(), &config)?;
            let docs = read_documents(&a.input)?;
            let ids = tok.encode_batch(&docs.iter().map(|d| d.text.as_str()).collect::<Vec<_>>());
            let lines: Vec<String> = docs
                .iter()
                .zip(ids)
                .map(|(d, ids)| serde_json::to_string(&Encoded { id: &d.id, ids }))
                .collect::<std::result::Result<_, _>>()?;
            write_atomic(&a.out, |w| {
                for l in &lines {
                    writeln!(w, "{l}")?;
                }
                Ok(())
            })
        }
        Command::Pack(a) => {
            let tok = load_tokenizer(a.vocab.as_deref(), &config)?;
            let sample_length = a.sample_length.unwrap_or(config.pack.sample_length);
            let docs = read_documents(&a.input)?;
            let texts: Vec<&str> = docs.iter().map(|d| d.text.as_str()).collect();
            let (ds, st) = pack_documents(&texts, &tok, sample_length, &config.pack.separator)?;
            ds.save(&a.out)?;
            eprintln!(
                "{} documents, {} tokens, {} samples of {sample_length}, {} tokens dropped",
                st.documents, st.tokens, st.samples, st.dropped_tail
            );
            Ok(())
        }
        Command::Stats(a) => {
            let tok = match a.vocab.as_deref().or(config.vocab_dir.as_deref()) {
                Some(dir) => Some(Tokenizer::load_dir(dir)?),
                None => None,
            };
            let report = stats(&read_documents(&a.input)?, tok.as_ref());
            print_report(&report, a.json)
        }
        Command::Pipeline(a) => run_pipeline(config, a),
    }
}

fn load_tokenizer(flag: Option<&Path>, config: &PipelineConfig) -> Result<Tokenizer> {
    match flag.or(config.vocab_dir.as_deref()) {
        Some(dir) => Tokenizer::load_dir(dir),
        None => Err(Error::Config("no vocabulary: pass --vocab or set vocab_dir".into())),
    }
}

fn print_report(report: &StatsReport, json: bool) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(report)?);
    } else {
        print!("{}", report.to_table());
    }
    Ok(())
}

fn write_report(path: &Path, report: &StatsReport) -> Result<()> {
    write_string_atomic(path, &(serde_json::to_string_pretty(report)? + "\n"))
}

fn run_stages(config: PipelineConfig, a: &StageArgs, stages: &[Stage]) -> Result<PipelineOutput> {
    let pipeline = Pipeline::from_config(config)?;
    let out = pipeline.run_stages(read_documents(&a.input)?, stages)?;
    write_documents(&a.out, &out.kept)?;
    if let Some(path) = &a.removed {
        write_documents(path, &out.removed)?;
    }
    if let Some(path) = &a.report {
        write_report(path, &out.report)?;
    }
    eprintln!("{} in, {} kept, {} removed", out.report.input_documents, out.kept.len(), out.removed.len());
    Ok(out)
}

fn run_crawl(mut config: PipelineConfig, a: CrawlArgs) -> Result<()> {
    let c = &mut config.crawl;
    c.seed_urls.extend(parse_seed_file(&read_string(&a.seeds)?));
    if let Some(n) = a.max_pages {
        c.max_pages = n;
    }
    if a.max_depth.is_some() {
        c.max_depth = a.max_depth;
    }
    if let Some(ms) = a.delay_ms {
        c.politeness_delay_ms = ms;
    }
    let fetcher = http::HttpFetcher::new(c)?;
    let file = File::create(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let mut w = BufWriter::new(file);
    let summary = crawl(c, &fetcher, |page| {
        let line = serde_json::to_string(&page)?;
        writeln!(w, "{line}").and_then(|_| w.flush()).map_err(|e| Error::io(&a.out, e))
    })?;
    eprintln!(
        "fetched {} pages ({} failed, {} blocked by robots.txt), discovered {}",
        summary.fetched, summary.failed, summary.blocked_by_robots, summary.discovered
    );
    Ok(())
}

fn run_pipeline(mut config: PipelineConfig, a: PipelineArgs) -> Result<()> {
    if a.vocab.is_some() {
        config.vocab_dir = a.vocab;
    }
    let pipeline = Pipeline::from_config(config)?;
    let docs: Vec<Document> = read_documents(&a.input)?;
    let out = pipeline.run(docs)?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    write_documents(&a.out_dir.join("kept.jsonl"), &out.kept)?;
    write_documents(&a.out_dir.join("removed.jsonl"), &out.removed)?;
    write_report(&a.out_dir.join("report.json"), &out.report)?;
    if let Some(tok) = pipeline.tokenizer() {
        let texts: Vec<&str> = out.kept.iter().map(|d| d.text.as_str()).collect();
        let pack = &pipeline.config.pack;
        let (ds, st) = pack_documents(&texts, tok, pack.sample_length, &pack.separator)?;
        ds.save(&a.out_dir.join("packed.bin"))?;
        eprintln!("packed {} samples of {}", st.samples, pack.sample_length);
    }
    print!("{}", out.report.to_table());
    Ok(())
}
