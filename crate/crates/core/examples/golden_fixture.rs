//! Regenerates the 1,000-document golden fixture under `tests/fixtures`.
//!
//! `cargo run --release --example golden_fixture` writes the input corpus;
//! add `--manifest` to also run the default pipeline and record the
//! per-stage counts the golden test compares against.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use tibcorpus::pipeline::{read_documents, write_documents, Document, Pipeline, PipelineConfig, Source};
use tibcorpus::script::TSHEG;
use tibcorpus::synth::{chinese_document, english_document, TibetanLexicon};

const BOILERPLATE: &[&str] = &[
    "Please enable Javascript to continue",
    "Read our privacy policy",
    "Home | About",
    "Share",
    "This site uses cookies to improve your experience",
];

fn near_duplicate(rng: &mut ChaCha8Rng, lex: &TibetanLexicon, text: &str) -> String {
    let mut syllables: Vec<String> = text.split(TSHEG).map(String::from).collect();
    for _ in 0..rng.random_range(1..=3) {
        let i = rng.random_range(0..syllables.len());
        if !syllables[i].contains(['།', ' ', '\n']) {
            syllables[i] = lex.word(rng).to_string();
        }
    }
    syllables.join(&TSHEG.to_string())
}

fn generate() -> Vec<Document> {
    let lex = TibetanLexicon::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x601D);
    let mut texts: Vec<String> = Vec::with_capacity(1000);

    let clean: Vec<String> = (0..520)
        .map(|_| {
            let p = rng.random_range(2..=5);
            lex.document(&mut rng, p)
        })
        .collect();
    texts.extend(clean.iter().cloned());
    for _ in 0..60 {
        texts.push(clean[rng.random_range(0..clean.len())].clone());
    }
    for _ in 0..50 {
        let src = clean[rng.random_range(0..clean.len())].clone();
        texts.push(near_duplicate(&mut rng, &lex, &src));
    }
    for _ in 0..90 {
        let n = rng.random_range(10..=30);
        texts.push(english_document(&mut rng, n));
    }
    for _ in 0..50 {
        let n = rng.random_range(8..=20);
        texts.push(chinese_document(&mut rng, n));
    }
    for _ in 0..30 {
        let bo = lex.document(&mut rng, 2);
        let n = rng.random_range(6..=12);
        let en = english_document(&mut rng, n);
        texts.push(format!("{bo}\n{en}"));
    }
    for _ in 0..40 {
        texts.push(lex.sentence(&mut rng, 3, 10));
    }
    for i in 0..40 {
        let s = lex.sentence(&mut rng, 6, 12);
        let times = 6 + i % 8;
        texts.push(vec![s; times].join(" "));
    }
    for i in 0..40 {
        let mut lines: Vec<String> = lex.document(&mut rng, 3).split('\n').map(String::from).collect();
        let at = rng.random_range(0..=lines.len());
        lines.insert(at, BOILERPLATE[i % BOILERPLATE.len()].to_string());
        match i % 8 {
            5 => lines.push("lorem ipsum dolor sit amet".into()),
            6 => lines.push("var config = { page: 1 }".into()),
            7 => lines.push("ཞིབ་འཇུག་ [12] ལྟར།".into()),
            _ => {}
        }
        texts.push(lines.join("\n"));
    }
    for _ in 0..20 {
        let n = rng.random_range(8..=16);
        let items: Vec<String> = (0..n).map(|_| format!("• {}", lex.sentence(&mut rng, 4, 8))).collect();
        texts.push(items.join("\n"));
    }
    for _ in 0..20 {
        let n = rng.random_range(10..=20);
        let sents: Vec<String> = (0..n)
            .map(|_| {
                let s = lex.sentence(&mut rng, 4, 9);
                format!("{}…", s.trim_end_matches('།'))
            })
            .collect();
        texts.push(sents.join(" "));
    }
    for i in 0..20 {
        texts.push([" ", "", "\n\n", "\t \n"][i % 4].to_string());
    }
    for _ in 0..20 {
        let n = rng.random_range(60..=120);
        let words: Vec<String> = (0..n).map(|_| lex.word(&mut rng).to_string()).collect();
        texts.push(words.join("\n"));
    }
    assert_eq!(texts.len(), 1000);
    texts.shuffle(&mut rng);

    texts
        .into_iter()
        .enumerate()
        .map(|(i, text)| {
            let source = match rng.random_range(0..20) {
                0..=13 => Source::Crawl,
                14..=16 => Source::OpenSource,
                17..=18 => Source::Private,
                _ => Source::Synthetic,
            };
            let mut d = Document::new(source, text);
            d.id = format!("g{i:04}");
            if source == Source::Crawl {
                d.url = Some(format!("https://bo.example.org/articles/{i}"));
            }
            d
        })
        .collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    std::fs::create_dir_all(&dir)?;
    let input = dir.join("golden_input.jsonl");
    write_documents(&input, &generate())?;
    println!("wrote {}", input.display());

    if std::env::args().any(|a| a == "--manifest") {
        let docs = read_documents(&input)?;
        let out = Pipeline::from_config(PipelineConfig::default())?.run(docs)?;
        let tmp = tempfile::NamedTempFile::new()?;
        write_documents(tmp.path(), &out.kept)?;
        let digest = Sha256::digest(std::fs::read(tmp.path())?);
        let manifest = serde_json::json!({
            "documents": out.report.input_documents,
            "kept": out.kept.len(),
            "removed": out.removed.len(),
            "kept_sha256": digest.iter().map(|b| format!("{b:02x}")).collect::<String>(),
            "stages": out.report.stages,
            "volume": out.report.volume,
        });
        let path = dir.join("golden_manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
