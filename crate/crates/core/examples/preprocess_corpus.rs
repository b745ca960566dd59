//! Turn a directory of raw text files into a cleaned lemma corpus and its
//! on-disk cache.
//!
//! `cargo run --example preprocess_corpus -- [dir]` — without a directory a
//! few sample documents are written to a temporary one.

use std::collections::BTreeMap;
use std::path::Path;

use crossdomain::corpus::{cache, ingest_corpus, preprocess, PreprocessConfig};

pub const SAMPLE: [(&str, &str); 3] = [
    ("a.txt", "The threads were running hot! Each thread holds a lock. Locks are cheap?"),
    ("b.txt", "Users posted replies in the thread. The replies kept coming... Moderators closed it."),
    ("c.txt", "C++ and e-mail are dropped; plain words like parsers stay."),
];

pub fn run_example(dir: &Path, out: &Path) -> Result<(), Box<dyn std::error::Error>> {
    let raw = ingest_corpus(dir, "sample")?;
    println!("read {} documents from {}", raw.documents.len(), dir.display());

    let corpus = preprocess(&raw, &PreprocessConfig::default())?;
    for d in 0..corpus.num_documents().min(3) {
        let sentences: Vec<String> = corpus.sentences(d).map(|s| s.join(" ")).collect();
        println!("  {}: {}", raw.documents[d].doc_id, sentences.join(" | "));
    }
    println!(
        "{} tokens, {} distinct lemmas",
        corpus.total_tokens(),
        corpus.vocab_size()
    );
    let mut top: Vec<(&String, &usize)> = corpus.counts().iter().collect();
    top.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
    println!("most frequent: {:?}", &top[..top.len().min(5)]);

    cache::write_cache(&corpus, out, &BTreeMap::new())?;
    let back = cache::read_cache(out, "sample")?;
    assert_eq!(back.counts(), corpus.counts());
    println!("cache written to {}", cache::tokens_path(out, "sample").display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tmp = tempfile::tempdir()?;
    let dir = match std::env::args().nth(1) {
        Some(d) => d.into(),
        None => {
            for (name, text) in SAMPLE {
                std::fs::write(tmp.path().join(name), text)?;
            }
            tmp.path().to_path_buf()
        }
    };
    run_example(&dir, &tmp.path().join("cache"))
}
