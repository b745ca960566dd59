//! On-disk cache of a preprocessed corpus.
//!
//! `<domain>.tokens` holds one line per document: space-separated lemmas,
//! each sentence terminated by the reserved `</s>` token. `<domain>.meta`
//! is a `key=value` sidecar with at least `domain_id`, `total_tokens` and
//! `documents`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::Corpus;
use crate::error::{Error, Result};
use crate::kv;

pub const SENTENCE_END: &str = "</s>";

pub fn tokens_path(dir: &Path, domain_id: &str) -> PathBuf {
    dir.join(format!("{domain_id}.tokens"))
}

pub fn meta_path(dir: &Path, domain_id: &str) -> PathBuf {
    dir.join(format!("{domain_id}.meta"))
}

pub fn render_tokens(corpus: &Corpus) -> String {
    let mut out = String::new();
    for d in 0..corpus.num_documents() {
        let mut first = true;
        for sentence in corpus.sentences(d) {
            for tok in sentence.iter().map(String::as_str).chain([SENTENCE_END]) {
                if !first {
                    out.push(' ');
                }
                out.push_str(tok);
                first = false;
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_tokens(domain_id: &str, text: &str) -> Corpus {
    let docs = text
        .lines()
        .map(|line| {
            let mut sentences = Vec::new();
            let mut current = Vec::new();
            for tok in line.split_whitespace() {
                if tok == SENTENCE_END {
                    sentences.push(std::mem::take(&mut current));
                } else {
                    current.push(tok.to_string());
                }
            }
            if !current.is_empty() {
                sentences.push(current);
            }
            sentences
        })
        .collect();
    Corpus::from_sentences(domain_id, docs)
}

/// Writes the token file and metadata sidecar. `extra` entries are appended
/// to the sidecar after the required keys.
pub fn write_cache(corpus: &Corpus, dir: &Path, extra: &BTreeMap<String, String>) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tokens = tokens_path(dir, corpus.domain_id());
    fs::write(&tokens, render_tokens(corpus)).map_err(|e| Error::io(&tokens, e))?;
    let mut entries = vec![
        ("domain_id", corpus.domain_id().to_string()),
        ("total_tokens", corpus.total_tokens().to_string()),
        ("documents", corpus.num_documents().to_string()),
    ];
    entries.extend(extra.iter().map(|(k, v)| (k.as_str(), v.clone())));
    let meta = meta_path(dir, corpus.domain_id());
    fs::write(&meta, kv::render(entries)).map_err(|e| Error::io(&meta, e))
}

pub fn read_meta(dir: &Path, domain_id: &str) -> Result<BTreeMap<String, String>> {
    kv::read(&meta_path(dir, domain_id))
}

pub fn read_cache(dir: &Path, domain_id: &str) -> Result<Corpus> {
    let path = tokens_path(dir, domain_id);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let corpus = parse_tokens(domain_id, &text);
    let meta = read_meta(dir, domain_id)?;
    let ctx = meta_path(dir, domain_id).display().to_string();
    let expect = |key: &str, actual: usize| -> Result<()> {
        let v: usize = meta
            .get(key)
            .ok_or_else(|| Error::parse(&ctx, format!("missing key '{key}'")))?
            .parse()
            .map_err(|_| Error::parse(&ctx, format!("bad value for '{key}'")))?;
        if v != actual {
            return Err(Error::parse(&ctx, format!("{key}={v} but token file has {actual}")));
        }
        Ok(())
    };
    expect("total_tokens", corpus.total_tokens())?;
    expect("documents", corpus.num_documents())?;
    Ok(corpus)
}
