//! Corpus ingestion and preprocessing.
//!
//! Raw documents are read from a directory of `.txt` files and turned into
//! lemma streams with sentence boundaries, per-lemma counts and document
//! frequencies.

pub mod cache;
mod lemma;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::ops::Range;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub use lemma::{lemmatize, LemmatizerMode};
pub use text::{is_word, split_sentences, word_tokens};

const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// The bundled English stop-word list.
pub fn default_stopwords() -> BTreeSet<String> {
    parse_word_list(BUNDLED_STOPWORDS)
}

/// Reads a stop-word file: one word per line, `#` comments allowed.
pub fn read_stopwords(path: &Path) -> Result<BTreeSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_word_list(&text))
}

fn parse_word_list(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub doc_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCorpus {
    pub domain_id: String,
    pub documents: Vec<RawDocument>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Utf8Policy {
    #[default]
    Error,
    SkipWithWarning,
}

/// Reads every `.txt` file in `path` as one document, ordered by file name.
pub fn ingest_corpus(path: &Path, domain_id: &str) -> Result<RawCorpus> {
    ingest_corpus_with(path, domain_id, Utf8Policy::Error)
}

pub fn ingest_corpus_with(path: &Path, domain_id: &str, utf8: Utf8Policy) -> Result<RawCorpus> {
    if domain_id.is_empty() {
        return Err(Error::InvalidConfig("domain_id must be non-empty".into()));
    }
    if !path.is_dir() {
        return Err(Error::MissingDirectory(path.to_path_buf()));
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(path).map_err(|e| Error::io(path, e))? {
        let entry = entry.map_err(|e| Error::io(path, e))?;
        let p = entry.path();
        if p.is_file() && p.extension().is_some_and(|e| e == "txt") {
            files.push(p);
        }
    }
    if files.is_empty() {
        return Err(Error::EmptyCorpus(path.to_path_buf()));
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));

    let mut documents = Vec::with_capacity(files.len());
    for file in files {
        let bytes = fs::read(&file).map_err(|e| Error::io(&file, e))?;
        let doc_id = file.file_name().unwrap_or_default().to_string_lossy().into_owned();
        match String::from_utf8(bytes) {
            Ok(text) => documents.push(RawDocument { doc_id, text }),
            Err(_) if utf8 == Utf8Policy::SkipWithWarning => {
                log::warn!("skipping non-UTF-8 file {}", file.display());
            }
            Err(_) => return Err(Error::NotUtf8(file)),
        }
    }
    if documents.is_empty() {
        return Err(Error::EmptyCorpus(path.to_path_buf()));
    }
    Ok(RawCorpus {
        domain_id: domain_id.to_string(),
        documents,
    })
}

#[derive(Debug, Clone)]
pub struct PreprocessConfig {
    pub stopwords: BTreeSet<String>,
    pub lemmatizer: LemmatizerMode,
    pub min_token_length: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            stopwords: default_stopwords(),
            lemmatizer: LemmatizerMode::RuleBased,
            min_token_length: 2,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_token_length == 0 {
            return Err(Error::InvalidConfig("min_token_length must be >= 1".into()));
        }
        if let Some(w) = self.stopwords.iter().find(|w| w.to_lowercase() != **w) {
            return Err(Error::InvalidConfig(format!("stopword '{w}' is not lowercase")));
        }
        Ok(())
    }

    fn process_document(&self, text: &str) -> Vec<Vec<String>> {
        split_sentences(text)
            .into_iter()
            .map(|s| {
                word_tokens(s)
                    .filter(|t| !self.stopwords.contains(t))
                    .map(|t| self.lemmatizer.apply(t))
                    .filter(|t| t.chars().count() >= self.min_token_length)
                    .collect::<Vec<_>>()
            })
            .filter(|s| !s.is_empty())
            .collect()
    }
}

/// Preprocessed lemma streams for one domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    domain_id: String,
    tokens: Vec<Vec<String>>,
    sentences: Vec<Vec<Range<usize>>>,
    counts: BTreeMap<String, usize>,
    doc_freq: BTreeMap<String, usize>,
    total_tokens: usize,
}

impl Corpus {
    /// Builds a corpus from already-tokenized documents, each a list of
    /// sentences. Empty sentences are dropped.
    pub fn from_sentences(domain_id: &str, docs: Vec<Vec<Vec<String>>>) -> Self {
        let mut tokens = Vec::with_capacity(docs.len());
        let mut sentences = Vec::with_capacity(docs.len());
        let mut counts = BTreeMap::new();
        let mut doc_freq = BTreeMap::new();
        for doc in docs {
            let mut flat = Vec::new();
            let mut ranges = Vec::new();
            for sentence in doc.into_iter().filter(|s| !s.is_empty()) {
                let start = flat.len();
                flat.extend(sentence);
                ranges.push(start..flat.len());
            }
            let mut seen = BTreeSet::new();
            for t in &flat {
                *counts.entry(t.clone()).or_insert(0) += 1;
                if seen.insert(t.as_str()) {
                    *doc_freq.entry(t.clone()).or_insert(0) += 1;
                }
            }
            tokens.push(flat);
            sentences.push(ranges);
        }
        let total_tokens = tokens.iter().map(Vec::len).sum();
        Corpus {
            domain_id: domain_id.to_string(),
            tokens,
            sentences,
            counts,
            doc_freq,
            total_tokens,
        }
    }

    pub fn domain_id(&self) -> &str {
        &self.domain_id
    }

    pub fn num_documents(&self) -> usize {
        self.tokens.len()
    }

    /// Lemma stream of document `doc`.
    pub fn document(&self, doc: usize) -> &[String] {
        &self.tokens[doc]
    }

    pub fn documents(&self) -> impl Iterator<Item = &[String]> {
        self.tokens.iter().map(Vec::as_slice)
    }

    pub fn sentence_ranges(&self, doc: usize) -> &[Range<usize>] {
        &self.sentences[doc]
    }

    pub fn sentences(&self, doc: usize) -> impl Iterator<Item = &[String]> {
        self.sentences[doc].iter().map(move |r| &self.tokens[doc][r.clone()])
    }

    pub fn counts(&self) -> &BTreeMap<String, usize> {
        &self.counts
    }

    pub fn count(&self, w: &str) -> usize {
        self.counts.get(w).copied().unwrap_or(0)
    }

    pub fn doc_freq(&self) -> &BTreeMap<String, usize> {
        &self.doc_freq
    }

    pub fn total_tokens(&self) -> usize {
        self.total_tokens
    }

    pub fn vocab_size(&self) -> usize {
        self.counts.len()
    }

    /// Every sentence that contains `w`, as its full token list (including
    /// `w` itself).
    pub fn sentence_contexts(&self, w: &str) -> Vec<&[String]> {
        if !self.counts.contains_key(w) {
            return Vec::new();
        }
        (0..self.num_documents())
            .flat_map(|d| self.sentences(d))
            .filter(|s| s.iter().any(|t| t == w))
            .collect()
    }

    /// Renders the corpus back to text, one line per document with
    /// sentences ending in `. `.
    pub fn render_text(&self) -> Vec<String> {
        (0..self.num_documents())
            .map(|d| {
                self.sentences(d)
                    .map(|s| format!("{}.", s.join(" ")))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }
}

/// Runs the preprocessing pipeline over every document of `raw`.
///
/// Per document: sentence split, whitespace tokenization, lowercasing,
/// dropping tokens with non-alphanumeric characters, stop-word removal,
/// lemmatization and the minimum length filter, in that order.
pub fn preprocess(raw: &RawCorpus, config: &PreprocessConfig) -> Result<Corpus> {
    config.validate()?;
    let docs: Vec<Vec<Vec<String>>> = raw
        .documents
        .par_iter()
        .map(|d| config.process_document(&d.text))
        .collect();
    Ok(Corpus::from_sentences(&raw.domain_id, docs))
}
