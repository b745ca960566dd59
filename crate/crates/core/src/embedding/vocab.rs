use std::collections::HashMap;

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Training vocabulary: lemmas with count >= `min_freq`, most frequent first,
/// ties in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    words: Vec<String>,
    counts: Vec<usize>,
    index: HashMap<String, usize>,
}

impl Vocab {
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, w: &str) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Maps a document onto vocabulary indices, skipping out-of-vocabulary
    /// tokens.
    pub fn encode(&self, doc: &[String]) -> Vec<u32> {
        doc.iter()
            .filter_map(|t| self.index_of(t).map(|i| i as u32))
            .collect()
    }
}

pub fn build_vocab(corpus: &Corpus, min_freq: usize) -> Result<Vocab> {
    let mut entries: Vec<(&String, usize)> = corpus
        .counts()
        .iter()
        .filter(|(_, &c)| c >= min_freq)
        .map(|(w, &c)| (w, c))
        .collect();
    if entries.is_empty() {
        return Err(Error::EmptyVocabulary { min_freq });
    }
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let words: Vec<String> = entries.iter().map(|(w, _)| (*w).clone()).collect();
    let counts = entries.iter().map(|(_, c)| *c).collect();
    let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    Ok(Vocab {
        words,
        counts,
        index,
    })
}
