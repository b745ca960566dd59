//! Synthetic corpora with known structure, for demos and tests.
//!
//! [`planted_ambiguity`] builds two domain corpora from shared topics. Every
//! word keeps the same topic in both domains except one planted word, which
//! lives in a different topic in each domain.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Frequent English nouns that pass preprocessing unchanged. The first entry
/// is the planted word.
pub const WORD_POOL: &[&str] = &[
    "thread", "power", "couple", "talk", "issue", "support", "face", "hand", "check", "night",
    "line", "example", "link", "girl", "deal", "family", "number", "water", "house", "food",
    "state", "movie", "body", "turn", "sort", "answer", "country", "sound", "word", "opinion",
    "player", "rest", "music", "type", "book", "phone", "order", "control", "chance", "season",
    "group", "picture", "cause", "damage", "room", "front", "list", "price", "area", "build",
    "human", "action", "luck", "woman", "month", "company", "version", "future", "account", "cost",
    "public", "fight", "shot", "light", "contact", "card", "article", "break", "drive", "child",
    "party", "title", "argument", "college", "quality", "history", "advice", "form", "choice", "joke",
    "store", "page", "space", "moment", "value", "site", "evidence", "middle", "plan", "weight",
    "hour", "trade", "song", "figure", "computer", "term", "market", "position", "size", "hair",
    "wife", "fire", "content", "stand", "style", "police", "source", "option", "drop", "view",
    "force", "data", "message", "wonder", "test", "walk", "service", "health", "ability", "response",
    "attack", "piece", "vote", "image", "code", "effect", "religion", "match", "pain", "mother",
    "range", "gold", "share", "beer", "text", "language", "interest", "door", "offer", "drink",
    "science", "stick", "rate", "ground", "date", "base", "server", "standard", "ball", "field",
    "info", "step", "research", "brother", "episode", "town", "respect", "note", "skin", "rule",
    "brain",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedConfig {
    pub tokens_per_domain: usize,
    pub doc_length: usize,
    pub sentence_length: usize,
    pub topics: usize,
    pub words_per_topic: usize,
    pub controls: usize,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        Self {
            tokens_per_domain: 50_000,
            doc_length: 100,
            sentence_length: 10,
            topics: 12,
            words_per_topic: 10,
            controls: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedCorpora {
    pub planted: String,
    pub controls: Vec<String>,
    pub topic_words: Vec<Vec<String>>,
    pub corpora: Vec<Corpus>,
}

pub const PLANTED_DOMAINS: [&str; 2] = ["alpha", "beta"];

/// Two single-topic-per-document corpora. Topic words and control words
/// have identical distributions in both domains; the planted word sits in
/// topic 0 in `alpha` and topic 1 in `beta`.
pub fn planted_ambiguity(config: &PlantedConfig) -> Result<PlantedCorpora> {
    let needed = 1 + config.controls + config.topics * config.words_per_topic;
    if needed > WORD_POOL.len() {
        return Err(Error::InvalidConfig(format!(
            "need {needed} distinct words, pool has {}",
            WORD_POOL.len()
        )));
    }
    if config.topics < 2 || config.words_per_topic == 0 || config.sentence_length == 0 || config.doc_length == 0 {
        return Err(Error::InvalidConfig("degenerate synthetic corpus shape".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let planted = WORD_POOL[0].to_string();
    let mut pool: Vec<&str> = WORD_POOL[1..].to_vec();
    pool.shuffle(&mut rng);
    let controls: Vec<String> = pool[..config.controls].iter().map(|s| s.to_string()).collect();
    let topic_words: Vec<Vec<String>> = pool[config.controls..]
        .chunks(config.words_per_topic)
        .take(config.topics)
        .map(|c| c.iter().map(|s| s.to_string()).collect())
        .collect();

    // Members of each topic, shared by both domains.
    let mut members: Vec<Vec<String>> = topic_words.clone();
    for (j, c) in controls.iter().enumerate() {
        members[j % config.topics].push(c.clone());
    }

    let docs_per_domain = config.tokens_per_domain.div_ceil(config.doc_length);
    let corpora = PLANTED_DOMAINS
        .iter()
        .enumerate()
        .map(|(d, domain)| {
            let mut domain_members = members.clone();
            domain_members[d].push(planted.clone());
            let mut drng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_mul(31).wrapping_add(d as u64 + 1));
            let docs = (0..docs_per_domain)
                .map(|i| {
                    let topic = &domain_members[i % config.topics];
                    let mut remaining = config.doc_length;
                    let mut sentences = Vec::new();
                    while remaining > 0 {
                        let len = remaining.min(config.sentence_length);
                        sentences.push((0..len).map(|_| topic[drng.random_range(0..topic.len())].clone()).collect());
                        remaining -= len;
                    }
                    sentences
                })
                .collect();
            Corpus::from_sentences(domain, docs)
        })
        .collect();
    Ok(PlantedCorpora {
        planted,
        controls,
        topic_words,
        corpora,
    })
}

impl PlantedCorpora {
    /// Writes each domain as a directory of text files under `root`, one
    /// file per document. Returns `(domain_id, directory)` pairs.
    pub fn write_text(&self, root: &Path) -> Result<Vec<(String, PathBuf)>> {
        let mut out = Vec::new();
        for corpus in &self.corpora {
            let dir = root.join(corpus.domain_id());
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            for (i, text) in corpus.render_text().iter().enumerate() {
                let p = dir.join(format!("doc_{i:05}.txt"));
                fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
            }
            out.push((corpus.domain_id().to_string(), dir));
        }
        Ok(out)
    }
}

/// One document of `pairs` repetitions of `x follows y p follows q`, so
/// `x`/`p` and `y`/`q` occur in identical windows.
pub fn interchangeable_tokens(pairs: usize) -> Corpus {
    let doc: Vec<String> = (0..pairs)
        .flat_map(|_| ["x", "follows", "y", "p", "follows", "q"])
        .map(String::from)
        .collect();
    Corpus::from_sentences("synthetic", vec![vec![doc]])
}
