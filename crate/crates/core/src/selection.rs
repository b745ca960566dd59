//! Target word selection: frequent content words that are also frequent in
//! at least one other domain.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED_LEXICON: &str = include_str!("../data/pos_lexicon.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PosTag {
    Noun,
    Verb,
    Adj,
    Adv,
    Other,
}

impl FromStr for PosTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "NOUN" => Ok(PosTag::Noun),
            "VERB" => Ok(PosTag::Verb),
            "ADJ" => Ok(PosTag::Adj),
            "ADV" => Ok(PosTag::Adv),
            "OTHER" => Ok(PosTag::Other),
            other => Err(format!("unknown POS tag '{other}'")),
        }
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PosTag::Noun => "NOUN",
            PosTag::Verb => "VERB",
            PosTag::Adj => "ADJ",
            PosTag::Adv => "ADV",
            PosTag::Other => "OTHER",
        })
    }
}

/// Type-level POS dictionary: lemma -> set of coarse tags.
#[derive(Debug, Clone, Default)]
pub struct PosLexicon {
    entries: HashMap<String, BTreeSet<PosTag>>,
}

impl PosLexicon {
    /// The bundled lexicon, derived from the WordNet 3.0 lemma index
    /// (single-word, lowercase alphanumeric lemmas only).
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEXICON, "bundled lexicon").expect("bundled lexicon is well-formed")
    }

    /// Parses `lemma TAG[,TAG...]` lines.
    pub fn parse(text: &str, context: &str) -> Result<Self> {
        let mut entries: HashMap<String, BTreeSet<PosTag>> = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, tags) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::parse(context, format!("line {}: expected 'lemma TAGS'", lineno + 1)))?;
            let set = entries.entry(word.to_lowercase()).or_default();
            for tag in tags.trim().split(',') {
                set.insert(
                    tag.parse()
                        .map_err(|e: String| Error::parse(context, format!("line {}: {e}", lineno + 1)))?,
                );
            }
        }
        Ok(Self { entries })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn from_entries<'a>(entries: impl IntoIterator<Item = (&'a str, &'a [PosTag])>) -> Self {
        Self {
            entries: entries
                .into_iter()
                .map(|(w, t)| (w.to_string(), t.iter().copied().collect()))
                .collect(),
        }
    }

    pub fn insert(&mut self, word: &str, tags: &[PosTag]) {
        self.entries.entry(word.to_string()).or_default().extend(tags);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, w: &str) -> BTreeSet<PosTag> {
        pos_lookup(self, w)
    }
}

pub fn pos_lookup(lexicon: &PosLexicon, w: &str) -> BTreeSet<PosTag> {
    lexicon
        .entries
        .get(w)
        .cloned()
        .unwrap_or_else(|| BTreeSet::from([PosTag::Other]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConfig {
    pub k: usize,
    pub rho: f64,
    pub content_pos: BTreeSet<PosTag>,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            k: 1000,
            rho: 0.5,
            content_pos: BTreeSet::from([PosTag::Noun, PosTag::Verb, PosTag::Adj]),
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidConfig("k must be >= 1".into()));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::InvalidConfig(format!("rho must be in (0, 1], got {}", self.rho)));
        }
        Ok(())
    }

    /// Warns when a selected word could be missing from an embedding space,
    /// which happens only if `min_freq > rho * k`.
    pub fn check_min_freq(&self, min_freq: usize) -> bool {
        let ok = self.rho * self.k as f64 >= min_freq as f64;
        if !ok {
            log::warn!(
                "min_freq {min_freq} exceeds rho*k = {}; some targets may lack embeddings",
                self.rho * self.k as f64
            );
        }
        ok
    }
}

/// Selected words with the per-domain counts they were selected on.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TargetWordSet {
    pub counts: BTreeMap<String, Vec<usize>>,
}

impl TargetWordSet {
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }

    pub fn contains(&self, w: &str) -> bool {
        self.counts.contains_key(w)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Sorted word list, one per line.
    pub fn to_text(&self) -> String {
        self.words().map(|w| format!("{w}\n")).collect()
    }
}

/// Largest and second-largest entries; absent domains count as zero.
fn top_two(counts: &[usize]) -> (usize, usize) {
    counts.iter().fold((0, 0), |(a, b), &c| {
        if c > a {
            (c, a)
        } else if c > b {
            (a, c)
        } else {
            (a, b)
        }
    })
}

/// `w` is selected iff it has a content POS tag, its largest per-domain
/// count `c1` is at least `k`, and its second-largest count is at least
/// `rho * c1`.
pub fn select_targets(
    stats: &[&BTreeMap<String, usize>],
    config: &SelectionConfig,
    lexicon: &PosLexicon,
) -> Result<TargetWordSet> {
    config.validate()?;
    if stats.len() < 2 {
        return Err(Error::TooFewDomains(stats.len()));
    }
    let union: BTreeSet<&String> = stats.iter().flat_map(|m| m.keys()).collect();
    let counts = union
        .into_par_iter()
        .filter(|w| !pos_lookup(lexicon, w).is_disjoint(&config.content_pos))
        .filter_map(|w| {
            let counts: Vec<usize> = stats.iter().map(|m| m.get(w).copied().unwrap_or(0)).collect();
            let (c1, c2) = top_two(&counts);
            (c1 >= config.k && c2 as f64 >= config.rho * c1 as f64).then(|| (w.clone(), counts))
        })
        .collect();
    Ok(TargetWordSet { counts })
}
