//! Ambiguity scores and ranked reports.
//!
//! A word's score is the mean cosine distance over unordered pairs of its
//! transformed domain vectors, each pair weighted by the sum of the word's
//! counts in the two domains.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::RowDVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::UnifiedSpace;
use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::selection::TargetWordSet;

/// Scores above this are flagged for inspection in reports.
pub const INSPECT_THRESHOLD: f64 = 1.5;

/// `1 - cos(a, b)`, clamped to `[0, 2]`.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!("vectors of length {} and {}", a.len(), b.len())));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((1.0 - dot / (na * nb)).clamp(0.0, 2.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDistance {
    pub domain_a: String,
    pub domain_b: String,
    pub distance: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityScore {
    pub word: String,
    pub score: f64,
    /// Count per domain, in ranking domain order; zero where absent.
    pub counts: Vec<usize>,
    pub pairs: Vec<PairDistance>,
}

/// One domain's view of a word: its count and transformed vector.
#[derive(Debug, Clone)]
pub struct DomainVector<'a> {
    pub domain_id: &'a str,
    pub count: usize,
    pub vector: Vec<f64>,
}

/// Weighted mean of pairwise cosine distances over unordered pairs.
pub fn score_vectors(word: &str, entries: &[DomainVector<'_>]) -> Result<(f64, Vec<PairDistance>)> {
    if entries.len() < 2 {
        return Err(Error::InsufficientDomains(word.to_string()));
    }
    let mut pairs = Vec::with_capacity(entries.len() * (entries.len() - 1) / 2);
    let (mut num, mut den) = (0.0, 0.0);
    for (i, a) in entries.iter().enumerate() {
        for b in &entries[i + 1..] {
            let distance = cosine_distance(&a.vector, &b.vector)?;
            let weight = (a.count + b.count) as f64;
            num += weight * distance;
            den += weight;
            pairs.push(PairDistance {
                domain_a: a.domain_id.to_string(),
                domain_b: b.domain_id.to_string(),
                distance,
                weight,
            });
        }
    }
    let score = if den > 0.0 {
        num / den
    } else {
        // All counts zero: fall back to the unweighted mean.
        pairs.iter().map(|p| p.distance).sum::<f64>() / pairs.len() as f64
    };
    Ok((score, pairs))
}

/// Scores `w` from its transformed vectors `S_i(w) M_i` in every space that
/// contains it. `counts[i]` belongs to `spaces[i]`.
pub fn score_word(
    w: &str,
    unified: &UnifiedSpace,
    spaces: &[EmbeddingSpace],
    counts: &[&BTreeMap<String, usize>],
) -> Result<AmbiguityScore> {
    if spaces.len() != counts.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} spaces but {} count tables",
            spaces.len(),
            counts.len()
        )));
    }
    let mut entries = Vec::new();
    for (space, c) in spaces.iter().zip(counts) {
        let Some(row) = space.vector(w) else { continue };
        let m = unified
            .transform(space.domain_id())
            .ok_or_else(|| Error::UnknownWord(format!("no transform for domain '{}'", space.domain_id())))?;
        let v: RowDVector<f64> = row * &m.matrix;
        entries.push(DomainVector {
            domain_id: space.domain_id(),
            count: c.get(w).copied().unwrap_or(0),
            vector: v.iter().copied().collect(),
        });
    }
    let (score, pairs) = score_vectors(w, &entries)?;
    Ok(AmbiguityScore {
        word: w.to_string(),
        score,
        counts: counts.iter().map(|c| c.get(w).copied().unwrap_or(0)).collect(),
        pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityRanking {
    pub method: String,
    pub domains: Vec<String>,
    pub entries: Vec<AmbiguityScore>,
}

impl AmbiguityRanking {
    /// Sorts by descending score, ties by ascending word.
    pub fn from_scores(method: &str, domains: Vec<String>, mut entries: Vec<AmbiguityScore>) -> Self {
        entries.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.word.cmp(&b.word)));
        Self {
            method: method.to_string(),
            domains,
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.word.as_str())
    }

    /// 1-based rank of `w`.
    pub fn rank_of(&self, w: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.word == w).map(|p| p + 1)
    }

    pub fn get(&self, w: &str) -> Option<&AmbiguityScore> {
        self.entries.iter().find(|e| e.word == w)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &AmbiguityScore> {
        self.entries.iter().filter(|e| e.score > INSPECT_THRESHOLD)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("rank,word,score");
        for d in &self.domains {
            let _ = write!(s, ",count_{d}");
        }
        s.push_str(",pairs\n");
        for (i, e) in self.entries.iter().enumerate() {
            let _ = write!(s, "{},{},{}", i + 1, e.word, e.score);
            for c in &e.counts {
                let _ = write!(s, ",{c}");
            }
            let pairs: Vec<String> = e
                .pairs
                .iter()
                .map(|p| format!("{}|{}={}@{}", p.domain_a, p.domain_b, p.distance, p.weight))
                .collect();
            let _ = writeln!(s, ",{}", pairs.join(";"));
        }
        s
    }

    pub fn from_csv(method: &str, text: &str) -> Result<Self> {
        let ctx = format!("{method} ranking csv");
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let headers = rdr.headers()?.clone();
        let n = headers.len();
        if n < 4 || &headers[0] != "rank" || &headers[1] != "word" || &headers[2] != "score" || &headers[n - 1] != "pairs"
        {
            return Err(Error::parse(&ctx, "unexpected header"));
        }
        let domains = headers
            .iter()
            .skip(3)
            .take(n - 4)
            .map(|h| {
                h.strip_prefix("count_")
                    .map(String::from)
                    .ok_or_else(|| Error::parse(&ctx, format!("bad column '{h}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        let bad = |m: &str| Error::parse(&ctx, m.to_string());
        let mut entries = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let score: f64 = rec[2].parse().map_err(|_| bad("bad score"))?;
            let counts = (3..n - 1)
                .map(|i| rec[i].parse().map_err(|_| bad("bad count")))
                .collect::<Result<Vec<usize>>>()?;
            let pairs = rec[n - 1]
                .split(';')
                .filter(|p| !p.is_empty())
                .map(|p| {
                    let (names, rest) = p.split_once('=').ok_or_else(|| bad("bad pair"))?;
                    let (a, b) = names.split_once('|').ok_or_else(|| bad("bad pair"))?;
                    let (dist, weight) = rest.split_once('@').ok_or_else(|| bad("bad pair"))?;
                    Ok(PairDistance {
                        domain_a: a.to_string(),
                        domain_b: b.to_string(),
                        distance: dist.parse().map_err(|_| bad("bad distance"))?,
                        weight: weight.parse().map_err(|_| bad("bad weight"))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            entries.push(AmbiguityScore {
                word: rec[1].to_string(),
                score,
                counts,
                pairs,
            });
        }
        Ok(Self {
            method: method.to_string(),
            domains,
            entries,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path, method: &str) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(method, &text)
    }
}

/// Scores every target word and sorts the result. Words present in fewer
/// than two spaces are skipped with a warning.
pub fn rank_targets(
    targets: &TargetWordSet,
    unified: &UnifiedSpace,
    spaces: &[EmbeddingSpace],
    counts: &[&BTreeMap<String, usize>],
) -> Result<AmbiguityRanking> {
    if targets.is_empty() {
        return Err(Error::NoTargetWords);
    }
    let words: Vec<&str> = targets.words().collect();
    let scored: Vec<Result<AmbiguityScore>> = words
        .par_iter()
        .map(|w| score_word(w, unified, spaces, counts))
        .collect();
    let mut entries = Vec::with_capacity(scored.len());
    for r in scored {
        match r {
            Ok(s) => entries.push(s),
            Err(Error::InsufficientDomains(w)) => log::warn!("skipping '{w}': embedded in fewer than 2 domains"),
            Err(e) => return Err(e),
        }
    }
    let domains = spaces.iter().map(|s| s.domain_id().to_string()).collect();
    let ranking = AmbiguityRanking::from_scores("procrustes", domains, entries);
    for e in ranking.flagged() {
        log::warn!("'{}' scored {} (> {INSPECT_THRESHOLD}); inspect", e.word, e.score);
    }
    Ok(ranking)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub word: String,
    pub rank_a: usize,
    pub rank_b: usize,
    pub abs_diff: usize,
}

/// Rank differences between two rankings, largest first (ties by word),
/// truncated to `top_m`. Ranks are 1-based positions after restricting both
/// rankings to their shared words.
pub fn compare_rankings(a: &AmbiguityRanking, b: &AmbiguityRanking, top_m: usize) -> Result<Vec<Disagreement>> {
    let in_b: HashMap<&str, ()> = b.words().map(|w| (w, ())).collect();
    let in_a: HashMap<&str, ()> = a.words().map(|w| (w, ())).collect();
    let shared_a: Vec<&str> = a.words().filter(|w| in_b.contains_key(w)).collect();
    let shared_b: Vec<&str> = b.words().filter(|w| in_a.contains_key(w)).collect();
    if shared_a.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    if shared_a.len() != a.len() || shared_b.len() != b.len() {
        log::warn!(
            "rankings cover different words ({} vs {}); comparing the {} shared",
            a.len(),
            b.len(),
            shared_a.len()
        );
    }
    let rank_b: HashMap<&str, usize> = shared_b.iter().enumerate().map(|(i, w)| (*w, i + 1)).collect();
    let mut rows: Vec<Disagreement> = shared_a
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let (ra, rb) = (i + 1, rank_b[w]);
            Disagreement {
                word: w.to_string(),
                rank_a: ra,
                rank_b: rb,
                abs_diff: ra.abs_diff(rb),
            }
        })
        .collect();
    rows.sort_by(|x, y| y.abs_diff.cmp(&x.abs_diff).then_with(|| x.word.cmp(&y.word)));
    rows.truncate(top_m);
    Ok(rows)
}

pub fn disagreements_to_csv(rows: &[Disagreement]) -> String {
    let mut s = String::from("word,rank_a,rank_b,abs_diff\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.word, r.rank_a, r.rank_b, r.abs_diff);
    }
    s
}
