//! Local-context comparison methods.
//!
//! * Context similarity: cosine between IDF-weighted centroids of the
//!   sentences containing a word, one centroid per domain corpus, over a
//!   single shared embedding space.
//! * Nearest-neighbor overlap: one minus the overlap of a word's `n`
//!   nearest neighbors in two domain spaces. The aggregation into a score
//!   is a stand-in; the original method does not define one.
//!
//! Both produce [`AmbiguityRanking`]s in the same schema as the main
//! scorer so that [`compare_rankings`](crate::scoring::compare_rankings)
//! applies directly.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DVector, RowDVector};
use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::scoring::{AmbiguityRanking, AmbiguityScore, PairDistance};
use crate::selection::TargetWordSet;

pub const CONTEXT_METHOD: &str = "context_similarity";
pub const NN_METHOD: &str = "nn_overlap";
pub const DEFAULT_NEIGHBORS: usize = 50;

/// `ln(N / df)` for every lemma of one corpus.
#[derive(Debug, Clone)]
pub struct IdfTable {
    values: HashMap<String, f64>,
    documents: usize,
}

impl IdfTable {
    pub fn new(corpus: &Corpus) -> Self {
        let n = corpus.num_documents() as f64;
        let values = corpus
            .doc_freq()
            .iter()
            .map(|(w, &df)| (w.clone(), (n / df as f64).ln()))
            .collect();
        Self {
            values,
            documents: corpus.num_documents(),
        }
    }

    pub fn get(&self, w: &str) -> Option<f64> {
        self.values.get(w).copied()
    }

    /// A single-document corpus has IDF zero everywhere.
    pub fn is_degenerate(&self) -> bool {
        self.documents <= 1
    }
}

pub fn idf(corpus: &Corpus, w: &str) -> Result<f64> {
    let df = *corpus.doc_freq().get(w).ok_or_else(|| Error::UnknownWord(w.to_string()))?;
    Ok((corpus.num_documents() as f64 / df as f64).ln())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ContextOptions {
    /// Leave the word's own occurrences out of its context multiset.
    pub exclude_target: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContextCenter {
    pub vector: DVector<f64>,
    pub word: String,
    pub domain_id: String,
    /// Context tokens that had an embedding (the `|c|` divisor).
    pub size: usize,
}

impl ContextCenter {
    pub fn is_zero(&self) -> bool {
        self.vector.iter().all(|&x| x == 0.0)
    }
}

/// IDF-weighted mean embedding of every token in the sentences containing
/// `w`. Tokens without an embedding are skipped and not counted.
pub fn context_center(
    corpus: &Corpus,
    w: &str,
    embeddings: &EmbeddingSpace,
    options: ContextOptions,
) -> Result<ContextCenter> {
    let contexts = corpus.sentence_contexts(w);
    if contexts.is_empty() {
        return Err(Error::UnknownWord(w.to_string()));
    }
    let idf_table = IdfTable::new(corpus);
    let mut sum = DVector::<f64>::zeros(embeddings.dim());
    let mut size = 0;
    for token in contexts.into_iter().flatten() {
        if options.exclude_target && token == w {
            continue;
        }
        let Some(i) = embeddings.index_of(token) else { continue };
        let weight = idf_table.get(token).unwrap_or(0.0);
        sum += embeddings.matrix().row(i).transpose() * weight;
        size += 1;
    }
    if size == 0 {
        return Err(Error::ZeroCenter {
            word: w.to_string(),
            domain: corpus.domain_id().to_string(),
            hint: " (no context word has an embedding)",
        });
    }
    Ok(ContextCenter {
        vector: sum / size as f64,
        word: w.to_string(),
        domain_id: corpus.domain_id().to_string(),
        size,
    })
}

fn zero_center_error(center: &ContextCenter, corpus: &Corpus) -> Error {
    Error::ZeroCenter {
        word: center.word.clone(),
        domain: corpus.domain_id().to_string(),
        hint: if corpus.num_documents() <= 1 {
            " (single-document corpus: every IDF is ln(1) = 0)"
        } else {
            ""
        },
    }
}

fn cosine(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0)
}

/// Cosine similarity of the two context centers of `w`.
pub fn context_similarity(
    w: &str,
    corpus_a: &Corpus,
    corpus_b: &Corpus,
    embeddings: &EmbeddingSpace,
    options: ContextOptions,
) -> Result<f64> {
    let ca = context_center(corpus_a, w, embeddings, options)?;
    let cb = context_center(corpus_b, w, embeddings, options)?;
    if ca.is_zero() {
        return Err(zero_center_error(&ca, corpus_a));
    }
    if cb.is_zero() {
        return Err(zero_center_error(&cb, corpus_b));
    }
    Ok(cosine(&ca.vector, &cb.vector))
}

/// Per-sentence IDF-weighted sums, so that every word's context center is a
/// sum over the sentences containing it.
pub struct ContextIndex<'a> {
    corpus: &'a Corpus,
    embeddings: &'a EmbeddingSpace,
    idf: IdfTable,
    sentence_sums: Vec<(DVector<f64>, usize)>,
    postings: HashMap<&'a str, Vec<(usize, usize)>>,
}

impl<'a> ContextIndex<'a> {
    pub fn new(corpus: &'a Corpus, embeddings: &'a EmbeddingSpace) -> Self {
        let idf = IdfTable::new(corpus);
        let mut sentence_sums = Vec::new();
        let mut postings: HashMap<&str, Vec<(usize, usize)>> = HashMap::new();
        for d in 0..corpus.num_documents() {
            for sentence in corpus.sentences(d) {
                let id = sentence_sums.len();
                let mut sum = DVector::<f64>::zeros(embeddings.dim());
                let mut size = 0;
                let mut occurrences: BTreeMap<&str, usize> = BTreeMap::new();
                for token in sentence {
                    *occurrences.entry(token.as_str()).or_insert(0) += 1;
                    if let Some(i) = embeddings.index_of(token) {
                        sum += embeddings.matrix().row(i).transpose() * idf.get(token).unwrap_or(0.0);
                        size += 1;
                    }
                }
                for (t, n) in occurrences {
                    postings.entry(t).or_default().push((id, n));
                }
                sentence_sums.push((sum, size));
            }
        }
        Self {
            corpus,
            embeddings,
            idf,
            sentence_sums,
            postings,
        }
    }

    pub fn center(&self, w: &str, options: ContextOptions) -> Result<ContextCenter> {
        let posts = self.postings.get(w).ok_or_else(|| Error::UnknownWord(w.to_string()))?;
        let own = self.embeddings.index_of(w);
        let mut sum = DVector::<f64>::zeros(self.embeddings.dim());
        let mut size = 0;
        for &(id, occurrences) in posts {
            let (s, n) = &self.sentence_sums[id];
            sum += s;
            size += n;
            if let (true, Some(i)) = (options.exclude_target, own) {
                let weight = self.idf.get(w).unwrap_or(0.0) * occurrences as f64;
                sum -= self.embeddings.matrix().row(i).transpose() * weight;
                size -= occurrences;
            }
        }
        if size == 0 {
            return Err(Error::ZeroCenter {
                word: w.to_string(),
                domain: self.corpus.domain_id().to_string(),
                hint: " (no context word has an embedding)",
            });
        }
        Ok(ContextCenter {
            vector: sum / size as f64,
            word: w.to_string(),
            domain_id: self.corpus.domain_id().to_string(),
            size,
        })
    }
}

/// Ranks targets by `1 - simc`, averaged without weights over every pair of
/// domain corpora. `shared` is one embedding space common to all domains.
pub fn rank_context_similarity(
    targets: &TargetWordSet,
    corpora: &[Corpus],
    shared: &EmbeddingSpace,
    options: ContextOptions,
) -> Result<AmbiguityRanking> {
    if targets.is_empty() {
        return Err(Error::NoTargetWords);
    }
    if corpora.len() < 2 {
        return Err(Error::TooFewDomains(corpora.len()));
    }
    if let Some(c) = corpora.iter().find(|c| c.num_documents() <= 1) {
        return Err(Error::InvalidConfig(format!(
            "context similarity needs multi-document corpora; '{}' has one document, so every IDF is 0",
            c.domain_id()
        )));
    }
    let indexes: Vec<ContextIndex> = corpora.iter().map(|c| ContextIndex::new(c, shared)).collect();
    let words: Vec<&str> = targets.words().collect();
    let scored: Vec<Result<Option<AmbiguityScore>>> = words
        .par_iter()
        .map(|&w| {
            let mut centers = Vec::new();
            for (idx, corpus) in indexes.iter().zip(corpora) {
                match idx.center(w, options) {
                    Ok(c) if c.is_zero() => {
                        log::warn!("{}", zero_center_error(&c, corpus));
                    }
                    Ok(c) => centers.push(c),
                    Err(Error::UnknownWord(_)) => {}
                    Err(e @ Error::ZeroCenter { .. }) => log::warn!("{e}"),
                    Err(e) => return Err(e),
                }
            }
            if centers.len() < 2 {
                log::warn!("skipping '{w}': context centers in fewer than 2 domains");
                return Ok(None);
            }
            let mut pairs = Vec::new();
            for (i, a) in centers.iter().enumerate() {
                for b in &centers[i + 1..] {
                    pairs.push(PairDistance {
                        domain_a: a.domain_id.clone(),
                        domain_b: b.domain_id.clone(),
                        distance: (1.0 - cosine(&a.vector, &b.vector)).clamp(0.0, 2.0),
                        weight: 1.0,
                    });
                }
            }
            let score = pairs.iter().map(|p| p.distance).sum::<f64>() / pairs.len() as f64;
            Ok(Some(AmbiguityScore {
                word: w.to_string(),
                score,
                counts: corpora.iter().map(|c| c.count(w)).collect(),
                pairs,
            }))
        })
        .collect();
    let entries = scored.into_iter().filter_map(Result::transpose).collect::<Result<Vec<_>>>()?;
    let domains = corpora.iter().map(|c| c.domain_id().to_string()).collect();
    Ok(AmbiguityRanking::from_scores(CONTEXT_METHOD, domains, entries))
}

/// Row norms of a space, cached for repeated neighbor queries.
struct NeighborIndex<'a> {
    space: &'a EmbeddingSpace,
    norms: Vec<f64>,
}

impl<'a> NeighborIndex<'a> {
    fn new(space: &'a EmbeddingSpace) -> Self {
        let norms = space.matrix().row_iter().map(|r| r.norm()).collect();
        Self { space, norms }
    }

    /// The `n` words most cosine-similar to `w`, excluding `w`; ties by
    /// word.
    fn nearest(&self, w: &str, n: usize) -> Option<Vec<&'a str>> {
        let i = self.space.index_of(w)?;
        let q: RowDVector<f64> = self.space.row(i);
        let sims = self.space.matrix() * q.transpose();
        let qn = self.norms[i];
        let vocab = self.space.vocab();
        let mut cands: Vec<(f64, &str)> = (0..vocab.len())
            .filter(|&j| j != i)
            .map(|j| {
                let denom = qn * self.norms[j];
                (if denom > 0.0 { sims[j] / denom } else { 0.0 }, vocab[j].as_str())
            })
            .collect();
        cands.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        Some(cands.into_iter().take(n).map(|c| c.1).collect())
    }
}

fn nn_pairs(w: &str, indexes: &[NeighborIndex], n: usize) -> Vec<PairDistance> {
    let lists: Vec<(&str, Vec<&str>)> = indexes
        .iter()
        .filter_map(|ix| ix.nearest(w, n).map(|l| (ix.space.domain_id(), l)))
        .collect();
    let mut pairs = Vec::new();
    for (i, (da, la)) in lists.iter().enumerate() {
        for (db, lb) in &lists[i + 1..] {
            let overlap = la.iter().filter(|x| lb.contains(x)).count();
            pairs.push(PairDistance {
                domain_a: da.to_string(),
                domain_b: db.to_string(),
                distance: 1.0 - overlap as f64 / n as f64,
                weight: 1.0,
            });
        }
    }
    pairs
}

fn check_neighbor_count(spaces: &[EmbeddingSpace], n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidConfig("neighbor count must be >= 1".into()));
    }
    if let Some(s) = spaces.iter().find(|s| s.len() < n + 1) {
        return Err(Error::InvalidConfig(format!(
            "space '{}' has {} words; need at least n + 1 = {}",
            s.domain_id(),
            s.len(),
            n + 1
        )));
    }
    Ok(())
}

/// `1 - |N_a(w) ∩ N_b(w)| / n`, averaged over every pair of spaces that
/// contain `w`.
pub fn nn_overlap_score(w: &str, spaces: &[EmbeddingSpace], n: usize) -> Result<f64> {
    check_neighbor_count(spaces, n)?;
    let indexes: Vec<NeighborIndex> = spaces.iter().map(NeighborIndex::new).collect();
    let pairs = nn_pairs(w, &indexes, n);
    if pairs.is_empty() {
        return Err(Error::InsufficientDomains(w.to_string()));
    }
    Ok(pairs.iter().map(|p| p.distance).sum::<f64>() / pairs.len() as f64)
}

pub fn rank_nn_overlap(
    targets: &TargetWordSet,
    spaces: &[EmbeddingSpace],
    counts: &[&BTreeMap<String, usize>],
    n: usize,
) -> Result<AmbiguityRanking> {
    if targets.is_empty() {
        return Err(Error::NoTargetWords);
    }
    check_neighbor_count(spaces, n)?;
    let indexes: Vec<NeighborIndex> = spaces.iter().map(NeighborIndex::new).collect();
    let words: Vec<&str> = targets.words().collect();
    let entries: Vec<AmbiguityScore> = words
        .par_iter()
        .filter_map(|&w| {
            let pairs = nn_pairs(w, &indexes, n);
            if pairs.is_empty() {
                log::warn!("skipping '{w}': present in fewer than 2 spaces");
                return None;
            }
            let score = pairs.iter().map(|p| p.distance).sum::<f64>() / pairs.len() as f64;
            Some(AmbiguityScore {
                word: w.to_string(),
                score,
                counts: counts.iter().map(|c| c.get(w).copied().unwrap_or(0)).collect(),
                pairs,
            })
        })
        .collect();
    let domains = spaces.iter().map(|s| s.domain_id().to_string()).collect();
    Ok(AmbiguityRanking::from_scores(NN_METHOD, domains, entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(id: &str, docs: &[&[&[&str]]]) -> Corpus {
        Corpus::from_sentences(
            id,
            docs.iter()
                .map(|d| d.iter().map(|s| s.iter().map(|t| t.to_string()).collect()).collect())
                .collect(),
        )
    }

    fn space(id: &str, rows: &[(&str, &[f64])]) -> EmbeddingSpace {
        EmbeddingSpace::from_rows(id, rows.iter().map(|(w, r)| (w.to_string(), r.to_vec())).collect()).unwrap()
    }

    #[test]
    fn idf_values() {
        let every = corpus("d", &[&[&["aa", "bb"]], &[&["aa"]]]);
        assert_eq!(idf(&every, "aa").unwrap(), 0.0);
        assert!(idf(&every, "zz").is_err());

        let docs: Vec<Vec<Vec<String>>> = (0..100)
            .map(|i| vec![vec![if i == 0 { "rare".to_string() } else { "common".to_string() }]])
            .collect();
        let c = Corpus::from_sentences("d", docs);
        assert!((idf(&c, "rare").unwrap() - 100f64.ln()).abs() < 1e-12);
        assert!((idf(&c, "rare").unwrap() - 4.6052).abs() < 1e-4);

        let docs: Vec<Vec<Vec<String>>> = (0..8)
            .map(|i| vec![vec![if i < 2 { "ww".to_string() } else { "xx".to_string() }]])
            .collect();
        let c = Corpus::from_sentences("d", docs);
        assert!((idf(&c, "ww").unwrap() - 1.3863).abs() < 1e-4);
    }

    #[test]
    fn single_document_center_is_zero() {
        let c = corpus("d", &[&[&["ww", "aa"]]]);
        let e = space("u", &[("ww", &[1.0, 0.0]), ("aa", &[0.0, 1.0])]);
        let center = context_center(&c, "ww", &e, ContextOptions::default()).unwrap();
        assert!(center.is_zero());
        let err = context_similarity("ww", &c, &c, &e, ContextOptions::default()).unwrap_err();
        assert!(err.to_string().contains("single-document"), "{err}");
    }

    #[test]
    fn center_hand_expansion() {
        // Contexts {w, a, a, b}; w has no embedding so |c| = 3.
        let c = corpus("d", &[&[&["ww", "aa", "aa", "bb"]], &[&["bb", "cc"]], &[&["cc"]], &[&["cc"]]]);
        let (va, vb) = ([1.0, 2.0], [-3.0, 0.5]);
        let e = space("u", &[("aa", &va), ("bb", &vb)]);
        let x = idf(&c, "aa").unwrap();
        let y = idf(&c, "bb").unwrap();
        let center = context_center(&c, "ww", &e, ContextOptions::default()).unwrap();
        assert_eq!(center.size, 3);
        for k in 0..2 {
            let expected = (2.0 * x * va[k] + y * vb[k]) / 3.0;
            assert!((center.vector[k] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn absent_word_is_an_error() {
        let c = corpus("d", &[&[&["aa"]], &[&["bb"]]]);
        let e = space("u", &[("aa", &[1.0, 0.0])]);
        assert!(matches!(
            context_center(&c, "zz", &e, ContextOptions::default()),
            Err(Error::UnknownWord(_))
        ));
    }

    #[test]
    fn index_matches_direct_center() {
        let c = corpus(
            "d",
            &[&[&["ww", "aa", "ww"], &["bb", "cc"]], &[&["cc", "ww", "bb"]], &[&["aa", "dd"]]],
        );
        let e = space(
            "u",
            &[("ww", &[0.3, 0.1]), ("aa", &[1.0, 2.0]), ("bb", &[-3.0, 0.5]), ("cc", &[0.2, 0.2])],
        );
        let idx = ContextIndex::new(&c, &e);
        for exclude_target in [false, true] {
            let o = ContextOptions { exclude_target };
            let direct = context_center(&c, "ww", &e, o).unwrap();
            let fast = idx.center("ww", o).unwrap();
            assert_eq!(direct.size, fast.size);
            assert!((direct.vector - fast.vector).amax() < 1e-12);
        }
    }

    #[test]
    fn identical_corpora_similarity_one() {
        let c = corpus("d", &[&[&["ww", "aa"]], &[&["bb", "cc"]], &[&["ww", "cc"]]]);
        let e = space("u", &[("ww", &[0.3, 0.1]), ("aa", &[1.0, 2.0]), ("cc", &[0.2, -0.7])]);
        let s = context_similarity("ww", &c, &c, &e, ContextOptions::default()).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nn_overlap_cases() {
        let a = space(
            "a",
            &[("ww", &[1.0, 0.0]), ("p", &[0.9, 0.1]), ("q", &[0.8, 0.2]), ("r", &[-1.0, 0.1]), ("s", &[-0.9, -0.2])],
        );
        assert_eq!(nn_overlap_score("ww", &[a.clone(), a.clone().with_domain_id("b")], 2).unwrap(), 0.0);

        let b = space(
            "b",
            &[("ww", &[1.0, 0.0]), ("r", &[0.9, 0.1]), ("s", &[0.8, 0.2]), ("p", &[-1.0, 0.1]), ("q", &[-0.9, -0.2])],
        );
        assert_eq!(nn_overlap_score("ww", &[a.clone(), b], 2).unwrap(), 1.0);

        let c = space(
            "c",
            &[("ww", &[1.0, 0.0]), ("p", &[0.9, 0.1]), ("r", &[0.8, 0.2]), ("q", &[-1.0, 0.1]), ("s", &[-0.9, -0.2])],
        );
        assert_eq!(nn_overlap_score("ww", &[a.clone(), c], 2).unwrap(), 0.5);

        assert!(nn_overlap_score("ww", std::slice::from_ref(&a), 2).is_err());
        assert!(nn_overlap_score("ww", &[a.clone(), a.clone()], 5).is_err());
    }

    #[test]
    fn neighbor_ties_are_lexicographic() {
        let a = space("a", &[("ww", &[1.0, 0.0]), ("zz", &[1.0, 0.0]), ("bb", &[1.0, 0.0]), ("cc", &[0.0, 1.0])]);
        let ix = NeighborIndex::new(&a);
        assert_eq!(ix.nearest("ww", 2).unwrap(), ["bb", "zz"]);
    }
}
