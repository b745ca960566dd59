mod common;

use std::collections::BTreeMap;

use crossdomain::alignment::{align_spaces, AlignmentConfig};
use crossdomain::scoring::{
    compare_rankings, cosine_distance, disagreements_to_csv, rank_targets, score_vectors, AmbiguityRanking, AmbiguityScore,
    DomainVector,
};
use crossdomain::selection::TargetWordSet;
use crossdomain::Error;
use proptest::prelude::*;

fn vectors(n: usize, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, d), n)
}

fn instance() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<usize>)> {
    (2usize..7, 1usize..16).prop_flat_map(|(n, d)| (vectors(n, d), prop::collection::vec(0usize..10_000, n)))
}

fn entries<'a>(vs: &[Vec<f64>], counts: &[usize]) -> Vec<DomainVector<'a>> {
    vs.iter()
        .zip(counts)
        .map(|(v, &count)| DomainVector {
            domain_id: "d",
            count,
            vector: v.clone(),
        })
        .collect()
}

fn nonzero(vs: &[Vec<f64>]) -> bool {
    vs.iter().all(|v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
}

proptest! {
    #[test]
    fn score_is_the_weighted_mean_of_its_pairs((vs, counts) in instance()) {
        prop_assume!(nonzero(&vs));
        let (score, pairs) = score_vectors("w", &entries(&vs, &counts)).unwrap();
        prop_assert_eq!(pairs.len(), vs.len() * (vs.len() - 1) / 2);
        let den: f64 = pairs.iter().map(|p| p.weight).sum();
        if den > 0.0 {
            let mean = pairs.iter().map(|p| p.weight * p.distance).sum::<f64>() / den;
            prop_assert!((score - mean).abs() < 1e-12);
        }
        prop_assert!(pairs.iter().all(|p| (0.0..=2.0).contains(&p.distance)));
        prop_assert!((0.0..=2.0).contains(&score));
    }

    #[test]
    fn positive_rescaling_leaves_scores_unchanged((vs, counts) in instance(), scales in prop::collection::vec(1e-3f64..1e3, 7)) {
        prop_assume!(nonzero(&vs));
        let scaled: Vec<Vec<f64>> = vs.iter().zip(&scales).map(|(v, s)| v.iter().map(|x| x * s).collect()).collect();
        let (a, _) = score_vectors("w", &entries(&vs, &counts)).unwrap();
        let (b, _) = score_vectors("w", &entries(&scaled, &counts)).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn rankings_are_sorted_with_lexicographic_ties(scores in prop::collection::btree_map("[a-z]{1,5}", prop::sample::select(vec![0.0, 0.25, 0.5, 1.0, 1.75]), 1..30)) {
        let entries = scores.iter().map(|(w, &s)| AmbiguityScore { word: w.clone(), score: s, counts: vec![], pairs: vec![] }).collect();
        let r = AmbiguityRanking::from_scores("m", vec![], entries);
        for w in r.entries.windows(2) {
            prop_assert!(w[0].score > w[1].score || (w[0].score == w[1].score && w[0].word < w[1].word));
        }
    }

    #[test]
    fn comparing_a_ranking_with_itself_shows_no_disagreement(words in prop::collection::btree_set("[a-z]{1,6}", 1..20)) {
        let entries: Vec<AmbiguityScore> = words.iter().enumerate().map(|(i, w)| AmbiguityScore { word: w.clone(), score: i as f64, counts: vec![], pairs: vec![] }).collect();
        let r = AmbiguityRanking::from_scores("m", vec![], entries);
        let rows = compare_rankings(&r, &r, usize::MAX).unwrap();
        prop_assert_eq!(rows.len(), words.len());
        prop_assert!(rows.iter().all(|d| d.abs_diff == 0 && d.rank_a == d.rank_b));
    }
}

fn ranking(words: &[&str]) -> AmbiguityRanking {
    let n = words.len();
    let entries = words
        .iter()
        .enumerate()
        .map(|(i, w)| AmbiguityScore {
            word: w.to_string(),
            score: (n - i) as f64,
            counts: vec![],
            pairs: vec![],
        })
        .collect();
    AmbiguityRanking::from_scores("m", vec![], entries)
}

#[test]
fn distances_of_simple_vectors() {
    assert!(cosine_distance(&[1.0, 0.0], &[1.0, 0.0]).unwrap().abs() < 1e-15);
    assert!((cosine_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
    assert!((cosine_distance(&[1.0, 0.0], &[-1.0, 0.0]).unwrap() - 2.0).abs() < 1e-15);
    assert!(matches!(cosine_distance(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::ZeroVector)));
}

#[test]
fn two_thirds_case() {
    let vs = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
    let (score, pairs) = score_vectors("w", &entries(&vs, &[10, 20, 30])).unwrap();
    assert!((score - 2.0 / 3.0).abs() < 1e-12);
    let weights: Vec<f64> = pairs.iter().map(|p| p.weight).collect();
    assert_eq!(weights, [30.0, 40.0, 50.0]);
}

#[test]
fn a_word_seen_in_one_domain_cannot_be_scored() {
    let err = score_vectors("lonely", &entries(&[vec![1.0]], &[5])).unwrap_err();
    assert!(err.to_string().contains("lonely"), "{err}");
}

#[test]
fn swapped_and_rotated_rankings() {
    let rows = compare_rankings(&ranking(&["x", "y"]), &ranking(&["y", "x"]), 10).unwrap();
    assert!(rows.iter().all(|d| d.abs_diff == 1));

    let rows = compare_rankings(&ranking(&["a", "b", "c"]), &ranking(&["c", "a", "b"]), 1).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].word.as_str(), rows[0].rank_a, rows[0].rank_b, rows[0].abs_diff), ("c", 3, 1, 2));
    assert_eq!(disagreements_to_csv(&rows), "word,rank_a,rank_b,abs_diff\nc,3,1,2\n");
}

#[test]
fn mismatched_rankings_compare_on_their_intersection() {
    let rows = compare_rankings(&ranking(&["a", "b", "only_a"]), &ranking(&["only_b", "b", "a"]), 10).unwrap();
    let mut words: Vec<&str> = rows.iter().map(|d| d.word.as_str()).collect();
    words.sort_unstable();
    assert_eq!(words, ["a", "b"]);
    assert!(rows.iter().all(|d| d.abs_diff == 1));
    assert!(matches!(
        compare_rankings(&ranking(&["a"]), &ranking(&["b"]), 10),
        Err(Error::EmptyIntersection)
    ));
}

#[test]
fn reports_round_trip_through_csv_and_json() {
    let spaces = common::related_spaces(21, 3, 50, 5, 0.5, 0.2);
    let unified = align_spaces(&spaces, &AlignmentConfig::default()).unwrap();
    let tables: Vec<BTreeMap<String, usize>> = spaces
        .iter()
        .enumerate()
        .map(|(i, s)| s.vocab().iter().map(|w| (w.clone(), 3 * i + w.len())).collect())
        .collect();
    let counts: Vec<&BTreeMap<String, usize>> = tables.iter().collect();
    let targets = TargetWordSet {
        counts: spaces[0]
            .vocab()
            .iter()
            .map(|w| (w.clone(), tables.iter().map(|t| t.get(w).copied().unwrap_or(0)).collect()))
            .collect(),
    };
    let r = rank_targets(&targets, &unified, &spaces, &counts).unwrap();
    assert!(!r.is_empty());
    assert!(r.entries.iter().all(|e| !e.pairs.is_empty()));

    let csv = r.to_csv();
    assert!(csv.starts_with("rank,word,score,count_d0,count_d1,count_d2,pairs\n"));
    assert_eq!(AmbiguityRanking::from_csv(&r.method, &csv).unwrap(), r);
    assert_eq!(AmbiguityRanking::from_json(&r.to_json().unwrap()).unwrap(), r);

    let empty = TargetWordSet::default();
    assert!(matches!(rank_targets(&empty, &unified, &spaces, &counts), Err(Error::NoTargetWords)));
}
