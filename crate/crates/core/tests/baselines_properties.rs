mod common;

use crossdomain::baselines::{
    context_center, context_similarity, idf, nn_overlap_score, ContextIndex, ContextOptions, IdfTable,
};
use crossdomain::corpus::Corpus;
use crossdomain::embedding::EmbeddingSpace;
use crossdomain::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

const VOCAB: [&str; 8] = ["w", "a", "b", "c", "d", "e", "f", "g"];

type Docs = Vec<Vec<Vec<String>>>;

fn corpus(domain: &str, docs: &[&[&[&str]]]) -> Corpus {
    let docs = docs
        .iter()
        .map(|d| d.iter().map(|s| s.iter().map(|t| t.to_string()).collect()).collect())
        .collect();
    Corpus::from_sentences(domain, docs)
}

fn docs() -> impl Strategy<Value = Docs> {
    let sentence = prop::collection::vec(prop::sample::select(&VOCAB[..]).prop_map(String::from), 1..6);
    prop::collection::vec(prop::collection::vec(sentence, 1..4), 2..6)
}

fn space(seed: u64, words: &[&str], d: usize) -> EmbeddingSpace {
    let m = common::gaussian(&mut common::rng(seed), words.len(), d);
    let words: Vec<String> = words.iter().map(|w| w.to_string()).collect();
    common::space_from("shared", &words, &m)
}

fn options() -> impl Strategy<Value = ContextOptions> {
    any::<bool>().prop_map(|exclude_target| ContextOptions { exclude_target })
}

proptest! {
    #[test]
    fn idf_is_non_negative_and_falls_with_document_frequency(docs in docs()) {
        let c = Corpus::from_sentences("p", docs);
        let table = IdfTable::new(&c);
        for (w, &df) in c.doc_freq() {
            let v = idf(&c, w).unwrap();
            prop_assert!(v >= 0.0);
            prop_assert_eq!(table.get(w), Some(v));
            for (u, &df_u) in c.doc_freq() {
                if df_u >= df {
                    prop_assert!(idf(&c, u).unwrap() <= v);
                }
            }
        }
    }

    #[test]
    fn context_similarity_is_symmetric(a in docs(), b in docs(), seed in 0u64..1000, opts in options()) {
        let (ca, cb) = (Corpus::from_sentences("a", a), Corpus::from_sentences("b", b));
        let emb = space(seed, &VOCAB, 6);
        let ab = context_similarity("w", &ca, &cb, &emb, opts);
        let ba = context_similarity("w", &cb, &ca, &emb, opts);
        match (ab, ba) {
            (Ok(x), Ok(y)) => {
                prop_assert!((x - y).abs() < 1e-12);
                prop_assert!((-1.0..=1.0).contains(&x));
            }
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "asymmetric outcome {x:?} vs {y:?}"),
        }
    }

    #[test]
    fn indexed_centers_match_the_direct_computation(docs in docs(), seed in 0u64..1000, opts in options()) {
        let c = Corpus::from_sentences("p", docs);
        let emb = space(seed, &VOCAB[..6], 5);
        let index = ContextIndex::new(&c, &emb);
        for w in VOCAB {
            match (context_center(&c, w, &emb, opts), index.center(w, opts)) {
                (Ok(direct), Ok(fast)) => {
                    prop_assert_eq!(direct.size, fast.size);
                    prop_assert!((direct.vector - fast.vector).amax() < 1e-12);
                }
                (Err(_), Err(_)) => {}
                (x, y) => prop_assert!(false, "{w}: {x:?} vs {y:?}"),
            }
        }
    }

    #[test]
    fn rotating_a_space_keeps_neighbor_overlap(seed in 0u64..1000, n in 1usize..10) {
        let words: Vec<String> = (0..30).map(common::word).collect();
        let mut r = common::rng(seed);
        let a = common::space_from("a", &words, &common::gaussian(&mut r, 30, 6));
        let b = common::space_from("b", &words, &common::gaussian(&mut r, 30, 6));
        let q = common::random_orthogonal(&mut r, 6);
        let rotated = vec![a.clone(), b.transformed(&q)];
        let plain = vec![a, b];
        for w in &words[..5] {
            prop_assert_eq!(nn_overlap_score(w, &plain, n).unwrap(), nn_overlap_score(w, &rotated, n).unwrap());
        }
    }
}

#[test]
fn idf_examples() {
    let every: Vec<&[&[&str]]> = vec![&[&["w"]], &[&["w", "x"]]];
    assert_eq!(idf(&corpus("a", &every), "w").unwrap(), 0.0);

    let filler: &[&[&str]] = &[&["x"]];
    let mut hundred: Vec<&[&[&str]]> = vec![&[&["rare", "x"]]];
    hundred.extend(std::iter::repeat_n(filler, 99));
    assert!((idf(&corpus("b", &hundred), "rare").unwrap() - 100f64.ln()).abs() < 1e-12);

    let mut eight: Vec<&[&[&str]]> = vec![&[&["pair"]], &[&["pair"]]];
    eight.extend(std::iter::repeat_n(filler, 6));
    assert!((idf(&corpus("c", &eight), "pair").unwrap() - 4f64.ln()).abs() < 1e-12);

    assert!(matches!(idf(&corpus("c", &eight), "missing"), Err(Error::UnknownWord(_))));
}

#[test]
fn center_is_the_idf_weighted_mean_of_context_vectors() {
    // Contexts of w without w itself: {a, a, b}.
    let c = corpus("d", &[&[&["w", "a"], &["z"]], &[&["w", "a", "b"]], &[&["z"]]]);
    let emb = EmbeddingSpace::from_rows(
        "shared",
        vec![
            ("a".into(), vec![1.0, 0.0]),
            ("b".into(), vec![0.0, 1.0]),
            ("w".into(), vec![5.0, 5.0]),
        ],
    )
    .unwrap();
    let center = context_center(&c, "w", &emb, ContextOptions { exclude_target: true }).unwrap();
    let (x, y) = (1.5f64.ln(), 3f64.ln());
    assert_eq!(center.size, 3);
    assert!((center.vector[0] - 2.0 * x / 3.0).abs() < 1e-12);
    assert!((center.vector[1] - y / 3.0).abs() < 1e-12);

    let with_w = context_center(&c, "w", &emb, ContextOptions::default()).unwrap();
    assert_eq!(with_w.size, 5);
    assert!(matches!(
        context_center(&c, "absent", &emb, ContextOptions::default()),
        Err(Error::UnknownWord(_))
    ));
}

#[test]
fn single_document_corpora_give_a_zero_center() {
    let one = corpus("solo", &[&[&["w", "a"]]]);
    let two = corpus("pair", &[&[&["w", "a"]], &[&["b"]]]);
    let emb = EmbeddingSpace::from_rows("s", vec![("w".into(), vec![1.0, 0.0]), ("a".into(), vec![0.0, 1.0])]).unwrap();
    assert!(context_center(&one, "w", &emb, ContextOptions::default()).unwrap().is_zero());
    let err = context_similarity("w", &two, &one, &emb, ContextOptions::default()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("solo") && msg.contains("single-document"), "{msg}");
}

#[test]
fn identical_corpora_have_similarity_one() {
    let c = corpus("x", &[&[&["w", "a", "b"]], &[&["c", "d"]], &[&["w", "c"]]]);
    let emb = space(3, &VOCAB, 4);
    let s = context_similarity("w", &c, &c, &emb, ContextOptions::default()).unwrap();
    assert!((s - 1.0).abs() < 1e-12);
}

fn line_space(domain: &str, words: &[(&str, f64)]) -> EmbeddingSpace {
    let rows = words
        .iter()
        .map(|&(w, angle)| (w.to_string(), vec![angle.cos(), angle.sin()]))
        .collect();
    EmbeddingSpace::from_rows(domain, rows).unwrap()
}

#[test]
fn neighbor_overlap_examples() {
    // Neighbors of w by angle: near ones first.
    let a = line_space("a", &[("w", 0.0), ("p", 0.1), ("q", 0.2), ("r", 0.3), ("s", 0.4), ("t", 2.0), ("u", 2.1), ("v", 2.2), ("x", 2.3)]);
    let same = vec![a.clone(), a.clone().with_domain_id("b")];
    assert_eq!(nn_overlap_score("w", &same, 4).unwrap(), 0.0);

    let flipped = line_space("b", &[("w", 0.0), ("p", 2.0), ("q", 2.1), ("r", 2.2), ("s", 2.3), ("t", 0.1), ("u", 0.2), ("v", 0.3), ("x", 0.4)]);
    assert_eq!(nn_overlap_score("w", &[a.clone(), flipped], 4).unwrap(), 1.0);

    let half = line_space("b", &[("w", 0.0), ("p", 0.1), ("q", 0.2), ("r", 2.2), ("s", 2.3), ("t", 0.3), ("u", 0.4), ("v", 2.4), ("x", 2.5)]);
    assert_eq!(nn_overlap_score("w", &[a.clone(), half], 4).unwrap(), 0.5);

    assert!(nn_overlap_score("w", &same, 20).is_err());
    let without = line_space("c", &[("p", 0.0), ("q", 1.0), ("r", 2.0), ("s", 3.0), ("t", 4.0), ("u", 5.0)]);
    assert!(nn_overlap_score("w", &[a, without], 4).is_err());
}

#[test]
fn rotations_preserve_neighbor_lists_exactly_on_unit_rows() {
    let words: Vec<String> = (0..40).map(common::word).collect();
    let mut r = common::rng(77);
    let m = common::unit_rows(common::gaussian(&mut r, 40, 8));
    let s = common::space_from("a", &words, &m);
    let q: DMatrix<f64> = common::random_orthogonal(&mut r, 8);
    let spaces = vec![s.clone(), s.transformed(&q).with_domain_id("b")];
    for w in &words {
        assert_eq!(nn_overlap_score(w, &spaces, 10).unwrap(), 0.0);
    }
}
