//! Train skip-gram embeddings with negative sampling on a synthetic domain
//! corpus and list a few nearest neighbors.
//!
//! `cargo run --release --example train_embeddings -- [seed]`

use crossdomain::embedding::{normalize_space, train_sgns, EmbeddingSpace, TrainingConfig};
use crossdomain::synthetic::{interchangeable_tokens, planted_ambiguity, PlantedConfig};

fn neighbors(space: &EmbeddingSpace, w: &str, n: usize) -> Vec<(String, f64)> {
    let v = space.vector(w).expect("word in vocabulary");
    let mut sims: Vec<(String, f64)> = space
        .vocab()
        .iter()
        .enumerate()
        .filter(|(_, u)| *u != w)
        .map(|(i, u)| {
            let r = space.row(i);
            (u.clone(), r.dot(&v) / (r.norm() * v.norm()))
        })
        .collect();
    sims.sort_by(|a, b| b.1.total_cmp(&a.1));
    sims.truncate(n);
    sims
}

pub fn run_example(seed: u64, tokens: usize) -> Result<(), Box<dyn std::error::Error>> {
    // Tokens that share every context end up close together.
    let small = TrainingConfig {
        dim: 10,
        window: 2,
        epochs: 20,
        min_freq: 1,
        seed,
        ..Default::default()
    };
    let trained = train_sgns(&interchangeable_tokens(200), &small)?;
    println!("x ~ p: {:?}", neighbors(&trained.space, "x", 2));

    let data = planted_ambiguity(&PlantedConfig {
        tokens_per_domain: tokens,
        seed,
        ..Default::default()
    })?;
    let config = TrainingConfig {
        window: 5,
        seed,
        ..Default::default()
    };
    let trained = train_sgns(&data.corpora[0], &config)?;
    println!(
        "{} words x {} dims, {} positive pairs, objective per epoch {:?}",
        trained.space.len(),
        trained.space.dim(),
        trained.positive_pairs,
        trained.epoch_objective
    );
    let space = normalize_space(&trained.space)?;
    for w in &data.topic_words[0][..3] {
        let near: Vec<String> = neighbors(&space, w, 5).into_iter().map(|(u, s)| format!("{u} {s:.2}")).collect();
        println!("{w}: {}", near.join(", "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map_or(Ok(0), |s| s.parse())?;
    run_example(seed, 50_000)
}
