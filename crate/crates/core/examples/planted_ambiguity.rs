//! Train, align and rank two synthetic domains in memory, then check where
//! the planted ambiguous word lands under all three methods.
//!
//! `cargo run --release --example planted_ambiguity -- [seed]`

use std::collections::BTreeMap;
use std::time::Instant;

use crossdomain::alignment::{align_spaces, AlignmentConfig};
use crossdomain::baselines::{rank_context_similarity, rank_nn_overlap, ContextOptions};
use crossdomain::embedding::{normalize_space, train_sgns, TrainingConfig};
use crossdomain::scoring::{compare_rankings, rank_targets};
use crossdomain::selection::{select_targets, PosLexicon, SelectionConfig};
use crossdomain::synthetic::{planted_ambiguity, PlantedConfig};

pub fn run_example(seed: u64) -> Result<(), Box<dyn std::error::Error>> {
    let start = Instant::now();
    let data = planted_ambiguity(&PlantedConfig { seed, ..Default::default() })?;
    let training = TrainingConfig {
        window: 5,
        seed,
        ..Default::default()
    };
    let spaces = data
        .corpora
        .iter()
        .map(|c| normalize_space(&train_sgns(c, &training)?.space))
        .collect::<Result<Vec<_>, _>>()?;
    let unified = align_spaces(&spaces, &AlignmentConfig::default())?;
    println!(
        "aligned in {} iterations, residuals {:?}",
        unified.iterations(),
        unified.residual_history
    );

    let counts: Vec<&BTreeMap<String, usize>> = data.corpora.iter().map(|c| c.counts()).collect();
    let selection = SelectionConfig { k: 200, ..Default::default() };
    let targets = select_targets(&counts, &selection, &PosLexicon::bundled())?;
    let ranking = rank_targets(&targets, &unified, &spaces, &counts)?;
    let context = rank_context_similarity(&targets, &data.corpora, &unified.target, ContextOptions::default())?;
    let nn = rank_nn_overlap(&targets, &spaces, &counts, 10)?;

    println!("planted word: {}", data.planted);
    for r in [&ranking, &context, &nn] {
        let top: Vec<String> = r
            .entries
            .iter()
            .take(5)
            .map(|e| format!("{} {:.3}", e.word, e.score))
            .collect();
        println!(
            "{:>20}: rank {:?} of {}; top {}",
            r.method,
            r.rank_of(&data.planted),
            r.len(),
            top.join(", ")
        );
    }
    for other in [&context, &nn] {
        let rows = compare_rankings(&ranking, other, usize::MAX)?;
        let planted = rows.iter().find(|d| d.word == data.planted).expect("planted word compared");
        println!(
            "procrustes vs {}: planted |R1 - R2| = {}, largest disagreement {:?}",
            other.method, planted.abs_diff, rows.first()
        );
    }
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map_or(Ok(0), |s| s.parse())?;
    run_example(seed)
}
