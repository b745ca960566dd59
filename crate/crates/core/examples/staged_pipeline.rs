//! Run the on-disk pipeline stage by stage, the way the `crossdomain`
//! binary does: ingest, train, align, rank, then both baselines and a
//! disagreement table.
//!
//! `cargo run --release --example staged_pipeline -- [out-dir]`

use std::path::Path;

use crossdomain::pipeline::{self, PipelineConfig};
use crossdomain::synthetic::{planted_ambiguity, PlantedConfig};

pub fn run_example(out: &Path, tokens: usize) -> Result<(), Box<dyn std::error::Error>> {
    let data = planted_ambiguity(&PlantedConfig {
        tokens_per_domain: tokens,
        ..Default::default()
    })?;
    let mut config = PipelineConfig::default();
    for (id, path) in data.write_text(&out.join("input"))? {
        config.add_domain(&id, path)?;
    }
    for (key, value) in [("window", "5"), ("k", "100"), ("neighbors", "10"), ("workers", "1")] {
        config.set(key, value)?;
    }
    config.out = out.to_path_buf();

    for s in pipeline::cmd_ingest(&config)? {
        println!("ingest {}: {} documents, {} tokens", s.domain_id, s.documents, s.tokens);
    }
    pipeline::cmd_train(&config)?;
    let unified = pipeline::cmd_align(&config)?;
    println!("align: residuals {:?}", unified.residual_history);

    let ranking = pipeline::cmd_rank(&config)?;
    let top: Vec<&str> = ranking.words().take(5).collect();
    println!("rank: {} words, top {top:?}", ranking.len());

    let baselines = pipeline::cmd_baseline(&config)?;
    let rows = pipeline::cmd_compare(
        &config.ranking_path(),
        &config.baseline_path(&baselines.context_similarity.method),
        5,
        &out.join("disagreement.csv"),
    )?;
    println!("largest disagreements with context similarity:");
    for r in rows {
        println!("  {:<10} {:>3} vs {:>3}", r.word, r.rank_a, r.rank_b);
    }
    println!("artifacts in {}", out.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tmp = tempfile::tempdir()?;
    let out = std::env::args().nth(1).map_or_else(|| tmp.path().to_path_buf(), Into::into);
    run_example(&out, 50_000)
}
