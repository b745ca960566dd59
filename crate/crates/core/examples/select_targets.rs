//! Pick the target words worth scoring: content words that are frequent in
//! one domain and at least proportionally frequent in another.
//!
//! `cargo run --example select_targets -- [k] [rho]`

use std::collections::BTreeMap;

use crossdomain::selection::{pos_lookup, select_targets, PosLexicon, SelectionConfig};

pub fn run_example(k: usize, rho: f64) -> Result<(), Box<dyn std::error::Error>> {
    let table = |rows: &[(&str, usize)]| -> BTreeMap<String, usize> {
        rows.iter().map(|&(w, c)| (w.to_string(), c)).collect()
    };
    let computing = table(&[("thread", 1200), ("server", 3000), ("bank", 150), ("the", 9000), ("quickly", 1500)]);
    let finance = table(&[("thread", 700), ("server", 200), ("bank", 4000), ("the", 8000), ("quickly", 1400)]);
    let biology = table(&[("thread", 90), ("cell", 2500), ("bank", 1100), ("the", 7000)]);

    let lexicon = PosLexicon::bundled();
    let config = SelectionConfig {
        k,
        rho,
        ..Default::default()
    };
    let targets = select_targets(&[&computing, &finance, &biology], &config, &lexicon)?;
    println!("k = {k}, rho = {rho}: {} target words", targets.len());
    for (w, counts) in &targets.counts {
        println!("  {w:<8} counts {counts:?} tags {:?}", pos_lookup(&lexicon, w));
    }
    for w in ["server", "the", "quickly", "cell"] {
        if !targets.contains(w) {
            println!("  {w:<8} rejected, tags {:?}", pos_lookup(&lexicon, w));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let k = args.next().map_or(Ok(1000), |s| s.parse())?;
    let rho = args.next().map_or(Ok(0.5), |s| s.parse())?;
    run_example(k, rho)
}
