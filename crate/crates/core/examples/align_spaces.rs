//! Recover a hidden rotation with orthogonal Procrustes, then align three
//! noisy, rotated copies of one space into a unified space.
//!
//! `cargo run --example align_spaces -- [seed]`

use crossdomain::alignment::{align_spaces, orthogonality_defect, procrustes_solve, AlignmentConfig};
use crossdomain::embedding::{normalize_space, EmbeddingSpace};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

fn random_rotation(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    random_matrix(rng, d, d).qr().q()
}

pub fn run_example(seed: u64) -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, d) = (300, 20);

    let x = random_matrix(&mut rng, n, d);
    let r = random_rotation(&mut rng, d);
    let w = procrustes_solve(&x, &(&x * &r))?;
    println!(
        "procrustes: ||W - R|| = {:.2e}, orthogonality defect {:.2e}",
        (&w - &r).norm(),
        orthogonality_defect(&w)
    );

    let words: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let base = random_matrix(&mut rng, n, d);
    let spaces = (0..3)
        .map(|k| {
            let noisy = &base + random_matrix(&mut rng, n, d) * 0.2;
            let rotated = noisy * random_rotation(&mut rng, d);
            // Each domain misses a different tenth of the vocabulary.
            let rows = words
                .iter()
                .enumerate()
                .filter(|(i, _)| i % 10 != k)
                .map(|(i, w)| (w.clone(), rotated.row(i).iter().copied().collect()))
                .collect();
            normalize_space(&EmbeddingSpace::from_rows(&format!("domain{k}"), rows)?)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let unified = align_spaces(&spaces, &AlignmentConfig::default())?;
    println!(
        "aligned {} spaces in {} iterations (converged: {})",
        spaces.len(),
        unified.iterations(),
        unified.converged
    );
    for (i, e) in unified.residual_history.iter().enumerate() {
        println!("  iteration {:>2}: residual {e:.6}", i + 1);
    }
    println!(
        "unified vocabulary {} words; 'w0' seen in {} spaces",
        unified.target.len(),
        unified.n_w["w0"]
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map_or(Ok(0), |s| s.parse())?;
    run_example(seed)
}
