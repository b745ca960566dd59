#![allow(dead_code)]

use crossdomain::embedding::{normalize_space, EmbeddingSpace};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of R's diagonal folded into Q.
pub fn random_orthogonal(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    let qr = gaussian(rng, d, d).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn unit_rows(mut m: DMatrix<f64>) -> DMatrix<f64> {
    for mut row in m.row_iter_mut() {
        let n = row.norm();
        row /= n;
    }
    m
}

pub fn word(i: usize) -> String {
    format!("w{i:04}")
}

/// A normalized space over words `w0000..` built from `m`'s rows.
pub fn space_from(domain: &str, words: &[String], m: &DMatrix<f64>) -> EmbeddingSpace {
    let rows = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), m.row(i).iter().copied().collect()))
        .collect();
    EmbeddingSpace::from_rows(domain, rows).unwrap()
}

/// `n` normalized spaces sharing a latent structure: each is a noisy copy
/// of a common base, randomly rotated, with `drop` of its words removed.
pub fn related_spaces(seed: u64, n: usize, vocab: usize, d: usize, noise: f64, drop: f64) -> Vec<EmbeddingSpace> {
    let mut rng = rng(seed);
    let base = gaussian(&mut rng, vocab, d);
    (0..n)
        .map(|i| {
            let noisy = &base + gaussian(&mut rng, vocab, d) * noise;
            let rotated = if i == 0 { noisy } else { noisy * random_orthogonal(&mut rng, d) };
            let mut keep: Vec<usize> = (0..vocab).collect();
            keep.shuffle(&mut rng);
            keep.truncate(vocab - (vocab as f64 * drop) as usize);
            keep.sort_unstable();
            let words: Vec<String> = keep.iter().map(|&j| word(j)).collect();
            let rows = DMatrix::from_fn(keep.len(), d, |r, c| rotated[(keep[r], c)]);
            normalize_space(&space_from(&format!("d{i}"), &words, &rows)).unwrap()
        })
        .collect()
}

pub fn rotate(space: &EmbeddingSpace, q: &DMatrix<f64>) -> EmbeddingSpace {
    space.transformed(q)
}
