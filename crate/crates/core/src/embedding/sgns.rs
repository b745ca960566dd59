//! Skip-gram with negative sampling.
//!
//! Each center word's input vector is trained against the output vectors of
//! every word within a fixed window of `window` positions on either side
//! (inside document bounds), plus `negatives` noise words per positive pair.
//! Only the input vectors are exported.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_vocab, EmbeddingSpace, NoiseDistribution, Vocab};
use crate::corpus::Corpus;
use crate::error::{Error, Result};

const SIGMOID_CLAMP: f64 = 30.0;
const FINAL_LR_FRACTION: f64 = 0.05;

pub fn sigmoid(x: f64) -> f64 {
    let x = x.clamp(-SIGMOID_CLAMP, SIGMOID_CLAMP);
    1.0 / (1.0 + (-x).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub min_freq: usize,
    pub epochs: usize,
    pub initial_learning_rate: f64,
    pub noise_exponent: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            dim: 50,
            window: 10,
            negatives: 5,
            min_freq: 10,
            epochs: 5,
            initial_learning_rate: 0.025,
            noise_exponent: 0.75,
            seed: 1,
            workers: 1,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.dim < 2 {
            return bad("dim must be >= 2");
        }
        if self.window < 1 {
            return bad("window must be >= 1");
        }
        if self.negatives < 1 {
            return bad("negatives must be >= 1");
        }
        if self.min_freq < 1 {
            return bad("min_freq must be >= 1");
        }
        if self.epochs < 1 {
            return bad("epochs must be >= 1");
        }
        if !(self.initial_learning_rate > 0.0 && self.initial_learning_rate <= 1.0) {
            return bad("initial_learning_rate must be in (0, 1]");
        }
        if !(self.noise_exponent.is_finite() && self.noise_exponent >= 0.0) {
            return bad("noise_exponent must be finite and >= 0");
        }
        if self.workers < 1 {
            return bad("workers must be >= 1");
        }
        Ok(())
    }
}

/// Result of a training run.
#[derive(Debug, Clone)]
pub struct Trained {
    pub space: EmbeddingSpace,
    pub vocab: Vocab,
    /// Mean negative-sampling objective per positive pair, one entry per
    /// epoch. With several workers the per-epoch split is approximate.
    pub epoch_objective: Vec<f64>,
    pub positive_pairs: usize,
}

/// Weight matrix shared between workers. Updates are unsynchronized;
/// relaxed atomics make concurrent access well-defined without locking.
struct SharedWeights {
    data: Vec<AtomicU64>,
    dim: usize,
}

impl SharedWeights {
    fn new(values: impl IntoIterator<Item = f64>, dim: usize) -> Self {
        Self {
            data: values.into_iter().map(|v| AtomicU64::new(v.to_bits())).collect(),
            dim,
        }
    }

    #[inline]
    fn load_row(&self, row: usize, out: &mut [f64]) {
        let base = row * self.dim;
        for (k, o) in out.iter_mut().enumerate() {
            *o = f64::from_bits(self.data[base + k].load(Ordering::Relaxed));
        }
    }

    #[inline]
    fn store_row(&self, row: usize, values: &[f64]) {
        let base = row * self.dim;
        for (k, v) in values.iter().enumerate() {
            self.data[base + k].store(v.to_bits(), Ordering::Relaxed);
        }
    }

    fn into_values(self) -> Vec<f64> {
        self.data.into_iter().map(|a| f64::from_bits(a.into_inner())).collect()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over the encoded document; keeps each document's random stream
/// tied to its content rather than its position in the corpus.
fn content_hash(doc: &[u32]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &t in doc {
        for b in t.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h ^ doc.len() as u64
}

struct Trainer<'a> {
    config: &'a TrainingConfig,
    noise: NoiseDistribution,
    input: SharedWeights,
    output: SharedWeights,
    progress: AtomicUsize,
    total_positions: usize,
}

struct Scratch {
    center: Vec<f64>,
    target: Vec<f64>,
    grad: Vec<f64>,
}

impl Trainer<'_> {
    fn learning_rate(&self) -> f64 {
        let done = self.progress.load(Ordering::Relaxed) as f64;
        let frac = (done / self.total_positions.max(1) as f64).min(1.0);
        self.config.initial_learning_rate * (1.0 - (1.0 - FINAL_LR_FRACTION) * frac)
    }

    /// One positive pair plus its negatives. Returns the pair's objective.
    fn train_pair(&self, center: usize, context: usize, lr: f64, rng: &mut ChaCha8Rng, s: &mut Scratch) -> f64 {
        self.input.load_row(center, &mut s.center);
        s.grad.iter_mut().for_each(|g| *g = 0.0);
        let mut objective = 0.0;
        for sample in 0..=self.config.negatives {
            let (target, label) = if sample == 0 {
                (context, 1.0)
            } else {
                let t = self.noise.sample(rng);
                if t == context {
                    continue;
                }
                (t, 0.0)
            };
            self.output.load_row(target, &mut s.target);
            let dot: f64 = s.center.iter().zip(&s.target).map(|(a, b)| a * b).sum();
            let sig = sigmoid(dot);
            objective += if label == 1.0 { sig.ln() } else { sigmoid(-dot).ln() };
            let g = (label - sig) * lr;
            for k in 0..s.grad.len() {
                s.grad[k] += g * s.target[k];
                s.target[k] += g * s.center[k];
            }
            self.output.store_row(target, &s.target);
        }
        for (c, g) in s.center.iter_mut().zip(&s.grad) {
            *c += g;
        }
        self.input.store_row(center, &s.center);
        objective
    }

    /// Trains on one document. Returns (objective sum, positive pairs).
    fn train_document(&self, doc: &[u32], epoch: usize, s: &mut Scratch) -> (f64, usize) {
        let seed = splitmix64(self.config.seed ^ splitmix64(epoch as u64 ^ content_hash(doc)));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let window = self.config.window;
        let mut objective = 0.0;
        let mut pairs = 0;
        for t in 0..doc.len() {
            let lr = self.learning_rate();
            self.progress.fetch_add(1, Ordering::Relaxed);
            let lo = t.saturating_sub(window);
            let hi = (t + window).min(doc.len() - 1);
            for c in lo..=hi {
                if c == t {
                    continue;
                }
                objective += self.train_pair(doc[t] as usize, doc[c] as usize, lr, &mut rng, s);
                pairs += 1;
            }
        }
        (objective, pairs)
    }

    fn scratch(&self) -> Scratch {
        let d = self.config.dim;
        Scratch {
            center: vec![0.0; d],
            target: vec![0.0; d],
            grad: vec![0.0; d],
        }
    }

    /// Runs every epoch over `docs`; returns per-epoch (objective, pairs).
    fn run_shard(&self, docs: &[&[u32]]) -> Vec<(f64, usize)> {
        let mut s = self.scratch();
        (0..self.config.epochs)
            .map(|epoch| {
                docs.iter().fold((0.0, 0), |(o, p), doc| {
                    let (o2, p2) = self.train_document(doc, epoch, &mut s);
                    (o + o2, p + p2)
                })
            })
            .collect()
    }
}

/// Trains a skip-gram negative-sampling model on `corpus`.
///
/// With `workers == 1` the result is bit-reproducible for a fixed seed.
/// More workers split the documents into contiguous shards that update
/// shared weights without synchronization, so results vary between runs.
pub fn train_sgns(corpus: &Corpus, config: &TrainingConfig) -> Result<Trained> {
    config.validate()?;
    let vocab = build_vocab(corpus, config.min_freq)?;
    let docs: Vec<Vec<u32>> = corpus.documents().map(|d| vocab.encode(d)).collect();
    let d = config.dim;

    let mut init_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let half = 0.5 / d as f64;
    let init: Vec<f64> = (0..vocab.len() * d).map(|_| init_rng.random_range(-half..half)).collect();

    let trainer = Trainer {
        config,
        noise: NoiseDistribution::from_counts(vocab.counts(), config.noise_exponent),
        input: SharedWeights::new(init, d),
        output: SharedWeights::new(std::iter::repeat_n(0.0, vocab.len() * d), d),
        progress: AtomicUsize::new(0),
        total_positions: config.epochs * docs.iter().map(Vec::len).sum::<usize>(),
    };

    let doc_refs: Vec<&[u32]> = docs.iter().map(Vec::as_slice).collect();
    let per_epoch = if config.workers == 1 || doc_refs.len() < 2 {
        trainer.run_shard(&doc_refs)
    } else {
        let shard_len = doc_refs.len().div_ceil(config.workers);
        let shards: Vec<Vec<(f64, usize)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = doc_refs
                .chunks(shard_len)
                .map(|shard| scope.spawn(|| trainer.run_shard(shard)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("training worker panicked")).collect()
        });
        (0..config.epochs)
            .map(|e| shards.iter().fold((0.0, 0), |(o, p), s| (o + s[e].0, p + s[e].1)))
            .collect()
    };

    let positive_pairs = per_epoch.iter().map(|e| e.1).sum();
    let epoch_objective = per_epoch
        .iter()
        .map(|&(o, p)| if p == 0 { 0.0 } else { o / p as f64 })
        .collect();
    let matrix = DMatrix::from_row_slice(vocab.len(), d, &trainer.input.into_values());
    let space = EmbeddingSpace::new(corpus.domain_id(), vocab.words().to_vec(), matrix)?;
    Ok(Trained {
        space,
        vocab,
        epoch_objective,
        positive_pairs,
    })
}
