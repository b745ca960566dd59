use rand::Rng;

/// Unigram noise distribution for negative sampling, with probabilities
/// proportional to `count^exponent`.
#[derive(Debug, Clone)]
pub struct NoiseDistribution {
    cumulative: Vec<f64>,
}

impl NoiseDistribution {
    pub fn from_counts(counts: &[usize], exponent: f64) -> Self {
        let weights: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        Self::from_weights(&weights, exponent)
    }

    /// Panics if `weights` is empty or sums to zero.
    pub fn from_weights(weights: &[f64], exponent: f64) -> Self {
        assert!(!weights.is_empty(), "noise distribution needs support");
        let powered: Vec<f64> = weights.iter().map(|w| w.powf(exponent)).collect();
        let total: f64 = powered.iter().sum();
        assert!(total > 0.0, "noise weights sum to zero");
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = powered
            .iter()
            .map(|p| {
                acc += p;
                acc / total
            })
            .collect();
        *cumulative.last_mut().unwrap() = 1.0;
        Self { cumulative }
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn probability(&self, i: usize) -> f64 {
        let lo = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
        self.cumulative[i] - lo
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}
