//! Nonuniform block sampling, `P[i] = sqrt(L_i) / S`.

use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;

use crate::error::{Error, Result};
use crate::problem::ProblemParams;

/// Seeded constant-time block sampler. One instance per worker thread.
#[derive(Debug, Clone)]
pub struct BlockSampler {
    probabilities: Vec<f64>,
    table: WeightedAliasIndex<f64>,
    rng: ChaCha8Rng,
}

impl BlockSampler {
    /// Sampler for accelerated methods: `P[i] = sqrt(L_i) / S`.
    pub fn accelerated(params: &ProblemParams, seed: u64) -> Self {
        Self::from_probabilities(params.probabilities(), seed)
            .expect("probabilities from valid params are positive")
    }

    /// Uniform sampling over `n_blocks`, as used by plain RBCD.
    pub fn uniform(n_blocks: usize, seed: u64) -> Self {
        Self::from_probabilities(vec![1.0 / n_blocks as f64; n_blocks], seed)
            .expect("uniform weights are valid")
    }

    pub fn from_probabilities(weights: Vec<f64>, seed: u64) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter("sampling weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        let probabilities: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let table = WeightedAliasIndex::new(probabilities.clone())
            .map_err(|e| Error::InvalidParameter(format!("alias table: {e}")))?;
        Ok(Self { probabilities, table, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    /// Independent stream for worker `index` of a run seeded with `seed`.
    pub fn for_worker(&self, seed: u64, index: usize) -> Self {
        let mut s = self.clone();
        s.rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64));
        s
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn sample(&mut self) -> usize {
        self.table.sample(&mut self.rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities_from_lipschitz() {
        let p = ProblemParams::new(1.0, vec![1.0, 4.0, 9.0, 16.0], 16.0).unwrap();
        let s = BlockSampler::accelerated(&p, 0);
        for (got, want) in s.probabilities().iter().zip([0.1, 0.2, 0.3, 0.4]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn equal_constants_are_uniform() {
        let p = ProblemParams::new(0.5, vec![3.0; 5], 3.0).unwrap();
        let s = BlockSampler::accelerated(&p, 0);
        assert!(s.probabilities().iter().all(|q| (q - 0.2).abs() < 1e-15));
    }

    #[test]
    fn empirical_frequency_two_blocks() {
        let p = ProblemParams::new(1.0, vec![1.0, 4.0], 4.0).unwrap();
        let mut s = BlockSampler::accelerated(&p, 17);
        let draws = 1_000_000;
        let hits = (0..draws).filter(|_| s.sample() == 1).count();
        let freq = hits as f64 / draws as f64;
        // binomial sd at p = 2/3 is 4.7e-4; 0.002 is > 4 sd
        assert!((freq - 2.0 / 3.0).abs() < 0.002, "freq = {freq}");
    }

    #[test]
    fn deterministic_under_seed() {
        let p = ProblemParams::new(1.0, vec![1.0, 2.0, 3.0], 3.0).unwrap();
        let mut a = BlockSampler::accelerated(&p, 99);
        let mut b = BlockSampler::accelerated(&p, 99);
        let xa: Vec<usize> = (0..1000).map(|_| a.sample()).collect();
        let xb: Vec<usize> = (0..1000).map(|_| b.sample()).collect();
        assert_eq!(xa, xb);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(BlockSampler::from_probabilities(vec![1.0, 0.0], 0).is_err());
        assert!(BlockSampler::from_probabilities(vec![], 0).is_err());
    }
}
