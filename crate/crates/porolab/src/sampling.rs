//! Seeded sampling. All randomness in an experiment flows from one generator.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Up to `k` distinct items, kept in their original order.
    pub fn choose<T: Clone>(&mut self, items: &[T], k: usize) -> Vec<T> {
        if k >= items.len() {
            return items.to_vec();
        }
        let mut idx = index::sample(&mut self.rng, items.len(), k).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| items[i].clone()).collect()
    }

    /// Log-uniform draw from `[lo, hi]`.
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u: f64 = self.rng.gen();
        (lo.ln() + u * (hi.ln() - lo.ln())).exp()
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.rng.gen_range(0..n)
    }
}
