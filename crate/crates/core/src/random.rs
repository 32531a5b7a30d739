use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Rational;

/// Default size of the sampling set: 2^20 integers centred at zero.
pub const DEFAULT_SAMPLE_BOUND: u64 = 1 << 20;

/// Seeded source of random integers drawn uniformly from
/// `{-floor(S/2), ..., ceil(S/2) - 1}` where `S` is the sample bound.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    sample_bound: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::with_bound(seed, DEFAULT_SAMPLE_BOUND)
    }

    /// Panics if `sample_bound < 2` or exceeds `i64::MAX`.
    pub fn with_bound(seed: u64, sample_bound: u64) -> Self {
        assert!(sample_bound >= 2, "sample bound must be at least 2");
        assert!(sample_bound <= i64::MAX as u64, "sample bound too large");
        Self {
            seed,
            sample_bound,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sample_bound(&self) -> u64 {
        self.sample_bound
    }

    /// Lower end of the sampling interval.
    pub fn low(&self) -> i64 {
        -((self.sample_bound / 2) as i64)
    }

    /// Upper end of the sampling interval (inclusive).
    pub fn high(&self) -> i64 {
        self.low() + self.sample_bound as i64 - 1
    }

    pub fn sample_i64(&mut self) -> i64 {
        let (lo, hi) = (self.low(), self.high());
        self.rng.random_range(lo..=hi)
    }

    pub fn sample(&mut self) -> Rational {
        Rational::from_integer(BigInt::from(self.sample_i64()))
    }

    /// A sample from the set that is different from every value in `avoid`.
    pub fn sample_avoiding(&mut self, avoid: &[i64]) -> Rational {
        loop {
            let v = self.sample_i64();
            if !avoid.contains(&v) {
                return Rational::from_integer(BigInt::from(v));
            }
        }
    }

    pub fn point(&mut self, n: usize) -> Vec<Rational> {
        (0..n).map(|_| self.sample()).collect()
    }

    /// Uniform integer in `lo..=hi`, independent of the sample bound.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn range_usize(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    /// Derive an independent stream, for callers that need a sub-generator
    /// without disturbing this one's sequence layout.
    pub fn fork(&mut self) -> RandomSource {
        let seed: u64 = self.rng.random();
        RandomSource::with_bound(seed, self.sample_bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_is_centred() {
        let r = RandomSource::with_bound(0, 10);
        assert_eq!((r.low(), r.high()), (-5, 4));
        let r = RandomSource::with_bound(0, 7);
        assert_eq!((r.low(), r.high()), (-3, 3));
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        assert_eq!(a.point(16), b.point(16));
    }

    #[test]
    fn samples_stay_in_range() {
        let mut r = RandomSource::with_bound(3, 5);
        for _ in 0..1000 {
            let v = r.sample_i64();
            assert!((-2..=2).contains(&v));
        }
    }
}
