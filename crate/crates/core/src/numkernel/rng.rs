use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

use crate::Real;

/// Deterministic, labeled random stream.
///
/// The generator is keyed by hashing `(seed, stream label)`, so an identical
/// pair always yields the identical draw sequence, and child streams derived
/// with [`SeededRng::stream`] are statistically independent of the parent
/// regardless of how many draws the parent has made.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    label: String,
    inner: ChaCha12Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::with_label(seed, "root")
    }

    pub fn with_label(seed: u64, label: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(seed.to_le_bytes());
        hasher.update([0u8]);
        hasher.update(label.as_bytes());
        let key: [u8; 32] = hasher.finalize().into();
        SeededRng {
            seed,
            label: label.to_string(),
            inner: ChaCha12Rng::from_seed(key),
        }
    }

    /// Child stream labeled relative to this one. Derivation depends only on
    /// `(seed, labels)`, never on the parent's draw position.
    pub fn stream(&self, label: &str) -> SeededRng {
        Self::with_label(self.seed, &format!("{}/{}", self.label, label))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `[0, n)` by rejection sampling (no modulo bias).
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0) is undefined");
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }

    /// Uniform draw in `[0, 1)` with 53-bit resolution.
    pub fn unit<T: Real>(&mut self) -> T {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        T::from_f64_lossy(u)
    }

    pub fn uniform<T: Real>(&mut self, lo: T, hi: T) -> T {
        lo + (hi - lo) * self.unit()
    }

    /// Standard normal draw via Box-Muller; one value per call.
    pub fn standard_normal<T: Real>(&mut self) -> T {
        let u1: f64 = 1.0 - (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let u2: f64 = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        T::from_f64_lossy(z)
    }

    pub fn normal<T: Real>(&mut self, mean: T, sd: T) -> T {
        mean + sd * self.standard_normal()
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// `k` distinct indices sampled without replacement from `[0, n)`,
    /// in draw order.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "cannot sample {k} of {n} without replacement");
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}
