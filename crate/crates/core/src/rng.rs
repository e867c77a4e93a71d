//! Seeded pseudo-random numbers.
//!
//! All randomness in the crate (weight init, shuffles, synthetic mixtures and
//! noise) comes from SplitMix64 (Steele, Lea & Flood 2014) so that datasets and
//! trained models are reproducible bit for bit, including by other
//! implementations. The float mappings are fixed:
//!
//! - `next_f64`: top 53 bits scaled by 2⁻⁵³, giving `[0, 1)`.
//! - `next_gaussian`: one Box–Muller cosine branch,
//!   `sqrt(-2 ln u1) · cos(2π u2)` with `u1 = 1 - next_f64()` and `u2 = next_f64()`.
//! - `below(n)`: `floor(next_f64() · n)`.
//!
//! Independent streams are derived with [`SplitMix64::stream`], which hashes
//! `(seed, stream id)` into a fresh state.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// A generator for sub-stream `id` of `seed`.
    pub fn stream(seed: u64, id: u64) -> Self {
        Self::new(mix(seed ^ mix(id.wrapping_add(1).wrapping_mul(GAMMA))))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform index in `0..n`. `n` must be nonzero.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let i = (self.next_f64() * n as f64) as usize;
        i.min(n - 1)
    }

    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
    }

    /// Fisher–Yates, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
