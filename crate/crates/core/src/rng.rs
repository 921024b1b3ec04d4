//! Deterministic randomness.
//!
//! All random decisions in the library are pure functions of a seed and a
//! structural key, so replaying an update stream reproduces every internal
//! state bit-for-bit. The generator is SplitMix64.

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Hash a `(seed, a, b)` key into a uniform 64-bit value.
#[inline]
pub fn mix(seed: u64, a: u64, b: u64) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ a) ^ b)
}

/// Fair coin keyed by `(seed, a, b)`: true with probability `num / 2^bits`.
#[inline]
pub fn coin(seed: u64, a: u64, b: u64, num: u64, bits: u32) -> bool {
    mix(seed, a, b) >> (64 - bits) < num
}

/// Coin with probability 1/4, keyed by `(seed, level, edge)`.
#[inline]
pub fn quarter_coin(seed: u64, level: u64, edge: u64) -> bool {
    coin(seed, level, edge, 1, 2)
}

/// Coin with probability 1/2, keyed by `(seed, level, item)`.
#[inline]
pub fn half_coin(seed: u64, level: u64, item: u64) -> bool {
    coin(seed, level, item, 1, 1)
}

/// Coin with real-valued probability `p`, keyed by `(seed, a, b)`.
#[inline]
pub fn prob_coin(seed: u64, a: u64, b: u64, p: f64) -> bool {
    (mix(seed, a, b) >> 11) as f64 * (1.0 / (1u64 << 53) as f64) < p
}

/// Sequential generator for places that need a stream rather than a key.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, bound)`.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Random permutation rank per vertex, drawn from `seed` by Fisher-Yates.
pub fn permutation_ranks(seed: u64, n: usize) -> Vec<u64> {
    let mut rng = SplitMix64::new(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        perm.swap(i, j);
    }
    let mut rank = vec![0u64; n];
    for (pos, &v) in perm.iter().enumerate() {
        rank[v] = pos as u64;
    }
    rank
}
