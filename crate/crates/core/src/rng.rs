//! Small, portable PRNG used everywhere randomness is needed.
//!
//! All sampling in this crate flows through [`SplitMix64`] so that a given
//! seed produces the same graphs, weights, and start points on every
//! platform. The generator is the standard splitmix64 finalizer; it is also
//! used in counter mode to derive independent per-instance seeds from one
//! global seed.

/// splitmix64 generator (Steele, Lea, Flood 2014 constants).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in [0, bound) via Lemire's widening-multiply method
    /// (debiased, deterministic across platforms).
    pub fn next_index(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "bound must be positive");
        let bound = bound as u64;
        let mut x = self.next_u64();
        let mut m = (x as u128) * (bound as u128);
        let mut lo = m as u64;
        if lo < bound {
            let threshold = bound.wrapping_neg() % bound;
            while lo < threshold {
                x = self.next_u64();
                m = (x as u128) * (bound as u128);
                lo = m as u64;
            }
        }
        (m >> 64) as u64 as usize
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_index(i + 1);
            items.swap(i, j);
        }
    }
}

/// Derives the seed for instance `index` from a global seed (counter mode:
/// one splitmix step keyed by the pair, so instances are independent and the
/// mapping is stable under reordering or parallel dispatch).
pub fn derive_seed(global_seed: u64, index: u64) -> u64 {
    let mut rng = SplitMix64::new(global_seed ^ index.wrapping_mul(0xA24BAED4963EE407));
    rng.next_u64()
}
