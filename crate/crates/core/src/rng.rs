//! Seeded PRNG for reproducible experiments.
//!
//! SplitMix64 is used instead of a `rand` generator so that verification
//! runs replicate bit-for-bit across independent implementations of the
//! same protocol: the algorithm is fully specified by three shift-xor
//! rounds and two multiplier constants.

/// SplitMix64 (Steele, Lea, Flood). State advances by the golden-ratio
/// increment; output is a finalizer over the new state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Uniform sample from the box `[0, cap]^N` restricted to total <= cap,
/// by rejection. This is the initial-condition distribution used by the
/// verification commands and the acceptance experiments.
pub fn sample_in_region<const N: usize>(rng: &mut SplitMix64, cap: f64) -> [f64; N] {
    loop {
        let mut x = [0.0; N];
        let mut total = 0.0;
        for v in x.iter_mut() {
            *v = rng.uniform(0.0, cap);
            total += *v;
        }
        if total <= cap {
            return x;
        }
    }
}
