//! Deterministic pseudo-random source for grid generation.
//!
//! SplitMix64 is used instead of an external RNG so that reports produced
//! from the same seed stay byte-identical across builds and dependency
//! upgrades.

/// SplitMix64 generator (Steele, Lea, Flood 2014 constants).
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

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform draw from the dyadic lattice {k / DYADIC_DENOM : 0 <= k <= hi * DYADIC_DENOM}.
    ///
    /// Dyadic times keep shift arithmetic exact: sums and differences of
    /// lattice points of moderate magnitude incur no rounding, so semiflow
    /// composition residuals are exactly zero.
    pub fn dyadic(&mut self, hi: f64) -> f64 {
        let steps = (hi * DYADIC_DENOM).round() as u64;
        let k = self.next_u64() % (steps + 1);
        k as f64 / DYADIC_DENOM
    }
}

/// Resolution of the dyadic time lattice used by random grids.
pub const DYADIC_DENOM: f64 = 64.0;
