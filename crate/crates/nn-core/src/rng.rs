//! The project's deterministic random number generator.
//!
//! Everything that needs randomness — weight initialization, dropout masks,
//! game generation — draws from [`SplitMix64`], a tiny counter-based
//! generator with a published reference implementation. It is chosen for
//! reproducibility rather than statistical heroics: the state transition is
//! one 64-bit add, the output is a fixed 64-bit mix, and identical seeds
//! produce identical streams on every platform. Not cryptographic.

/// SplitMix64: `state += 0x9E3779B97F4A7C15; output = mix(state)`.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 finalizer: a bijective 64-bit avalanche mix.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    /// Derives an independent stream for substream `index` of a master
    /// seed. Used to give each generated game its own seed such that game
    /// `i` is reproducible without generating games `0..i`.
    pub fn derive(master_seed: u64, index: u64) -> SplitMix64 {
        SplitMix64::new(mix64(
            master_seed.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)),
        ))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw from `0..bound` without modulo bias, by rejection.
    /// Panics if `bound` is zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below(0) is meaningless");
        // Reject draws from the final partial copy of `bound` in u64 space.
        let zone_limit = bound.wrapping_neg() % bound;
        loop {
            let draw = self.next_u64();
            if draw >= zone_limit {
                return draw % bound;
            }
        }
    }

    /// Uniform draw from the inclusive range `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi, "empty range {lo}..={hi}");
        let span = hi - lo + 1;
        if span == 0 {
            // lo == 0 && hi == u64::MAX: the full domain.
            return self.next_u64();
        }
        lo + self.below(span)
    }

    /// Uniform f64 in `[0, 1)` with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform f64 in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
