//! Counter-based pseudo-random generator for reproducible simulation.
//!
//! Output i of a stream is a pure function of (key, i), so independent runs
//! can be generated in parallel and still produce byte-identical records:
//! run r draws from the stream keyed by `split(seed, r)` regardless of which
//! thread executes it. SplitMix64 finalizer; not cryptographic.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix64(seed.wrapping_add(GOLDEN)),
            counter: 0,
        }
    }

    /// Stream `stream` of master seed `seed`; streams are pairwise independent
    /// for distinct indices. Used to give every simulated run its own stream.
    pub fn split(seed: u64, stream: u64) -> Self {
        let key = mix64(seed.wrapping_add(GOLDEN)) ^ mix64(stream.wrapping_mul(GOLDEN) ^ 0x5851_F42D_4C95_7F2D);
        Self {
            key: mix64(key),
            counter: 0,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let out = mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)));
        self.counter += 1;
        out
    }

    /// Uniform integer in [0, bound) by rejection (unbiased).
    pub fn below_u64(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below_u64 with zero bound");
        // Reject draws above the largest multiple of `bound` that fits in u64.
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    /// Uniform big integer in [0, bound) by top-bit rejection.
    pub fn below_biguint(&mut self, bound: &BigUint) -> BigUint {
        assert!(!bound.is_zero(), "below_biguint with zero bound");
        if bound.is_one() {
            return BigUint::zero();
        }
        if let Some(b) = bound.to_u64() {
            return BigUint::from(self.below_u64(b));
        }
        let bits = bound.bits();
        let words = bits.div_ceil(64) as usize;
        let top_mask = if bits.is_multiple_of(64) {
            u64::MAX
        } else {
            (1u64 << (bits % 64)) - 1
        };
        loop {
            let mut draw: Vec<u64> = (0..words).map(|_| self.next_u64()).collect();
            draw[words - 1] &= top_mask;
            let x = BigUint::from_slice(
                &draw
                    .iter()
                    .flat_map(|w| [*w as u32, (*w >> 32) as u32])
                    .collect::<Vec<_>>(),
            );
            if &x < bound {
                return x;
            }
        }
    }
}
