//! Deterministic 64-bit generator for seeded sampling.
//!
//! SplitMix64 (Steele, Lea, Vigna): state advances by the golden-ratio
//! increment and each output is a finalizer mix of the state. Used in
//! counter mode so that sample t of a run is a pure function of
//! (seed, t) — worker partitioning cannot change the sample stream.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `draw`-th value of sample `t` for a run seeded with `seed`.
#[inline]
pub fn sample_u64(seed: u64, t: u64, draw: u64) -> u64 {
    mix64(seed.wrapping_add(t.wrapping_mul(GAMMA)).wrapping_add(mix64(draw.wrapping_mul(GAMMA))))
}

/// Sequential SplitMix64 stream, for uses that do not need counter mode.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }
}
