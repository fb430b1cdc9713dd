//! Deterministic random numbers: SplitMix64 for seed mixing, PCG32
//! (XSH-RR 64/32) for the streams themselves.
//!
//! Every random decision in the crate is drawn from a [`Pcg32`] whose seed
//! is derived with [`mix64`], so results depend only on the base seed and
//! the index of the thing being generated, never on thread scheduling.

const PCG_MULTIPLIER: u64 = 6_364_136_223_846_793_005;
/// Stream selector used by [`Pcg32::from_seed`] (the reference default).
pub const DEFAULT_STREAM: u64 = 0xda3e_39cb_94b9_5bdb;

/// One SplitMix64 output for input `x`.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `(base, index)`.
///
/// `mix64(b, i) = splitmix64(b ^ splitmix64(i))`.
#[inline]
pub fn mix64(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}

/// Base seed of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

impl Seed {
    /// Seed for item `index` (image, output position, ...).
    pub fn derive(self, index: u64) -> u64 {
        mix64(self.0, index)
    }

    /// PCG32 stream for item `index`.
    pub fn rng_for(self, index: u64) -> Pcg32 {
        Pcg32::from_seed(self.derive(index))
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// PCG32 generator, identical to `pcg32_srandom_r` / `pcg32_random_r`
/// from the reference C implementation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pcg32 {
    state: u64,
    inc: u64,
}

impl Pcg32 {
    pub fn new(init_state: u64, init_seq: u64) -> Self {
        let mut rng = Pcg32 {
            state: 0,
            inc: (init_seq << 1) | 1,
        };
        rng.next_u32();
        rng.state = rng.state.wrapping_add(init_state);
        rng.next_u32();
        rng
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, DEFAULT_STREAM)
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        let old = self.state;
        self.state = old.wrapping_mul(PCG_MULTIPLIER).wrapping_add(self.inc);
        let xorshifted = (((old >> 18) ^ old) >> 27) as u32;
        let rot = (old >> 59) as u32;
        xorshifted.rotate_right(rot)
    }

    /// Uniform integer in `[0, bound)` by rejection (`pcg32_boundedrand_r`).
    ///
    /// Panics if `bound == 0`.
    pub fn below(&mut self, bound: u32) -> u32 {
        assert!(bound > 0, "bound must be positive");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u32();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    /// Uniform `usize` in `[0, bound)`; `bound` must fit in `u32`.
    pub fn below_usize(&mut self, bound: usize) -> usize {
        let bound = u32::try_from(bound).expect("bound exceeds u32 range");
        self.below(bound) as usize
    }

    /// Uniform float in `[0, 1)` with 53 random bits (two draws, high first).
    pub fn next_f64(&mut self) -> f64 {
        let hi = u64::from(self.next_u32());
        let lo = u64::from(self.next_u32());
        (((hi << 32) | lo) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// In-place Fisher-Yates shuffle, last element first.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below_usize(i + 1);
            items.swap(i, j);
        }
    }
}
