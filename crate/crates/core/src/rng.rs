//! Portable deterministic random numbers for the seeded model builders.
//!
//! The generator is SplitMix64 (increment `0x9E3779B97F4A7C15`, multipliers
//! `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`, shifts 30/27/31). Normals use
//! the Box–Muller cosine branch: two successive 64-bit draws `x1, x2` give
//! `u1 = 1 - (x1 >> 11) * 2^-53` in `(0, 1]`, `u2 = (x2 >> 11) * 2^-53`, and
//! `z = sqrt(-2 ln u1) * cos(2 pi u2)`. Transcendentals come from `libm`, so
//! the stream is bit-identical on every platform and easy to port.
//!
//! Test vectors (seed 0): `0xe220a8397b1dcdaf`, `0x6e789e6aa1b965f4`,
//! `0x06c45d188009454f`.

use num_complex::Complex64;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_M53
    }

    /// Standard normal deviate; consumes two 64-bit draws.
    pub fn next_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * std::f64::consts::PI * u2)
    }

    /// Real then imaginary part, each an independent standard normal.
    pub fn next_complex_normal(&mut self) -> Complex64 {
        let re = self.next_normal();
        let im = self.next_normal();
        Complex64::new(re, im)
    }
}
