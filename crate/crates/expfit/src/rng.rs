//! Deterministic seedable generator for experiment reproducibility.
//!
//! SplitMix64: tiny, platform-independent, and bit-stable across runs, which
//! keeps identical configs producing identical output files.

use crate::mpnum::Real;

#[derive(Clone, Debug)]
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

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform `Real` in [lo, hi) at the requested precision (f64 grid).
    pub fn uniform_real(&mut self, prec: u32, lo: f64, hi: f64) -> Real {
        Real::from_f64(prec, self.uniform(lo, hi))
    }
}
