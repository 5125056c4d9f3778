//! Separation-free exponential fitting with structured noise.
//!
//! The crate synthesizes exponential-sum measurement traces whose exponents
//! are Sturm–Liouville eigenvalues, recovers exponents and amplitudes with
//! Prony-type methods at arbitrary precision, computes first-order condition
//! numbers and their asymptotic decay across three sampling regimes, and
//! applies the machinery to recover an unknown potential in a 1-D
//! reaction-diffusion equation from point or integral measurements.

pub mod analysis;
pub mod condnum;
pub mod inverse;
pub mod mpnum;
pub mod pde;
pub mod prony;
pub mod rng;
pub mod spectral;

pub use mpnum::{Real, RealMatrix, RealVec};
