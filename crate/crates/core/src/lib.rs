//! Largest rho-value (LR) numbers.
//!
//! For `m >= 1` the LR number `n_m` maximises the abundancy index
//! `ρ(n) = σ(n)/n` over all integers whose prime exponents sum to `m`. It is
//! built greedily by merging the sorted multiset `Z = { q + q² + … + q^k }`
//! (over primes `q` and `k >= 1`) and raising the exponent of `q` each time
//! one of its elements is consumed.
//!
//! This crate is `#![no_std]` and only needs `alloc`:
//!
//! * [`zstream`] yields `Z` in order, with ties broken by larger prime first.
//! * [`engine`] folds the stream into an [`engine::LrState`] and evaluates
//!   `ρ`, `G(n) = ρ(n)/log log n` and the Robin inequality `G(n) < e^γ`.
//! * [`exact`] is the big-integer ground truth (exact `σ(n)/n`, brute-force
//!   maximisation over small `S_m`).
//! * [`chebyshev`] holds sieve tables for `θ`, `ψ`, `ψ_Z`, the `y_k` root
//!   solver and the bound checkers.
//! * [`constants`] estimates `W₁`, `W₂` and the Meissel–Mertens constant with
//!   explicit truncation tails.
//!
//! IO, checkpoint files and the command line live in the `lr-abundant` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod chebyshev;
pub mod constants;
pub mod engine;
mod error;
pub mod exact;
pub mod primes;
pub mod sum;
pub mod zstream;

pub use error::{Error, Result};

/// Euler–Mascheroni constant, 20 significant digits.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// `e^γ`, the Robin bound for `G(n)`.
#[allow(clippy::excessive_precision)]
pub const EXP_GAMMA: f64 = 1.781_072_417_990_197_985_2;

/// Robin's inequality is only claimed for `n` above this value.
pub const ROBIN_THRESHOLD: u64 = 5040;
