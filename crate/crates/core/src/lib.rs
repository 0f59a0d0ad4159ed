//! Validated numerics for an explicit Selberg sieve with logarithmic weights.
//!
//! The crate computes rigorous interval enclosures for the quadratic form
//!
//! ```text
//! Σ_q(U) = Σ_{d,e ≤ U, (de,q)=1} μ(d)μ(e)/[d,e] · log(U/d) · log(U/e)
//! ```
//!
//! and for every constant that enters its explicit asymptotic
//! `Σ_q(U) = q/φ(q)·log U − 𝔰_q + O*(K_q/log U)`: prime products and sums,
//! Möbius averages, the kernel integral ∫ h_q(s)/s ds, the lemma constants
//! assembled from them and the resulting Brun–Titchmarsh coefficient.
//!
//! Modules, bottom-up:
//! - [`interval`]: directed-rounding interval arithmetic.
//! - [`primes`]: segmented sieve, μ, φ, κ, φ_s, κ_s.
//! - [`euler`]: Euler products and prime sums with tail bounds, ζ(s).
//! - [`fixed`]: exact fixed-point accumulation and decimal constants.
//! - [`mobius`]: the m-family, weighted squarefree sums, threshold scans.
//! - [`hq`]: the kernel h_q, its logarithmic integral and tail bounds.
//! - [`sigma`]: brute-force and decomposed evaluation of Σ_q(U).
//! - [`pipeline`]: assembly of the lemma constants, K_v and 𝔅.
//! - [`inputs`]: literal inputs imported from the literature.

pub mod error;
pub mod euler;
pub mod fixed;
pub mod hq;
pub mod inputs;
pub mod interval;
pub mod mobius;
pub mod pipeline;
pub mod primes;
pub mod sigma;

pub use error::{Error, Result};
pub use interval::Interval;
