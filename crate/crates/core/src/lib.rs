//! Partial sums of subword-counting sequences.
//!
//! For a binary word `w`, let `s_w(n)` be the number of times `w` occurs as a
//! scattered subword of the binary expansion of `n`. This crate studies
//! `Σ_{n≤N} (-1)^{s_w(n)}` through an exact linear representation indexed by
//! an orbit of binary words:
//!
//! - [`word`] and [`counting`]: words, occurrence counts, parity brackets.
//! - [`dynamics`]: the maps `S_a(w)`, `T_a(w)`, orbits and cycle structure.
//! - [`linrep`]: signed-permutation matrices, state vectors, exact partial sums.
//! - [`spectra`]: exact modulus-2 eigenvalue deciders and spectral radius estimates.
//! - [`certify`]: cycle-parity certificates, theorem-family checks, classification.
//! - [`cli`]: run configuration and the command implementations behind the `subword` binary.

pub mod certify;
pub mod cli;
pub mod counting;
pub mod dynamics;
pub mod error;
pub mod linrep;
pub mod spectra;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use word::BinaryWord;
