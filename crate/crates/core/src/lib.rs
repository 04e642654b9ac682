//! PT-invariant nineteen-vertex models.
//!
//! The crate builds the four integrable weight families (1A, 1B, 2A, 2B) and the two
//! special points (1S, 2S), evaluates their algebraic invariants and functional relations,
//! assembles L-operators, transfer matrices and spin-1 Hamiltonians, and solves the
//! branch-2B chain by Bethe ansatz.
//!
//! Modules:
//! - [`weights`]: weight families, invariants, constraint residuals.
//! - [`relations`]: the functional-relation catalog and the Yang-Baxter census.
//! - [`operators`]: linear operators, transfer matrices, Hamiltonians, spectra.
//! - [`bethe`]: branch-2B Bethe equations, strings, thermodynamics.
//! - [`cli`]: configuration, reports and the subcommands behind the `vlab` binary.

pub mod bethe;
pub mod cli;
pub mod error;
pub mod operators;
pub mod relations;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// `x + iy`.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };
