//! Numerical verification engine for pointwise slant submanifold geometry in
//! flat almost Hermitian ambients.
//!
//! * [`numkit`]: jets, dense linear algebra, eigensolvers.
//! * [`structures`]: almost Hermitian structures, their families, Nijenhuis
//!   and Frölicher–Nijenhuis tensors.
//! * [`immersion`]: frames, induced metrics, tangential operators and the
//!   Gauss-formula connection of parametrized submanifolds.
//! * [`slant`]: the spectral slant test and the family, transitivity and
//!   product checks built on it.

pub mod error;
pub mod immersion;
pub mod numkit;
pub mod slant;
pub mod structures;

#[cfg(test)]
mod test_fixtures;

pub use error::{Error, Result};

/// Engine version recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
