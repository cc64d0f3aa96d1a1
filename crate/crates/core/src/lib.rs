//! Operator size distributions of scrambling spin dynamics, and the randomized
//! mixed-state protocols that estimate them from single-time expectation
//! values.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs and an explicit seed; file formats, configuration and
//! the command line live in the `notoc-lab` companion crate.
//!
//! Layout:
//!
//! - [`operator`] and [`pauli`]: dense complex operators and bitmask Pauli
//!   strings, with a fast transform onto the Pauli basis.
//! - [`dynamics`]: the tilted-field Ising chain, exact diagonalization and
//!   unitary evolution in both pictures.
//! - [`oracle`]: exact size distributions, generating functions, moments,
//!   Haar baselines and time-averaged scrambling metrics.
//! - [`protocol_a`]: polarized product states with random local rotations,
//!   whose averaged squared expectation value samples the generating function.
//! - [`protocol_b`]: correlated subset states that isolate a single size class.
//! - [`inversion`]: forward finite differences, noise models and Vandermonde
//!   inversion for recovering sizes from generating-function samples.
//! - [`collective`]: spherical-tensor machinery and the rank-resolved
//!   estimator for collective spin systems.
//! - [`seed`], [`stats`]: per-task seeding and fixed-order statistics.
#![no_std]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod collective;
pub mod dynamics;
mod error;
mod exec;
pub mod inversion;
pub mod operator;
pub mod oracle;
pub mod pauli;
pub mod protocol_a;
pub mod protocol_b;
pub mod seed;
pub mod stats;

pub use error::{Error, Result};
pub use operator::DenseOperator;
pub use pauli::PauliString;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Largest chain length for which dense `2^N x 2^N` operators are built.
pub const DEFAULT_MAX_DENSE_SITES: usize = 12;
