//! Exact spectral analysis of an atom coupled to one cavity photon mode and one
//! mechanical phonon mode, with excitation-conserving couplings between all
//! three pairs.
//!
//! The crate computes the photon/phonon normal modes, the dressed
//! one-excitation spectrum, closed-form eigenstates, dark (no photon) and
//! quasi-dark (no phonon) eigenstates and the duality that exchanges them when
//! the atom-photon and atom-phonon couplings are swapped. Every closed form has
//! a brute-force counterpart in [`oracle`].
//!
//! Modules:
//! - [`model`]: parameters, standing assumptions, excitation-sector matrices
//! - [`bogoliubov2`]: photon/phonon normal modes
//! - [`bogoliubov3`]: dressed one-excitation spectrum and its unitary
//! - [`darkstates`]: tuning conditions, eigenstate assembly, classification
//! - [`observables`]: occupation expectations and the swap duality
//! - [`oracle`]: dense diagonalization and cross-checks
//! - [`cli`]: command-line driver

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bogoliubov2;
pub mod bogoliubov3;
pub mod cli;
pub mod darkstates;
mod error;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod serde_complex;

pub use error::{Error, Result};
pub use model::{AtomKind, ModelParams};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
