//! Multiparameter harmonic-analysis operators on sampled fields.
//!
//! The crate discretizes the operator zoo of product Hardy-space theory on
//! uniform half-offset grids over `R^d` (d = 1, 2, 3): Fourier multipliers,
//! directional and iterated Hilbert transforms, per-axis Riesz potentials and
//! the product fractional integral, Poisson maximal functions and Hardy-norm
//! estimators, Lusin area integrals, atom generators, and the Hardy-Cesaro
//! operator. Everything is pure and value-semantic: operations never mutate
//! their inputs, and all types are safe to share across threads.
//!
//! The companion `phl` binary drives bounded-ratio experiments over atom
//! corpora and writes CSV/JSON reports; see the workspace README.

pub mod atoms;
pub mod cesaro;
pub mod error;
pub mod field;
pub mod grid;
pub mod hardy;
pub mod io;
pub mod potentials;
pub mod spectral;
pub mod spectrum;
pub mod square;

mod fft;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use field::{Field, ScalarKind};
pub use grid::{Exponents, GridSpec};
pub use spectrum::Spectrum;
