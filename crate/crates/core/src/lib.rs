//! Finite-truncation laboratory for the canonical commutation relations
//! `[p, q] = -i I`.
//!
//! * [`fock`]: ladder, position and momentum matrices on truncated Fock space
//! * [`analytic`]: analytic-vector series diagnostics and Taylor exponentials
//! * [`weyl`]: matrix exponentials and Weyl-relation residuals
//! * [`grid`]: position-space realization on a uniform grid
//! * [`interval`]: the periodic finite-interval realization, where the Weyl
//!   relation fails
//! * [`symbolic`]: exact normal ordering over `Q(i, sqrt 2)`

pub mod analytic;
pub mod error;
pub mod fock;
pub mod grid;
pub mod interval;
pub mod matrix;
pub mod rng;
pub mod symbolic;
pub mod weyl;

pub use error::{CcrError, Result};
pub use fock::{BasisConvention, FockState};
pub use matrix::ComplexMatrix;
