//! Invariant ("eigen") boundary conditions for one-dimensional homogeneous
//! Gaussian Markov chains.
//!
//! A chain is described by a [`GaussianWeight`]: a scale `α > 0` and a
//! `2d × 2d` Hermitian positive-definite coupling
//!
//! ```text
//! A = [ A_LL  A_LR ]
//!     [ A_RL  A_RR ]
//! ```
//!
//! The spectral data of the symbol `Φ(z) = A_LL + A_RR + A_LR z + A_RL / z`
//! yields closed forms for the boundary matrices that are fixed points of
//! the Schur-complement map, the covariance blocks of the infinite chain,
//! partition functions and exact boundary-corrected block-Toeplitz
//! determinants.
//!
//! ```
//! use eigenbc_core::{invariant, symbol, weights::GaussianWeight, ComplexMatrix};
//!
//! let a = ComplexMatrix::from_real_rows(&[&[1.25, -1.0], &[-1.0, 1.25]]);
//! let w = GaussianWeight::new(1.0, a).unwrap();
//! let s = symbol::compute_spectrum(&w).unwrap();
//! let ib = invariant::invariant_boundaries(&w, &s).unwrap();
//! assert!((ib.b_r[(0, 0)].re - 0.75).abs() < 1e-12);
//! assert!((ib.lambda - core::f64::consts::PI).abs() < 1e-12);
//! ```
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod invariant;
pub mod numkit;
pub mod oracles;
pub mod process;
pub mod symbol;
pub mod szego;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numkit::ComplexMatrix;
pub use weights::{BoundaryWeight, GaussianWeight};

/// Which end of the chain a boundary matrix sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[inline]
pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
