//! Regularized factorization method for qualitative shape reconstruction
//! from noisy far-field data.
//!
//! The crate is organised bottom-up:
//!
//! - [`spectra`]: dense Hermitian spectral algebra (eigensystems, `|M|`,
//!   the augmented operator `F#`, cluster projections, the index `N(δ)`).
//! - [`regularization`]: spectral filters and the a-priori parameter rule.
//! - [`indicator`]: Picard sums, regularized solutions and the quadratic
//!   indicator `<x, A x>`.
//! - [`perturb_verify`]: seeded harness that checks the perturbation bounds
//!   on random positive operators.
//! - [`scattering`]: Born-approximation far-field synthesis in 2-D.
//! - [`imaging`]: the imaging functional `W(z)` over a sampling grid.
//! - [`cli_io`]: run configuration and on-disk formats.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_io;
pub mod error;
pub mod imaging;
pub mod indicator;
pub mod perturb_verify;
pub mod regularization;
pub mod rng;
pub mod scattering;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64;
