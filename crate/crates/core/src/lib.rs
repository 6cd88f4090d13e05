//! Symbol calculus for pseudodifferential operators acting across a
//! hypersurface, with an exact spectral model on the flat 2-torus.
//!
//! * [`symbols`]: classical symbols, η-integration, boundary symbols.
//! * [`torus`]: the flat torus `(ℝ/2πℤ)²` with `Z = {y = 0}`: extension,
//!   trace, quasi-inverse Laplacian, harmonic extension, bilateral
//!   Dirichlet-to-Neumann map, Kohn-Nirenberg quantization.
//! * [`verify`]: per-result verification reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod symbols;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
