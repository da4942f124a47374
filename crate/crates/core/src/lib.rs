//! Inverse closest-separable-state construction on the PPT set.
//!
//! Given a boundary state σ of the set of states with positive partial
//! transpose, this crate builds the family of entangled states whose
//! relative-entropy-of-entanglement minimizer is σ, evaluates the relative
//! entropy of entanglement along the family in closed form, and checks every
//! construction against an independent numerical minimizer.
//!
//! Module map:
//!
//! - [`linalg`]: hermitian matrices on tensor-factored spaces, spectra,
//!   matrix functions, partial transpose.
//! - [`lsigma`]: the divided-difference kernels behind the derivative of the
//!   matrix logarithm, `L_σ`, its inverse and its pseudo-inverse.
//! - [`boundary`]: PPT boundary geometry, supporting hyperplanes, boundary
//!   state generation.
//! - [`css`]: families of states sharing a closest PPT state and the closed
//!   relative entropy formula.
//! - [`oracle`]: relative entropy, numerical minimization over the PPT set,
//!   product-state maximization and the concavity property suite.
//! - [`io`] and [`cli`]: JSON matrix interchange and the command line.

pub mod boundary;
pub mod cli;
pub mod css;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lsigma;
pub mod oracle;
pub mod random;

pub use error::{Error, Result};
pub use linalg::{DensityMatrix, HermitianMatrix, Spectrum};
