//! Dilational Hilbert scales.
//!
//! Norms of the form `‖f‖²_φ = ∫ φ(λ) dE_ff(λ)` over the spectral measure of
//! `T = −d²/dx²`, the interpolation inequalities between them evaluated as
//! signed margins, and regularized sharpening of broadened spectroscopic
//! peaks with the matching a-priori error bounds.
//!
//! Module map:
//!
//! * [`spectral`]: sampled signals, the continuous-scaled DFT pair and the
//!   discrete spectral density over `λ = ω²`.
//! * [`index_fn`]: index functions `a(λ)`, their dilations and inverses, the
//!   generator construction from a scaling profile `α`, and the numerical
//!   certificates (scaling relation, multiplicativity, convexity).
//! * [`scales`]: weighted norms and the inequality margins.
//! * [`deconv`]: peak models, kernel factorization, discrepancy-driven
//!   sharpening and the error bounds.
//! * [`hardy`]: differentiation of analytic periodic functions.
//! * [`verify`]: seeded randomized inequality suites.
//! * [`cli`]: configuration, commands and report I/O.

pub mod cli;
pub mod deconv;
mod error;
pub mod hardy;
pub mod index_fn;
pub mod io;
mod quad;
pub mod report;
pub mod rng;
pub mod scales;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
