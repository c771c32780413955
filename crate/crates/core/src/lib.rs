//! Modified Jain (generalized Szász-Mirakyan) operators and their
//! Kantorovich extension, with the weighted-space machinery needed to verify
//! their closed-form identities and measure their convergence rates.
//!
//! # Layout
//!
//! - [`abel`] — numerically stable generalized Poisson (Abel) weights
//!   ω_β(k, α) and the auxiliary series behind the moment identities.
//! - [`operators`] — the operator J(f; x) itself, its Kantorovich variant
//!   K(f; x), adaptive cell quadrature, and deterministic batch evaluation.
//! - [`moments`] — closed-form raw/central moments, series moments (direct
//!   and via the factorial-moment expansion), coefficient extraction, and the
//!   rate functional ξ.
//! - [`sequences`] — the (a_n, b_n, β_n) generation schemes plus
//!   admissibility diagnostics.
//! - [`spaces`] — polynomial weights, weighted norms, moduli of continuity
//!   and smoothness, Steklov smoothing means, and the damped error norm.
//! - [`functions`] — the registry of test functions with analytic metadata
//!   and a small expression parser for user-supplied functions.
//! - [`bounds`] — evaluable error-bound expressions and scheme comparison.
//! - [`report`] — the experiment runner and CSV/JSON emission.
//! - [`verify`] — the self-check suite run by the CLI `verify` subcommand.
//!
//! # Scalar genericity
//!
//! Every numerical routine is generic over [`scalar::Scalar`] (`f32` or
//! `f64`). The concrete alias [`Real`] (= `f64`) is what the report layer and
//! the CLI use.

pub mod abel;
pub mod bounds;
pub mod error;
pub mod functions;
pub mod moments;
pub mod operators;
pub mod report;
pub mod scalar;
pub mod sequences;
pub mod spaces;
pub mod verify;

pub use error::{CellFailure, Error, Result};
pub use scalar::Scalar;

/// Concrete scalar used by the report layer and the CLI.
pub type Real = f64;

/// Convenience alias for an operator configuration over [`Real`].
pub type RealOperatorConfig = operators::OperatorConfig<Real>;

/// Convenience alias for a sequence scheme over [`Real`].
pub type RealSequenceScheme = sequences::SequenceScheme<Real>;

/// Convenience alias for a test function over [`Real`].
pub type RealTestFunction = functions::TestFunction<Real>;
