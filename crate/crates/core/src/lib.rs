//! Numerical certification of the spectral stability argument for the
//! equivariant Yang–Mills heat flow in dimensions 5 ≤ d ≤ 9, together with
//! the similarity-coordinate dynamics of its explicit shrinking soliton.
//!
//! Module map:
//!
//! * [`model`]: closed-form constants, profiles, potentials, the half-line
//!   transform, the nonlinearity and grid norms.
//! * [`quad`]: adaptive Gauss–Kronrod quadrature, the Gamma function and an
//!   exact partial-fraction integrator over a quadratic number field.
//! * [`ggmt`]: the integral bound for absence of non-positive spectrum.
//! * [`spectral`]: finite-difference half-line Schrödinger operators and a
//!   Sturm-bisection eigensolver.
//! * [`evolve`]: IMEX time stepping in similarity and physical coordinates,
//!   unstable-mode projection and blowup-time shooting.
//! * [`cli`]: command-line surface and report emission.
//! * [`repro`]: the end-to-end acceptance checks shared by the test suite and
//!   the `repro` subcommand.

pub mod cli;
pub mod error;
pub mod evolve;
pub mod ggmt;
pub mod linalg;
pub mod model;
pub mod quad;
pub mod repro;
pub mod spectral;

pub use error::{Error, Result};
