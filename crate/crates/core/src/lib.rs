//! Exactly solvable Dunkl-Schrödinger systems with position-dependent mass and
//! energy-dependent potentials.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Kummer's confluent hypergeometric function, associated Laguerre
//!   functions of real degree and the modified Bessel functions `I0`, `I1`.
//! * [`numerics`]: grids, finite-difference stencils and quadrature on the real line.
//! * [`model`]: the Dunkl operator, the expanded governing equation, weight,
//!   probability density and modified norm.
//! * [`pointmap`]: the point transformation to and from standard Schrödinger form.
//! * [`darboux`]: standard and confluent Darboux transformations of arbitrary order
//!   (up to four) built on derivative-reduced Wronskians.
//! * [`scenarios`]: the worked constructions (Gaussian mass, energy-dependent
//!   oscillator and its position-dependent-mass twin) used by tests and the CLI.

// `!(a > b)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod darboux;
pub mod error;
pub mod model;
pub mod numerics;
pub mod pointmap;
pub mod scenarios;
pub mod specfun;

pub use error::{Error, Result};

use std::sync::Arc;

/// Shared, thread-safe real function of one variable.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Shared, thread-safe real function of two variables (energy or ε first).
pub type RealFn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
