//! Permanents, determinants and zero-permanent censuses over finite fields.
//!
//! - [`gf`]: GF(p^k) arithmetic.
//! - [`matrix`]: permanent, determinant, rank and permanental compound.
//! - [`census`]: exhaustive parallel censuses and Monte Carlo estimates.
//! - [`formulas`]: exact count polynomials, bound recursions, thresholds.
//! - [`constructions`]: explicit permanent/determinant converters and the
//!   harness that checks them.

pub mod census;
pub mod constructions;
pub mod error;
pub mod formulas;
pub mod gf;
pub mod matrix;
pub mod report;

pub use error::{Error, Result};
pub use formulas::IntPoly;
pub use gf::{Fe, FieldCtx, FieldSpec};
pub use matrix::{FMatrix, PerAlgo};
