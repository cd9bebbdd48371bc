//! Numerical laboratory for weighted Bergman and Hardy spaces on the unit
//! disk: radial weights, hyperbolic geometry, power-series calculus, norms,
//! generalized Volterra and Toeplitz operators, and boundedness, compactness
//! and Schatten class tests.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod detect;
pub mod error;
pub mod geometry;
pub mod hardy;
pub mod norms;
pub mod operators;
pub mod quad;
pub mod series;
pub mod suite;
pub mod weights;

pub use error::{LabError, Result};
pub use weights::{DoublingProfile, DoublingVerdict, Weight, WeightKind};
