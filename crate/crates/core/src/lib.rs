//! Rational points of bounded height on the split D4 cubic surface
//! `x0 (x1 + x2 + x3)^2 = x1 x2 x3`.
//!
//! The crate counts points directly and through the universal torsor, and
//! computes the pieces of the predicted leading constant.

pub mod arith;
pub mod calibration;
pub mod congruence;
pub mod density;
pub mod error;
pub mod torsor;
pub mod verify;

pub use error::{Error, Result};
