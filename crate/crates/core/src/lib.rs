//! Determinant approximation for well-conditioned Hermitian and Hurwitz-stable
//! matrices through low-depth arithmetic circuits.

pub mod abs_det;
pub mod cac;
pub mod circuit;
pub mod coeff_extract;
pub mod depth_reduce;
pub mod det_circuits;
pub mod log_transform;
pub mod error;
pub mod matrix;
pub mod pipeline;
pub mod precision;
pub mod scalar;

pub use error::{Error, Result};
