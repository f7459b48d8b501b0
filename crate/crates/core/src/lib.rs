//! Tikhonov-regularized splitting algorithms for monotone inclusions.

pub mod error;
pub mod fixed_point;
pub mod imaging;
pub mod operators;
pub mod primal_dual;
pub mod schedule;
pub mod splitting;
pub mod trace;
pub mod vector;

pub use error::{Error, Result};
pub use vector::{ProductVector, Vector};
