//! Closed-form attitude estimation from two vector observations.
//!
//! Quaternions are stored scalar-last as `[e; q]`. The estimate maps reference
//! vectors to body vectors through [`quat::rotate`], i.e. `bᵢ = A(q) rᵢ`.
//!
//! - [`quat`]: quaternion algebra.
//! - [`estimator`]: the estimator, case classification and singular-case formulas.
//! - [`seq_rot`]: half-turn frame detours for singular inputs.
//! - [`error_analysis`]: exact error identities, biases and covariances.

#![no_std]
#![forbid(unsafe_code)]

#[cfg(test)]
extern crate std;

mod math;

pub mod error;
pub mod error_analysis;
pub mod estimator;
pub mod linalg;
pub mod quat;
pub mod seq_rot;

pub use error::{Error, Result};
pub use estimator::{estimate, EstimateResult, EstimatorConfig, HemisphereConvention, SingularCase, VectorObservation};
pub use quat::{Quat4, UnitQuaternion};
pub use seq_rot::Axis;
