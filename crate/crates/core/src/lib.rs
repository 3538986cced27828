//! Adaptive model predictive control for a nonholonomic knife-edge robot.
//!
//! - [`model`]: dynamics, parameter transforms and diagnostics
//! - [`estimator`]: recursive least squares on the velocity channels
//! - [`cftoc`]: single-shooting finite-horizon optimal control
//! - [`controller`]: the closed loop tying the three together
//! - [`harness`]: config files, CSV traces, figures and batch runs

pub mod cftoc;
pub mod controller;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod model;

pub use error::{Error, Result};
