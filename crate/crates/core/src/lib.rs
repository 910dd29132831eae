//! Design and validation of fixed-gain augmented-state tracking filters.
//!
//! A tracking filter is specified by a [`ModelSpec`]: an integrating target
//! model, an optional constant-rate turn oscillator, and an optional
//! Nyquist-frequency interference model. [`design::place_poles`] computes
//! the observer gain that puts every observer pole at the requested radius,
//! [`design::extract_transfer_function`] reduces the observer to direct-form
//! coefficients, [`analysis`] predicts steady-state performance, and
//! [`simulate`] checks those predictions against Monte-Carlo runs.

pub mod analysis;
pub mod design;
pub mod error;
pub mod io;
pub mod linalg;
pub mod models;
pub mod poly;
mod precise;
pub mod simulate;
pub mod validate;

pub use design::{ObserverRealization, TransferFunction};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use models::{DiscreteSystem, ModelSpec, OutputRow};
pub use poly::Polynomial;
