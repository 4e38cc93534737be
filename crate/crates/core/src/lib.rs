//! Single-photon quantum fingerprinting.
//!
//! A photon split between Alice and Bob carries each party's input as phases
//! on its modes; after a beam splitter at the referee the photon can only
//! leave by the "not equal" port if the inputs differ. This crate provides:
//!
//! - [`modes`]: the exact single-photon state vector and interferometer.
//! - [`ecc`]: binary linear codes with brute-force distance checks.
//! - [`protocol`]: exact and sampled protocol runs, repetition counts, and the
//!   one-mode bit/trit phase protocols.
//! - [`classical`]: exhaustive search over classical simultaneous-message
//!   strategies and the communication-bound calculators.
//! - [`physical`]: pulse-train feasibility arithmetic and a noise model with
//!   photon statistics, loss and dark counts.
//!
//! The state-vector code is generic over [`Scalar`] (`f32` or `f64`);
//! [`ModeState64`] and [`ModeState32`] name the concrete types. Results of the
//! classical search are exact [`Rational`]s.

pub mod classical;
pub mod ecc;
pub mod error;
pub mod modes;
pub mod physical;
pub mod protocol;
pub mod report;
pub mod scalar;
pub mod seed;

pub use ecc::{BitString, Code, CodeKind};
pub use error::{Error, Result};
pub use modes::{Arm, ModeLabel, ModeState, Port, PortProbabilities, Stage};
pub use protocol::{ProtocolParams, RunResult, Verdict};
pub use scalar::Scalar;

/// Exact rational used for strategy error rates.
pub type Rational = num_rational::Ratio<i64>;

pub type ModeState64 = ModeState<f64>;
pub type ModeState32 = ModeState<f32>;
pub type PortProbabilities64 = PortProbabilities<f64>;
pub type PortProbabilities32 = PortProbabilities<f32>;
