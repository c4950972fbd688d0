//! Locally differentially private estimation.
//!
//! The crate provides ε-locally private channels ([`mechanisms`]), the
//! estimators built on them ([`estimators`]), closed-form reference rates
//! ([`bounds`]), exact and Monte Carlo verification oracles ([`audit`]) and a
//! deterministic experiment harness ([`experiment`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod bounds;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod mechanisms;
pub mod numeric;
pub mod privacy;
pub mod random;

pub use error::{Error, Result};
pub use estimators::Geometry;
pub use mechanisms::{Channel, ChannelKind, LaplaceSensitivity, MomentAssumption};
pub use privacy::PrivacyLevel;
pub use random::Rng;
