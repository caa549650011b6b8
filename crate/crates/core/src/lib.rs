//! Simulator for the classical and quantum LOCAL models with the triangle
//! graph-state construction, its validity oracles and classical lower-bound
//! checks.

pub mod analytics;
pub mod error;
pub mod experiments;
pub mod net;
pub mod quantum;

pub use error::{Error, Result};
pub mod protocols;
pub mod verify;
