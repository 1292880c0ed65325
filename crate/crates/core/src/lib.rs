//! Numerical Aubry–Mather theory for mechanical Lagrangians on tori.
//!
//! The crate builds channel Lagrangians, evaluates Mather's α and β functions
//! by minimizing the action over closed loops, and analyses the resulting
//! fields for flats and corners.

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod engine;
pub mod error;
pub mod field;
pub mod model;
pub mod oracle;
pub mod quadrature;

pub use channel::{build_channel_model, ChannelModelSpec};
pub use error::{Error, Result};
pub use model::{CohomologyClass, MechanicalLagrangian};
