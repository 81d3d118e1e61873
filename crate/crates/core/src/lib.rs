//! Traveling waves of a viscous optimal-velocity traffic model.
//!
//! The reduced phase-plane system is built in [`model`], integrated and shot
//! in [`phase`], solved for connecting and periodic orbits in [`solve`], and
//! traced across parameters in [`continuation`]. [`stability`] and
//! [`simulate`] cover the uniform-flow dispersion relation and direct
//! simulation of the macroscopic and car-following models.

pub mod continuation;
pub mod error;
pub mod model;
pub mod ode;
pub mod output;
pub mod phase;
pub mod roots;
pub mod simulate;
pub mod solve;
pub mod stability;

pub use error::{Error, Result};
