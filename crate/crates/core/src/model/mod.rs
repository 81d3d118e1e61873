//! Model parameters, coefficient functions and parameter regions.

mod ov;
mod params;
mod viscosity;
mod wave;

pub use ov::{ov_eval, OptimalVelocity, OvParams};
pub use params::{ModelConfig, ModelParams};
pub use viscosity::Viscosity;
pub use wave::{
    planar_eigen, CriticalConstants, CriticalSpeeds, EquilibriumEigen, OutsideKind, RegionClass, WaveContext, Zeros,
    C0_BAND, CYCLE_BAND,
};
