//! Direct simulation of the macroscopic model and the car-following model on
//! a ring, with estimators for the wave speed and flux.

mod estimate;
mod micro;
mod pde;

pub use estimate::{count_pulses, estimate_k, estimate_wave_speed, free_flow_probe, trough_position, PULSE_CONTRAST};
pub use micro::{micro_run, write_micro_csv, MicroConfig, MicroInitial, MicroRun, ParticleSnapshot, MICRO_CSV_HEADER};
pub use pde::{pde_run, write_pde_csv, FieldSnapshot, PdeConfig, PdeInitial, PdeRun, PDE_CSV_HEADER};
