use thiserror::Error;

use crate::model::RegionClass;

/// Errors raised by the model layer and the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("headway must be positive (got {0})")]
    NonPositiveHeadway(f64),

    #[error("flux constant K={k} outside the admissible interval ({lo}, {hi})")]
    FluxOutOfRange { k: f64, lo: f64, hi: f64 },

    #[error("(K, c) = ({k}, {c}) lies in region {region:?}, expected {expected}")]
    RegionMismatch {
        k: f64,
        c: f64,
        region: RegionClass,
        expected: &'static str,
    },

    #[error("root not bracketed on [{lo}, {hi}] (f = {flo}, {fhi})")]
    NotBracketed { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("root search did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("u = {0} is not an equilibrium (f = {1})")]
    NotEquilibrium(f64, f64),

    #[error("integrator step size underflow at z = {0}")]
    StepUnderflow(f64),

    #[error("integrator exceeded {0} steps")]
    TooManySteps(usize),

    #[error("request refused: {0}")]
    Refused(String),

    #[error("no sign change found: {0}")]
    NoBracket(String),

    #[error("value {value} outside the traversed interval [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("simulation stopped at t = {t}: {reason}")]
    Breakdown { t: f64, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
