use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Density dependence of the viscosity coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Viscosity {
    #[serde(alias = "Constant")]
    Constant { kappa0: f64 },
    #[serde(alias = "InverseDensity")]
    InverseDensity { kappa0: f64 },
    #[serde(alias = "LeeEtAl", alias = "lee")]
    LeeEtAl,
}

impl Default for Viscosity {
    fn default() -> Self {
        Viscosity::LeeEtAl
    }
}

impl Viscosity {
    /// `kappa(rho)`.
    pub fn kappa(&self, rho: f64, tau: f64) -> f64 {
        match *self {
            Viscosity::Constant { kappa0 } => kappa0,
            Viscosity::InverseDensity { kappa0 } => kappa0 / rho,
            Viscosity::LeeEtAl => 1.0 / (6.0 * tau * rho * rho),
        }
    }

    /// `1 / (tau * kappa(1/u))`, simplified per variant so that `tau` cancels
    /// exactly where it should.
    pub fn g1(&self, u: f64, tau: f64) -> f64 {
        match *self {
            Viscosity::Constant { kappa0 } => 1.0 / (tau * kappa0),
            Viscosity::InverseDensity { kappa0 } => 1.0 / (tau * kappa0 * u),
            Viscosity::LeeEtAl => 6.0 / (u * u),
        }
    }

    /// `u / (2 * tau * kappa(1/u))`.
    pub fn g2(&self, u: f64, tau: f64) -> f64 {
        match *self {
            Viscosity::Constant { kappa0 } => u / (2.0 * tau * kappa0),
            Viscosity::InverseDensity { kappa0 } => 1.0 / (2.0 * tau * kappa0),
            Viscosity::LeeEtAl => 3.0 / u,
        }
    }

    /// Whether `int^inf d rho / (rho^3 kappa(rho))` diverges.
    pub fn condition_h(&self) -> bool {
        matches!(self, Viscosity::LeeEtAl)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Viscosity::Constant { kappa0 } | Viscosity::InverseDensity { kappa0 } => {
                if kappa0.is_finite() && kappa0 > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "kappa0 must be positive, got {kappa0}"
                    )))
                }
            }
            Viscosity::LeeEtAl => Ok(()),
        }
    }
}
