use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::ov::{OptimalVelocity, OvParams};
use super::viscosity::Viscosity;
use crate::error::{Error, Result};

/// Full parameter set of the macroscopic model.
#[derive(Debug, Clone)]
pub struct ModelParams<V: OptimalVelocity = OvParams> {
    pub ov: V,
    pub viscosity: Viscosity,
    pub tau: f64,
    pub(crate) k1_cache: OnceLock<Result<f64>>,
}

impl<V: OptimalVelocity> PartialEq for ModelParams<V> {
    fn eq(&self, other: &Self) -> bool {
        self.ov == other.ov && self.viscosity == other.viscosity && self.tau == other.tau
    }
}

impl Default for ModelParams<OvParams> {
    fn default() -> Self {
        ModelParams::new(OvParams::default(), Viscosity::LeeEtAl, 0.5).expect("default parameters are valid")
    }
}

impl<V: OptimalVelocity> ModelParams<V> {
    pub fn new(ov: V, viscosity: Viscosity, tau: f64) -> Result<Self> {
        ov.validate()?;
        viscosity.validate()?;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
        }
        Ok(Self {
            ov,
            viscosity,
            tau,
            k1_cache: OnceLock::new(),
        })
    }

    pub fn kappa(&self, rho: f64) -> f64 {
        self.viscosity.kappa(rho, self.tau)
    }

    pub fn g1(&self, u: f64) -> f64 {
        self.viscosity.g1(u, self.tau)
    }

    pub fn g2(&self, u: f64) -> f64 {
        self.viscosity.g2(u, self.tau)
    }

    pub fn condition_h(&self) -> bool {
        self.viscosity.condition_h()
    }

    /// `mu = 2 tau K - 1`, the value tied to the macroscopic model.
    pub fn mu_of_flux(&self, k: f64) -> f64 {
        2.0 * self.tau * k - 1.0
    }
}

/// JSON form of [`ModelParams`] with the tanh velocity function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(rename = "V0")]
    pub v0: f64,
    pub beta: f64,
    pub u_c: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub tau: f64,
    pub viscosity: Viscosity,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let ov = OvParams::default();
        Self {
            v0: ov.v0,
            beta: ov.beta,
            u_c: ov.u_c,
            m: ov.m,
            tau: 0.5,
            viscosity: Viscosity::LeeEtAl,
        }
    }
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    pub fn to_params(&self) -> Result<ModelParams> {
        ModelParams::new(
            OvParams {
                v0: self.v0,
                beta: self.beta,
                u_c: self.u_c,
                m: self.m,
            },
            self.viscosity,
            self.tau,
        )
    }
}

impl From<&ModelParams> for ModelConfig {
    fn from(p: &ModelParams) -> Self {
        Self {
            v0: p.ov.v0,
            beta: p.ov.beta,
            u_c: p.ov.u_c,
            m: p.ov.m,
            tau: p.tau,
            viscosity: p.viscosity,
        }
    }
}
