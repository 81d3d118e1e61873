//! JSON run configuration. Every field is optional; command-line flags
//! override the file.

use serde::{Deserialize, Serialize};
use travwave::model::{ModelConfig, ModelParams};
use travwave::simulate::{MicroConfig, PdeConfig};
use travwave::solve::ShootOptions;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Manifold offset relative to `u2 - u1`.
    pub eps_rel: f64,
    /// Relative width at which `mu` bisection stops.
    pub width_rel: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = ShootOptions::default();
        Self {
            eps_rel: d.eps_rel,
            width_rel: d.width_rel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    C,
    K,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BranchConfig {
    /// Continue in `c` at fixed `K`, or in `K` along `mu = 2 tau K - 1`.
    pub over: Sweep,
    /// Clipped to the admissible interval; `None` means all of it.
    pub c_range: Option<(f64, f64)>,
    /// `None` means from `K1` to `max V'`.
    #[serde(rename = "K_range")]
    pub k_range: Option<(f64, f64)>,
    /// Steps of a sweep in `c`.
    pub n_steps: usize,
    /// Steps of a sweep in `K`; each point there solves for its own speed.
    pub k_steps: usize,
}

impl Default for BranchConfig {
    fn default() -> Self {
        Self {
            over: Sweep::C,
            c_range: None,
            k_range: None,
            n_steps: 200,
            k_steps: 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeriodicConfig {
    /// Search for the start point with this period instead of using `q`.
    pub period: Option<f64>,
    pub period_tol: f64,
    /// Family size used when neither `q` nor `period` is given.
    pub family_size: usize,
}

impl Default for PeriodicConfig {
    fn default() -> Self {
        Self {
            period: None,
            period_tol: 5e-4,
            family_size: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    /// Density of the uniform state used for the dispersion curve.
    pub rho_star: f64,
    pub k_max: f64,
    pub n_k: usize,
    pub rho_range: (f64, f64),
    pub n_rho: usize,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            rho_star: 77.0 / 2.33,
            k_max: 60.0,
            n_k: 600,
            rho_range: (5.0, 120.0),
            n_rho: 231,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcnConfig {
    pub a: Vec<f64>,
    pub tolerance: f64,
}

impl Default for AcnConfig {
    fn default() -> Self {
        Self {
            a: vec![0.1, 0.25, 0.4],
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub solver: SolverConfig,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub c: Option<f64>,
    pub q: Option<f64>,
    pub kind: Option<String>,
    pub branch: BranchConfig,
    pub periodic: PeriodicConfig,
    pub stability: StabilityConfig,
    pub acn: AcnConfig,
    pub pde: PdeConfig,
    pub micro: MicroConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            solver: SolverConfig::default(),
            k: None,
            c: None,
            q: None,
            kind: None,
            branch: BranchConfig::default(),
            periodic: PeriodicConfig::default(),
            stability: StabilityConfig::default(),
            acn: AcnConfig::default(),
            pde: PdeConfig {
                snapshot_every: 10.0,
                ..PdeConfig::ring_default()
            },
            micro: MicroConfig {
                snapshot_every: 10.0,
                ..MicroConfig::ring_default()
            },
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        self.model.to_params().map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn shoot_options(&self) -> ShootOptions {
        ShootOptions {
            eps_rel: self.solver.eps_rel,
            width_rel: self.solver.width_rel,
            ..ShootOptions::default()
        }
    }

    pub fn require_k(&self) -> Result<f64, CliError> {
        self.k
            .ok_or_else(|| CliError::Config("missing flux constant: pass --K or set \"K\"".into()))
    }

    pub fn require_c(&self) -> Result<f64, CliError> {
        self.c
            .ok_or_else(|| CliError::Config("missing wave speed: pass --c or set \"c\"".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        assert_eq!(RunConfig::from_json("{}").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_config_errors() {
        assert!(matches!(RunConfig::from_json(r#"{"kk": 1}"#), Err(CliError::Config(_))));
    }

    #[test]
    fn partial_sections_merge_with_defaults() {
        let c = RunConfig::from_json(r#"{"K": 1.25, "model": {"tau": 0.4}, "branch": {"n_steps": 5}}"#).unwrap();
        assert_eq!(c.k, Some(1.25));
        assert_eq!(c.model.tau, 0.4);
        assert_eq!(c.model.beta, ModelConfig::default().beta);
        assert_eq!(c.branch.n_steps, 5);
    }
}
