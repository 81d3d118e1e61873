//! Optimal velocity functions.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An optimal velocity function `V(u)` of the headway `u`.
///
/// Implementors must be strictly increasing on `[0, inf)` with a derivative
/// that has a single interior maximum at [`OptimalVelocity::inflection`].
pub trait OptimalVelocity: Clone + Debug + PartialEq + Send + Sync {
    fn value(&self, u: f64) -> f64;
    fn slope(&self, u: f64) -> f64;
    fn curvature(&self, u: f64) -> f64;

    /// Headway where `V'` is maximal.
    fn inflection(&self) -> f64;

    /// `V(u + du) - V(u)`. Override when a cancellation-free form exists.
    fn increment(&self, u: f64, du: f64) -> f64 {
        self.value(u + du) - self.value(u)
    }

    fn validate(&self) -> Result<()> {
        Ok(())
    }
}

/// `V(u) = V0 * (tanh(beta * (u - u_c)) + M)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OvParams {
    #[serde(rename = "V0")]
    pub v0: f64,
    pub beta: f64,
    pub u_c: f64,
    #[serde(rename = "M")]
    pub m: f64,
}

impl Default for OvParams {
    fn default() -> Self {
        Self {
            v0: 0.0168,
            beta: 89.7,
            u_c: 0.025,
            m: 0.913,
        }
    }
}

fn sech2(x: f64) -> f64 {
    let ch = x.cosh();
    1.0 / (ch * ch)
}

impl OptimalVelocity for OvParams {
    fn value(&self, u: f64) -> f64 {
        self.v0 * ((self.beta * (u - self.u_c)).tanh() + self.m)
    }

    fn slope(&self, u: f64) -> f64 {
        self.v0 * self.beta * sech2(self.beta * (u - self.u_c))
    }

    fn curvature(&self, u: f64) -> f64 {
        let x = self.beta * (u - self.u_c);
        -2.0 * self.v0 * self.beta * self.beta * x.tanh() * sech2(x)
    }

    fn inflection(&self) -> f64 {
        self.u_c
    }

    fn increment(&self, u: f64, du: f64) -> f64 {
        let x = self.beta * (u - self.u_c);
        let ty = (self.beta * du).tanh();
        self.v0 * ty * sech2(x) / (1.0 + x.tanh() * ty)
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("V0", self.v0), ("beta", self.beta), ("u_c", self.u_c), ("M", self.m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.beta * self.u_c).is_finite() {
            return Err(Error::InvalidParameter("beta * u_c overflows".into()));
        }
        Ok(())
    }
}

/// Evaluates `V`, `V'` or `V''` at a non-negative headway.
pub fn ov_eval<V: OptimalVelocity>(ov: &V, u: f64, order: u8) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "headway must be non-negative, got {u}"
        )));
    }
    match order {
        0 => Ok(ov.value(u)),
        1 => Ok(ov.slope(u)),
        2 => Ok(ov.curvature(u)),
        _ => Err(Error::InvalidParameter(format!(
            "derivative order {order} not supported"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_peak_and_decay() {
        let ov = OvParams::default();
        assert!((ov.slope(ov.u_c) - 1.50696).abs() < 1e-12);
        assert_eq!(ov.curvature(ov.u_c), 0.0);
        assert!(ov.slope(10.0 * ov.u_c) < 1e-3 * ov.slope(ov.u_c));
    }

    #[test]
    fn increment_matches_difference() {
        let ov = OvParams::default();
        for &(u, du) in &[(0.01, 0.003), (0.03, -0.01), (0.02, 1e-3)] {
            let direct = ov.value(u + du) - ov.value(u);
            assert!((ov.increment(u, du) - direct).abs() < 1e-16);
        }
        // tiny increments keep full relative precision
        let du = 1e-22;
        let rel = (ov.increment(0.03, du) / (ov.slope(0.03) * du) - 1.0).abs();
        assert!(rel < 1e-12);
    }

    #[test]
    fn rejects_negative_headway_and_bad_params() {
        let ov = OvParams::default();
        assert!(ov_eval(&ov, -1.0, 0).is_err());
        assert!(ov_eval(&ov, 0.0, 3).is_err());
        let bad = OvParams { m: -0.5, ..ov };
        assert!(bad.validate().is_err());
        assert!(ov.validate().is_ok());
    }
}
