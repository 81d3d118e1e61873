use crate::error::{Error, Result};
use crate::model::{planar_eigen, OptimalVelocity, RegionClass, WaveContext, Zeros};

/// Reference point for the integration state. The integrator evolves the
/// offset `s = u - base`, which keeps full precision near an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub base: f64,
    /// `f(base) = 0` may be assumed exactly.
    pub on_zero: bool,
}

impl Anchor {
    pub fn absolute() -> Self {
        Self {
            base: 0.0,
            on_zero: false,
        }
    }

    pub fn at_zero(base: f64) -> Self {
        Self { base, on_zero: true }
    }
}

/// A second-order system `u'' = F(u) + D(u, mu) u'` with three zeros of `F`
/// on the `u`-axis (the lowest possibly absent).
pub trait PlanarField: Clone + Send + Sync {
    fn mu(&self) -> f64;
    fn with_mu(&self, mu: f64) -> Self;
    fn zeros(&self) -> Result<Zeros>;
    fn region(&self) -> RegionClass;

    /// `u''` at `u = anchor.base + s`. Returns NaN where the field is undefined.
    fn accel(&self, anchor: Anchor, s: f64, w: f64) -> f64;

    /// The `w`-independent part `F(u)`.
    fn forcing(&self, u: f64) -> f64;

    /// Slope of the nonlinearity whose zeros are the equilibria.
    fn df(&self, u: f64) -> f64;

    /// `(trace, det)` so that eigenvalues solve `l^2 - trace l - det = 0`.
    fn linearization(&self, u_eq: f64) -> (f64, f64);

    /// Lowest admissible `u`.
    fn u_floor(&self) -> f64;

    fn condition_h(&self) -> bool;

    /// Saddle eigenvalues `(lambda_minus, lambda_plus)` at `u_eq`.
    fn saddle_eigen(&self, u_eq: f64) -> Result<(f64, f64)> {
        let (tr, det) = self.linearization(u_eq);
        let (lm, lp) = planar_eigen(tr, det);
        if lm.im != 0.0 || !(lm.re < 0.0 && lp.re > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "equilibrium u = {u_eq} is not a saddle (eigenvalues {lm}, {lp})"
            )));
        }
        Ok((lm.re, lp.re))
    }

    fn hopf_mu(&self) -> Result<f64> {
        Ok(-self.df(self.zeros()?.u0))
    }
}

impl<V: OptimalVelocity> PlanarField for WaveContext<V> {
    fn mu(&self) -> f64 {
        self.mu
    }

    fn with_mu(&self, mu: f64) -> Self {
        WaveContext::with_mu(self, mu)
    }

    fn zeros(&self) -> Result<Zeros> {
        self.require_zeros("D1 or D2")
    }

    fn region(&self) -> RegionClass {
        self.region
    }

    fn accel(&self, anchor: Anchor, s: f64, w: f64) -> f64 {
        let u = anchor.base + s;
        if !(u > 0.0) {
            return f64::NAN;
        }
        let f = if anchor.on_zero {
            self.f_from_zero(anchor.base, s)
        } else {
            self.f(u)
        };
        self.g1(u) * f + self.g2(u) * self.h(u) * w
    }

    fn forcing(&self, u: f64) -> f64 {
        self.g1(u) * self.f(u)
    }

    fn df(&self, u: f64) -> f64 {
        WaveContext::df(self, u)
    }

    fn linearization(&self, u_eq: f64) -> (f64, f64) {
        (
            self.g2(u_eq) * self.h(u_eq),
            self.g1(u_eq) * WaveContext::df(self, u_eq),
        )
    }

    fn u_floor(&self) -> f64 {
        match self.zeros.and_then(|z| z.u1) {
            Some(u1) => 1e-6 * u1,
            None => 1e-8,
        }
    }

    fn condition_h(&self) -> bool {
        self.params.condition_h()
    }
}
