//! Allen–Cahn–Nagumo comparison system `u'' = -m u' + u (u - a) (u - 1)`
//! with its closed-form heteroclinic and homoclinic solutions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{RegionClass, Zeros};
use crate::ode::{integrate, OdeOptions, State};
use crate::phase::{Anchor, PlanarField, Saddle};
use crate::solve::{find_mu_b, find_mu_f, find_mu_pul, PulseOutcome, ShootOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcnKind {
    /// Front from `u = 1` down to `u = 0`.
    Het,
    /// Pulse homoclinic to `u = 0`.
    Hom,
}

fn check_a(a: f64, kind: AcnKind) -> Result<()> {
    let hi = match kind {
        AcnKind::Het => 1.0,
        AcnKind::Hom => 0.5,
    };
    if a > 0.0 && a < hi {
        Ok(())
    } else {
        Err(Error::OutOfRange { value: a, lo: 0.0, hi })
    }
}

/// Damping coefficient `m` of the exact solution.
pub fn acn_damping(a: f64, kind: AcnKind) -> Result<f64> {
    check_a(a, kind)?;
    Ok(match kind {
        AcnKind::Het => std::f64::consts::SQRT_2 * (0.5 - a),
        AcnKind::Hom => 0.0,
    })
}

/// `(u, u')` of the exact solution at `z`.
pub fn acn_exact(a: f64, z: f64, kind: AcnKind) -> Result<(f64, f64)> {
    check_a(a, kind)?;
    Ok(match kind {
        AcnKind::Het => {
            let s = z / std::f64::consts::SQRT_2;
            // logistic written to stay finite for large |z|
            let u = if s > 0.0 {
                let e = (-s).exp();
                e / (1.0 + e)
            } else {
                1.0 / (1.0 + s.exp())
            };
            (u, -u * (1.0 - u) / std::f64::consts::SQRT_2)
        }
        AcnKind::Hom => {
            let r = a.sqrt();
            let amp = (2.0 * (2.0 - a) * (1.0 - 2.0 * a)).sqrt();
            let d = 2.0 * (1.0 + a) + amp * (r * z).cosh();
            let u = 6.0 * a / d;
            (u, -6.0 * a * amp * r * (r * z).sinh() / (d * d))
        }
    })
}

/// The comparison system as a planar field. Its parameter is the
/// anti-damping `mu = -m`, so that the orientation matches the traveling
/// wave system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcnField {
    pub a: f64,
    pub mu: f64,
}

impl AcnField {
    pub fn new(a: f64, mu: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("ACN parameters a = {a}, mu = {mu}")));
        }
        Ok(Self { a, mu })
    }

    fn cubic(&self, u: f64) -> f64 {
        u * (u - self.a) * (u - 1.0)
    }
}

impl PlanarField for AcnField {
    fn mu(&self) -> f64 {
        self.mu
    }

    fn with_mu(&self, mu: f64) -> Self {
        Self { mu, ..*self }
    }

    fn zeros(&self) -> Result<Zeros> {
        Ok(Zeros {
            u1: Some(0.0),
            u0: self.a,
            u2: 1.0,
        })
    }

    fn region(&self) -> RegionClass {
        if self.a < 0.5 {
            RegionClass::D1Above
        } else if self.a > 0.5 {
            RegionClass::D1Below
        } else {
            RegionClass::D1Cycle
        }
    }

    fn accel(&self, anchor: Anchor, s: f64, w: f64) -> f64 {
        let u = anchor.base + s;
        let f = if anchor.on_zero {
            // factor through the known root so small offsets stay exact
            let others = [0.0, self.a, 1.0]
                .into_iter()
                .filter(|&r| r != anchor.base)
                .fold(1.0, |p, r| p * (u - r));
            s * others
        } else {
            self.cubic(u)
        };
        f + self.mu * w
    }

    fn forcing(&self, u: f64) -> f64 {
        self.cubic(u)
    }

    fn df(&self, u: f64) -> f64 {
        3.0 * u * u - 2.0 * (1.0 + self.a) * u + self.a
    }

    fn linearization(&self, u_eq: f64) -> (f64, f64) {
        (self.mu, self.df(u_eq))
    }

    fn u_floor(&self) -> f64 {
        f64::NEG_INFINITY
    }

    fn condition_h(&self) -> bool {
        true
    }

    fn hopf_mu(&self) -> Result<f64> {
        Ok(0.0)
    }
}

/// Errors of the numerical solvers against the closed forms at one `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AcnCheck {
    pub a: f64,
    /// Exact back damping `sqrt(2) (1/2 - a)`, as the field parameter.
    pub mu_exact: f64,
    pub mu_back: f64,
    pub mu_front: f64,
    /// `None` when `a >= 1/2`, where no pulse to `u = 0` exists.
    pub mu_pulse: Option<f64>,
    /// Sup-norm distance between the integrated and the exact front on
    /// `[-10, 10]`.
    pub trajectory_error: f64,
}

impl AcnCheck {
    /// Largest of all deviations from the closed forms.
    pub fn max_error(&self) -> f64 {
        let mut e = (self.mu_back - self.mu_exact)
            .abs()
            .max((self.mu_front + self.mu_exact).abs())
            .max(self.trajectory_error);
        if let Some(m) = self.mu_pulse {
            e = e.max(m.abs());
        }
        e
    }
}

/// Solves back, front and pulse of the comparison system by shooting and
/// integrates the exact front from `z = -10` to `z = 10`.
pub fn validate_acn(a: f64, opts: &ShootOptions) -> Result<AcnCheck> {
    let m = acn_damping(a, AcnKind::Het)?;
    let field = AcnField::new(a, 0.0)?;
    let mu_back = find_mu_b(&field, &opts.warm(0.0, 1e-2))?.mu;
    let mu_front = find_mu_f(&field, &opts.warm(0.0, 1e-2))?.mu;
    let mu_pulse = if a < 0.5 {
        match find_mu_pul(&field, Saddle::Lower, &opts.warm(0.0, 1e-2))? {
            PulseOutcome::Pulse(r) => Some(r.mu),
            PulseOutcome::Cycle { .. } => None,
        }
    } else {
        None
    };
    let exact = field.with_mu(-m);
    let (u0, w0) = acn_exact(a, -10.0, AcnKind::Het)?;
    let tr = integrate(
        |_, y: &State| [y[1], exact.accel(Anchor::absolute(), y[0], y[1])],
        -10.0,
        [u0, w0],
        10.0,
        &[],
        &OdeOptions {
            rtol: 1e-12,
            atol: 1e-14,
            ..OdeOptions::default()
        },
    )?;
    let mut err: f64 = 0.0;
    for i in 0..=2000 {
        let z = -10.0 + 20.0 * i as f64 / 2000.0;
        let y = tr.eval(z).ok_or(Error::OutOfRange {
            value: z,
            lo: -10.0,
            hi: 10.0,
        })?;
        let (u, w) = acn_exact(a, z, AcnKind::Het)?;
        err = err.max((y[0] - u).abs()).max((y[1] - w).abs());
    }
    Ok(AcnCheck {
        a,
        mu_exact: m,
        mu_back,
        mu_front,
        mu_pulse,
        trajectory_error: err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_at_origin() {
        assert_eq!(acn_exact(0.3, 0.0, AcnKind::Het).unwrap().0, 0.5);
        assert_eq!(acn_damping(0.5, AcnKind::Het).unwrap(), 0.0);
        let (u, w) = acn_exact(0.25, 0.0, AcnKind::Hom).unwrap();
        let oracle = 1.5 / (2.5 + 1.75f64.sqrt());
        assert!((u - oracle).abs() < 1e-15);
        assert!((u - 0.39237).abs() < 1e-5);
        assert_eq!(w, 0.0);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(acn_exact(0.6, 0.0, AcnKind::Hom).is_err());
        assert!(acn_exact(1.0, 0.0, AcnKind::Het).is_err());
        assert!(acn_damping(0.0, AcnKind::Het).is_err());
    }

    #[test]
    fn exact_solutions_satisfy_the_equation() {
        for &(a, kind) in &[(0.2, AcnKind::Het), (0.7, AcnKind::Het), (0.3, AcnKind::Hom)] {
            let m = acn_damping(a, kind).unwrap();
            let field = AcnField::new(a, -m).unwrap();
            for i in -20..=20 {
                let z = 0.37 * i as f64;
                let h = 1e-4;
                let (u, w) = acn_exact(a, z, kind).unwrap();
                let wp = acn_exact(a, z + h, kind).unwrap().1;
                let wm = acn_exact(a, z - h, kind).unwrap().1;
                let lhs = (wp - wm) / (2.0 * h);
                let rhs = field.accel(Anchor::absolute(), u, w);
                assert!((lhs - rhs).abs() < 1e-8, "{kind:?} a={a} z={z}: {lhs} vs {rhs}");
            }
        }
    }
}
