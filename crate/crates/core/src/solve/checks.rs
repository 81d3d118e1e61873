use serde::Serialize;

use crate::model::{OptimalVelocity, OutsideKind, RegionClass, WaveContext};
use crate::phase::{Orbit, PlanarField};

/// Integral of the forcing term around an orbit; zero for any bounded
/// solution that returns to its starting headway.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Balance {
    pub integral: f64,
    pub abs_integral: f64,
}

impl Balance {
    pub fn relative(&self) -> f64 {
        self.integral.abs() / self.abs_integral
    }
}

/// `int F(u(z)) dz` over the union of the given orbit pieces, each taken in
/// increasing `z`.
pub fn orbit_balance<F: PlanarField>(field: &F, parts: &[&Orbit]) -> Balance {
    let mut b = Balance {
        integral: 0.0,
        abs_integral: 0.0,
    };
    for o in parts {
        let dir = (o.trajectory.z_end - o.trajectory.z0).signum();
        let base = o.anchor.base;
        b.integral += dir * o.trajectory.quadrature(|_, y| field.forcing(base + y[0]));
        b.abs_integral += dir * o.trajectory.quadrature(|_, y| field.forcing(base + y[0]).abs());
    }
    b
}

/// `(inf f', sup f')` over `[lo, hi]`, sampled at 2001 points.
pub fn slope_bounds<F: PlanarField>(field: &F, lo: f64, hi: f64) -> (f64, f64) {
    let n = 2000;
    (0..=n)
        .map(|i| field.df(lo + (hi - lo) * i as f64 / n as f64))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonexistenceReport {
    pub region: RegionClass,
    pub outside_kind: Option<OutsideKind>,
    pub samples: usize,
    /// The sampled sign pattern of `f` agrees with `outside_kind`.
    pub confirmed: bool,
    pub message: String,
}

/// Samples the sign of `f` on `u > 0` and confirms that no bounded
/// nonconstant wave can exist outside the two existence regions.
pub fn verify_nonexistence<V: OptimalVelocity>(ctx: &WaveContext<V>) -> NonexistenceReport {
    let region = ctx.region;
    let kind = ctx.params.outside_kind(ctx.k, ctx.c);
    let n = 1000;
    let u_hi = 20.0 * ctx.params.ov.inflection();
    let us: Vec<f64> = (1..=n).map(|i| u_hi * i as f64 / n as f64).collect();
    let tol = 1e-14;
    let (confirmed, message) = match kind {
        None => (false, format!("(K, c) lies in {}; waves may exist", region.label())),
        Some(OutsideKind::Positive) => {
            let ok = us.iter().all(|&u| ctx.f(u) >= -tol);
            (ok, "f >= 0 on u > 0: the forcing integral cannot vanish".into())
        }
        Some(OutsideKind::SingleCrossing) => {
            let mut seen_pos = false;
            let mut ok = true;
            for &u in &us {
                let v = ctx.f(u);
                if v > tol {
                    seen_pos = true;
                } else if v < -tol && seen_pos {
                    ok = false;
                }
            }
            (
                ok,
                "f changes sign once, from negative to positive: no interior extremum balances".into(),
            )
        }
    };
    NonexistenceReport {
        region,
        outside_kind: kind,
        samples: n,
        confirmed,
        message,
    }
}
