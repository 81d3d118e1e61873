//! Homotopy from a scaled cubic comparison system to the traveling wave
//! system, sharing the three equilibria.

use serde::Serialize;

use super::acn::{acn_damping, AcnKind};
use crate::error::{Error, Result};
use crate::model::{OptimalVelocity, RegionClass, WaveContext, Zeros};
use crate::phase::{Anchor, PlanarField, Saddle};
use crate::solve::{find_mu_b, find_mu_f, find_mu_pul, PulseOutcome, ShootOptions, WaveKind};

/// `u'' = (1 - phi) (A p(u) + B mu u') + phi (g1 f + g2 (f' + mu) u')`
/// with `p(u) = (u - u1)(u - u0)(u - u2)`.
///
/// `A` matches the mean saddle determinant of both parts and `B = g2(u0)`
/// matches the damping scale, so `mu` stays of the same order along the path.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyField<V: OptimalVelocity> {
    pub ctx: WaveContext<V>,
    pub phi: f64,
    pub cubic_scale: f64,
    pub damping_scale: f64,
    roots: [f64; 3],
}

impl<V: OptimalVelocity> HomotopyField<V> {
    pub fn new(ctx: &WaveContext<V>, phi: f64) -> Result<Self> {
        let (u1, u0, u2) = ctx.require_d1()?;
        if !(0.0..=1.0).contains(&phi) {
            return Err(Error::OutOfRange {
                value: phi,
                lo: 0.0,
                hi: 1.0,
            });
        }
        let roots = [u1, u0, u2];
        let dp1 = (u1 - u0) * (u1 - u2);
        let dp2 = (u2 - u1) * (u2 - u0);
        let det = ctx.g1(u1) * ctx.df(u1) + ctx.g1(u2) * ctx.df(u2);
        Ok(Self {
            ctx: ctx.clone(),
            phi,
            cubic_scale: det / (dp1 + dp2),
            damping_scale: ctx.g2(u0),
            roots,
        })
    }

    pub fn with_phi(&self, phi: f64) -> Self {
        Self { phi, ..self.clone() }
    }

    /// Relative position of the middle zero, `(u0 - u1) / (u2 - u1)`.
    pub fn shape(&self) -> f64 {
        let [u1, u0, u2] = self.roots;
        (u0 - u1) / (u2 - u1)
    }

    /// `mu` of the exact comparison solution at `phi = 0`.
    pub fn predicted_mu(&self, kind: WaveKind) -> Result<f64> {
        let [u1, _, u2] = self.roots;
        let a = self.shape();
        let unit = (u2 - u1) * self.cubic_scale.sqrt() / self.damping_scale;
        Ok(match kind {
            WaveKind::Back => unit * acn_damping(a, AcnKind::Het)?,
            WaveKind::Front => -unit * acn_damping(a, AcnKind::Het)?,
            WaveKind::Pulse1 => unit * acn_damping(a, AcnKind::Hom)?,
            WaveKind::Pulse2 => unit * acn_damping(1.0 - a, AcnKind::Hom)?,
            WaveKind::Periodic => return Err(Error::InvalidParameter("no closed form for periodic orbits".into())),
        })
    }

    fn cubic(&self, anchor: Anchor, s: f64) -> f64 {
        let u = anchor.base + s;
        self.roots.iter().fold(1.0, |p, &r| {
            if anchor.on_zero && r == anchor.base {
                p * s
            } else {
                p * (u - r)
            }
        })
    }

    fn cubic_slope(&self, u: f64) -> f64 {
        let [a, b, c] = self.roots;
        (u - b) * (u - c) + (u - a) * (u - c) + (u - a) * (u - b)
    }
}

impl<V: OptimalVelocity> PlanarField for HomotopyField<V> {
    fn mu(&self) -> f64 {
        self.ctx.mu
    }

    fn with_mu(&self, mu: f64) -> Self {
        Self {
            ctx: self.ctx.with_mu(mu),
            ..self.clone()
        }
    }

    fn zeros(&self) -> Result<Zeros> {
        self.ctx.zeros()
    }

    fn region(&self) -> RegionClass {
        if self.phi == 1.0 {
            self.ctx.region
        } else {
            RegionClass::D1Unsplit
        }
    }

    fn accel(&self, anchor: Anchor, s: f64, w: f64) -> f64 {
        let mu = self.ctx.mu;
        let left = self.cubic_scale * self.cubic(anchor, s) + self.damping_scale * mu * w;
        if self.phi == 0.0 {
            return left;
        }
        let right = self.ctx.accel(anchor, s, w);
        (1.0 - self.phi) * left + self.phi * right
    }

    fn forcing(&self, u: f64) -> f64 {
        let left = self.cubic_scale * self.cubic(Anchor::absolute(), u);
        (1.0 - self.phi) * left + self.phi * self.ctx.g1(u) * self.ctx.f(u)
    }

    fn df(&self, u: f64) -> f64 {
        (1.0 - self.phi) * self.cubic_scale * self.cubic_slope(u) + self.phi * self.ctx.g1(u) * self.ctx.df(u)
    }

    fn linearization(&self, u_eq: f64) -> (f64, f64) {
        let mu = self.ctx.mu;
        let trace = (1.0 - self.phi) * self.damping_scale * mu + self.phi * self.ctx.g2(u_eq) * self.ctx.h(u_eq);
        (trace, self.df(u_eq))
    }

    fn u_floor(&self) -> f64 {
        self.ctx.u_floor()
    }

    fn condition_h(&self) -> bool {
        self.ctx.condition_h()
    }

    fn hopf_mu(&self) -> Result<f64> {
        let u0 = self.roots[1];
        let g2 = self.ctx.g2(u0);
        Ok(-self.phi * g2 * self.ctx.df(u0) / ((1.0 - self.phi) * self.damping_scale + self.phi * g2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomotopyPoint {
    pub phi: f64,
    pub mu: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomotopyTrace {
    pub kind: WaveKind,
    /// Closed-form `mu` at `phi = 0`.
    pub predicted: f64,
    pub points: Vec<HomotopyPoint>,
}

impl HomotopyTrace {
    pub fn start(&self) -> &HomotopyPoint {
        &self.points[0]
    }

    pub fn end(&self) -> &HomotopyPoint {
        self.points.last().expect("trace has a start point")
    }
}

fn solve_at<V: OptimalVelocity>(field: &HomotopyField<V>, kind: WaveKind, opts: &ShootOptions) -> Result<(f64, f64)> {
    let r = match kind {
        WaveKind::Back => find_mu_b(field, opts)?,
        WaveKind::Front => find_mu_f(field, opts)?,
        WaveKind::Pulse1 | WaveKind::Pulse2 => {
            let saddle = if kind == WaveKind::Pulse1 {
                Saddle::Lower
            } else {
                Saddle::Upper
            };
            match find_mu_pul(field, saddle, opts)? {
                PulseOutcome::Pulse(r) => r,
                PulseOutcome::Cycle { .. } => {
                    return Err(Error::Refused(format!(
                        "phi = {}: pulse collapsed onto the cycle",
                        field.phi
                    )))
                }
            }
        }
        WaveKind::Periodic => return Err(Error::InvalidParameter("homotopy traces connections only".into())),
    };
    Ok((r.mu, r.residual))
}

/// Marches `phi` from 0 to 1 in `phi_steps` nominal steps, re-solving the
/// shooting problem warm-started from the previous point. A failed step is
/// halved down to `1e-4`.
pub fn homotopy_trace<V: OptimalVelocity>(
    ctx: &WaveContext<V>,
    kind: WaveKind,
    phi_steps: usize,
    opts: &ShootOptions,
) -> Result<HomotopyTrace> {
    let base = HomotopyField::new(ctx, 0.0)?;
    let predicted = base.predicted_mu(kind)?;
    let scale = predicted.abs().max(1e-3);
    let (mu0, res0) = solve_at(&base, kind, &opts.warm(predicted, 1e-3 * scale))?;
    let mut points = vec![HomotopyPoint {
        phi: 0.0,
        mu: mu0,
        residual: res0,
    }];
    let nominal = 1.0 / phi_steps.max(1) as f64;
    let mut step = nominal;
    let mut phi = 0.0;
    let mut slope_step = 1e-2 * scale;
    while phi < 1.0 {
        let next = (phi + step).min(1.0);
        let prev = *points.last().expect("nonempty");
        let o = opts.warm(prev.mu, slope_step.max(1e-9 * scale));
        match solve_at(&base.with_phi(next), kind, &o) {
            Ok((mu, residual)) => {
                slope_step = (mu - prev.mu).abs().max(1e-6 * scale);
                points.push(HomotopyPoint {
                    phi: next,
                    mu,
                    residual,
                });
                phi = next;
                step = (2.0 * step).min(nominal);
            }
            Err(e) => {
                step *= 0.5;
                if step < 1e-4 {
                    return Err(Error::Refused(format!("homotopy stalled at phi = {phi}: {e}")));
                }
            }
        }
    }
    Ok(HomotopyTrace {
        kind,
        predicted,
        points,
    })
}
