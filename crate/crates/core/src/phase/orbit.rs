use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::field::Anchor;
use crate::ode::Trajectory;

/// Stop condition of a shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Terminal {
    /// `w` returned to zero.
    Axis,
    /// Crossed the opposite equilibrium.
    Boundary,
    /// Reached the positivity guard.
    Floor,
    /// `|w|` exceeded its cap.
    Escape,
    Horizon,
    MaxSteps,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub z: f64,
    pub u: f64,
    pub w: f64,
}

/// An integrated trajectory in `(u, w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub anchor: Anchor,
    /// Trajectory of `(u - anchor.base, w)`.
    pub trajectory: Trajectory,
    pub terminal: Terminal,
}

impl Orbit {
    pub fn u_of(&self, s: f64) -> f64 {
        self.anchor.base + s
    }

    pub fn start(&self) -> Sample {
        let y = self.trajectory.y0;
        Sample {
            z: self.trajectory.z0,
            u: self.u_of(y[0]),
            w: y[1],
        }
    }

    pub fn end(&self) -> Sample {
        let y = self.trajectory.y_end;
        Sample {
            z: self.trajectory.z_end,
            u: self.u_of(y[0]),
            w: y[1],
        }
    }

    pub fn state(&self, z: f64) -> Option<Sample> {
        self.trajectory.eval(z).map(|y| Sample {
            z,
            u: self.u_of(y[0]),
            w: y[1],
        })
    }

    /// First `z` where `u` crosses `target`, refined on the dense output.
    pub fn crossing(&self, target: f64) -> Option<Sample> {
        let st = target - self.anchor.base;
        let y0 = self.trajectory.y0;
        if y0[0] == st {
            return Some(self.start());
        }
        for seg in &self.trajectory.segments {
            let a = seg.start()[0] - st;
            let b = seg.end()[0] - st;
            if a == 0.0 {
                return self.state(seg.z0);
            }
            if a.signum() != b.signum() || b == 0.0 {
                let th = crate::roots::brent(|t| seg.eval_theta(t)[0] - st, 0.0, seg.theta_end, 1e-15).ok()?;
                let y = seg.eval_theta(th);
                return Some(Sample {
                    z: seg.z0 + th * seg.h,
                    u: target,
                    w: y[1],
                });
            }
        }
        None
    }

    /// Smallest and largest `u` visited (at step boundaries and ends).
    pub fn u_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut visit = |s: f64| {
            let u = self.u_of(s);
            lo = lo.min(u);
            hi = hi.max(u);
        };
        visit(self.trajectory.y0[0]);
        for seg in &self.trajectory.segments {
            visit(seg.end()[0]);
        }
        (lo, hi)
    }

    /// Dense samples with spacing at most `spacing` in coordinates scaled by
    /// the orbit's own extent in `u` and `w`.
    pub fn samples(&self, spacing: f64) -> Vec<Sample> {
        let segs = &self.trajectory.segments;
        let mut ext = [(f64::INFINITY, f64::NEG_INFINITY); 2];
        let mut track = |y: [f64; 2]| {
            for i in 0..2 {
                ext[i].0 = ext[i].0.min(y[i]);
                ext[i].1 = ext[i].1.max(y[i]);
            }
        };
        track(self.trajectory.y0);
        for s in segs {
            track(s.end());
        }
        let scale = [
            (ext[0].1 - ext[0].0).max(f64::MIN_POSITIVE),
            (ext[1].1 - ext[1].0).max(f64::MIN_POSITIVE),
        ];
        let mut out = vec![self.start()];
        for seg in segs {
            let a = seg.start();
            let b = seg.end();
            let chord = (((b[0] - a[0]) / scale[0]).powi(2) + ((b[1] - a[1]) / scale[1]).powi(2)).sqrt();
            let n = ((chord / spacing).ceil() as usize).clamp(1, 10_000);
            for j in 1..=n {
                let th = seg.theta_end * j as f64 / n as f64;
                let y = seg.eval_theta(th);
                out.push(Sample {
                    z: seg.z0 + th * seg.h,
                    u: self.u_of(y[0]),
                    w: y[1],
                });
            }
        }
        out
    }
}

/// Writes `z,u,w` rows with 17 significant digits.
pub fn write_orbit_csv<W: Write>(mut out: W, samples: &[Sample]) -> io::Result<()> {
    writeln!(out, "z,u,w")?;
    for s in samples {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", s.z, s.u, s.w)?;
    }
    Ok(())
}
