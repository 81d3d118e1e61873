use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, OptimalVelocity};
use crate::output::fmt_num;

pub const MICRO_CSV_HEADER: &str = "t,i,x,vdot";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MicroInitial {
    /// Equal headways `L/n`, each position shifted by
    /// `amplitude (L/n) sin(2 pi mode i / n)`, all at the equilibrium speed.
    Uniform {
        amplitude: f64,
        mode: u32,
    },
    Explicit {
        x: Vec<f64>,
        v: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicroConfig {
    pub n_vehicles: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: f64,
    /// Relaxation rate; `None` means `1 / tau`.
    #[serde(default)]
    pub sensitivity: Option<f64>,
    pub initial: MicroInitial,
}

impl MicroConfig {
    /// 77 vehicles on a ring of length 2.33, displaced in the first mode by
    /// a tenth of the mean headway.
    pub fn ring_default() -> Self {
        Self {
            n_vehicles: 77,
            length: 2.33,
            dt: 0.01,
            t_end: 880.0,
            snapshot_every: 1.0,
            sensitivity: None,
            initial: MicroInitial::Uniform {
                amplitude: 0.1,
                mode: 1,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_vehicles < 2 {
            return bad("need at least two vehicles".into());
        }
        if !(self.length > 0.0) || !(self.dt > 0.0) || !(self.t_end >= 0.0) || !(self.snapshot_every > 0.0) {
            return bad("length, dt and snapshot_every must be positive".into());
        }
        if let MicroInitial::Explicit { x, v } = &self.initial {
            if x.len() != self.n_vehicles || v.len() != self.n_vehicles {
                return bad(format!("explicit state needs {} vehicles", self.n_vehicles));
            }
            if x.windows(2).any(|p| !(p[1] > p[0])) || !(x[x.len() - 1] - x[0] < self.length) {
                return bad("positions must increase strictly within one lap".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParticleSnapshot {
    pub t: f64,
    /// Positions reduced to `[0, L)`.
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub headways: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MicroRun {
    pub snapshots: Vec<ParticleSnapshot>,
    pub failure: Option<Error>,
}

fn headways(x: &[f64], length: f64) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            if i + 1 < n {
                x[i + 1] - x[i]
            } else {
                x[0] + length - x[i]
            }
        })
        .collect()
}

fn snapshot(t: f64, x: &[f64], v: &[f64], length: f64) -> ParticleSnapshot {
    ParticleSnapshot {
        t,
        x: x.iter().map(|p| p.rem_euclid(length)).collect(),
        v: v.to_vec(),
        headways: headways(x, length),
    }
}

/// `x_i'' = a (V(x_{i+1} - x_i) - x_i')` on a ring, classical RK4.
pub fn micro_run<V: OptimalVelocity>(mp: &ModelParams<V>, cfg: &MicroConfig) -> Result<MicroRun> {
    cfg.validate()?;
    let n = cfg.n_vehicles;
    let len = cfg.length;
    let a = cfg.sensitivity.unwrap_or(1.0 / mp.tau);
    let (mut x, mut v) = match &cfg.initial {
        MicroInitial::Uniform { amplitude, mode } => {
            let h = len / n as f64;
            let x: Vec<f64> = (0..n)
                .map(|i| {
                    let phase = 2.0 * std::f64::consts::PI * *mode as f64 * i as f64 / n as f64;
                    h * (i as f64 + amplitude * phase.sin())
                })
                .collect();
            (x, vec![mp.ov.value(h); n])
        }
        MicroInitial::Explicit { x, v } => (x.clone(), v.clone()),
    };
    let accel = |x: &[f64], v: &[f64], out: &mut [f64]| {
        for i in 0..n {
            let gap = if i + 1 < n { x[i + 1] - x[i] } else { x[0] + len - x[i] };
            out[i] = a * (mp.ov.value(gap) - v[i]);
        }
    };
    let steps = (cfg.t_end / cfg.dt).round() as u64;
    let every = ((cfg.snapshot_every / cfg.dt).round() as u64).max(1);
    let dt = cfg.dt;
    let mut snaps = vec![snapshot(0.0, &x, &v, len)];
    let mut kx = vec![vec![0.0; n]; 4];
    let mut kv = vec![vec![0.0; n]; 4];
    let mut xs = vec![0.0; n];
    let mut vs = vec![0.0; n];
    for step in 1..=steps {
        for s in 0..4 {
            let w = [0.0, 0.5, 0.5, 1.0][s] * dt;
            if s == 0 {
                xs.copy_from_slice(&x);
                vs.copy_from_slice(&v);
            } else {
                for i in 0..n {
                    xs[i] = x[i] + w * kx[s - 1][i];
                    vs[i] = v[i] + w * kv[s - 1][i];
                }
            }
            kx[s].copy_from_slice(&vs);
            accel(&xs, &vs, &mut kv[s]);
        }
        for i in 0..n {
            x[i] += dt / 6.0 * (kx[0][i] + 2.0 * kx[1][i] + 2.0 * kx[2][i] + kx[3][i]);
            v[i] += dt / 6.0 * (kv[0][i] + 2.0 * kv[1][i] + 2.0 * kv[2][i] + kv[3][i]);
        }
        let t = step as f64 * dt;
        if let Some(i) = headways(&x, len).iter().position(|h| !(*h > 0.0)) {
            return Ok(MicroRun {
                snapshots: snaps,
                failure: Some(Error::Breakdown {
                    t,
                    reason: format!("vehicle {i} reached its leader"),
                }),
            });
        }
        if step % every == 0 || step == steps {
            snaps.push(snapshot(t, &x, &v, len));
        }
    }
    Ok(MicroRun {
        snapshots: snaps,
        failure: None,
    })
}

pub fn write_micro_csv<W: Write>(snaps: &[ParticleSnapshot], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{MICRO_CSV_HEADER}")?;
    for s in snaps {
        for i in 0..s.x.len() {
            writeln!(out, "{},{},{},{}", fmt_num(s.t), i, fmt_num(s.x[i]), fmt_num(s.v[i]))?;
        }
    }
    Ok(())
}
