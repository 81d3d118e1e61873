use std::io::Write;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, OptimalVelocity};
use crate::output::fmt_num;

pub const PDE_CSV_HEADER: &str = "t,x,rho,v";

/// Initial density and velocity on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PdeInitial {
    /// `rho = rho_mean (1 + amplitude cos(2 pi mode x / L))`, `v = V(1/rho_mean)`.
    Cosine {
        rho_mean: f64,
        amplitude: f64,
        mode: u32,
    },
    Profile {
        rho: Vec<f64>,
        v: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeConfig {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub k_trunc: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Time between stored snapshots.
    pub snapshot_every: f64,
    pub initial: PdeInitial,
}

impl PdeConfig {
    /// Ring of length 2.33 holding 77 vehicles, perturbed in its first mode.
    pub fn ring_default() -> Self {
        Self {
            length: 2.33,
            n: 256,
            k_trunc: 100,
            dt: 1e-3,
            t_end: 880.0,
            snapshot_every: 1.0,
            initial: PdeInitial::Cosine {
                rho_mean: 77.0 / 2.33,
                amplitude: 1e-2,
                mode: 1,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.length > 0.0 && self.length.is_finite()) {
            return bad(format!("domain length must be positive, got {}", self.length));
        }
        if self.n < 2 * self.k_trunc + 2 {
            return bad(format!(
                "N = {} must be at least 2 k_trunc + 2 = {}",
                self.n,
                2 * self.k_trunc + 2
            ));
        }
        if !(self.dt > 0.0) || !(self.t_end >= 0.0) || !(self.snapshot_every > 0.0) {
            return bad("dt and snapshot_every must be positive and t_end nonnegative".into());
        }
        if let PdeInitial::Profile { rho, v } = &self.initial {
            if rho.len() != self.n || v.len() != self.n {
                return bad(format!("profile needs {} samples", self.n));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.length * i as f64 / self.n as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSnapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
}

impl FieldSnapshot {
    /// Trapezoid quadrature of the density over the periodic grid.
    pub fn mass(&self) -> f64 {
        let dx = self.x.get(1).map_or(0.0, |x1| x1 - self.x[0]);
        self.rho.iter().sum::<f64>() * dx
    }
}

/// Snapshots up to the end time or the first failure.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeRun {
    pub snapshots: Vec<FieldSnapshot>,
    pub failure: Option<Error>,
}

struct Spectral {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Wavenumbers with the truncated modes set to zero.
    ik: Vec<Complex64>,
    keep: Vec<bool>,
    buf: Vec<Complex64>,
    hat: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Spectral {
    fn new(n: usize, length: f64, k_trunc: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        let keep: Vec<bool> = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j } else { n - j };
                m <= k_trunc && !(n % 2 == 0 && j == n / 2)
            })
            .collect();
        let ik = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                if keep[j] {
                    Complex64::new(0.0, 2.0 * std::f64::consts::PI * m / length)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Self {
            fwd,
            inv,
            ik,
            keep,
            buf: vec![Complex64::new(0.0, 0.0); n],
            hat: vec![Complex64::new(0.0, 0.0); n],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    fn transform(&mut self, f: &[f64]) {
        for (h, &x) in self.hat.iter_mut().zip(f) {
            *h = Complex64::new(x, 0.0);
        }
        self.fwd.process_with_scratch(&mut self.hat, &mut self.scratch);
    }

    /// Inverse transform of `hat * (ik)^order` over the kept modes.
    fn back(&mut self, order: u32, out: &mut [f64]) {
        let n = self.hat.len() as f64;
        for ((b, &h), (&ik, &keep)) in self.buf.iter_mut().zip(&self.hat).zip(self.ik.iter().zip(&self.keep)) {
            *b = if keep {
                h * ik.powu(order)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (o, b) in out.iter_mut().zip(&self.buf) {
            *o = b.re / n;
        }
    }
}

fn initial_fields<V: OptimalVelocity>(mp: &ModelParams<V>, cfg: &PdeConfig) -> (Vec<f64>, Vec<f64>) {
    match &cfg.initial {
        PdeInitial::Cosine {
            rho_mean,
            amplitude,
            mode,
        } => {
            let v0 = mp.ov.value(1.0 / rho_mean);
            let rho = cfg
                .grid()
                .iter()
                .map(|x| {
                    rho_mean * (1.0 + amplitude * (2.0 * std::f64::consts::PI * *mode as f64 * x / cfg.length).cos())
                })
                .collect();
            (rho, vec![v0; cfg.n])
        }
        PdeInitial::Profile { rho, v } => (rho.clone(), v.clone()),
    }
}

/// Fourier-spectral discretization in space with explicit Euler steps:
///
/// `rho_t = -(rho v)_x`,
/// `v_t = -v v_x - P(rho)_x / rho + kappa(rho) v_xx + (V(1/rho) - v) / tau`,
/// `P(rho) = -V(1/rho) / (2 tau)`.
///
/// Both right-hand sides are projected onto the kept modes.
pub fn pde_run<V: OptimalVelocity>(mp: &ModelParams<V>, cfg: &PdeConfig) -> Result<PdeRun> {
    cfg.validate()?;
    let n = cfg.n;
    let x = cfg.grid();
    let (mut rho, mut v) = initial_fields(mp, cfg);
    if let Some(bad) = rho.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "initial density must be positive, found {bad}"
        )));
    }
    let mut sp = Spectral::new(n, cfg.length, cfg.k_trunc);
    // project the initial data so the discrete system starts band-limited
    sp.transform(&rho);
    sp.back(0, &mut rho);
    sp.transform(&v);
    sp.back(0, &mut v);

    let steps = (cfg.t_end / cfg.dt).round() as u64;
    let every = ((cfg.snapshot_every / cfg.dt).round() as u64).max(1);
    let tau = mp.tau;
    let mut snaps = vec![FieldSnapshot {
        t: 0.0,
        x: x.clone(),
        rho: rho.clone(),
        v: v.clone(),
    }];
    let mut flux = vec![0.0; n];
    let mut flux_x = vec![0.0; n];
    let mut pres = vec![0.0; n];
    let mut pres_x = vec![0.0; n];
    let mut v_x = vec![0.0; n];
    let mut v_xx = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for step in 1..=steps {
        for i in 0..n {
            flux[i] = rho[i] * v[i];
            pres[i] = -mp.ov.value(1.0 / rho[i]) / (2.0 * tau);
        }
        sp.transform(&flux);
        sp.back(1, &mut flux_x);
        sp.transform(&pres);
        sp.back(1, &mut pres_x);
        sp.transform(&v);
        sp.back(1, &mut v_x);
        sp.back(2, &mut v_xx);
        for i in 0..n {
            let r = rho[i];
            rhs[i] = -v[i] * v_x[i] - pres_x[i] / r + mp.kappa(r) * v_xx[i] + (mp.ov.value(1.0 / r) - v[i]) / tau;
        }
        sp.transform(&rhs);
        sp.back(0, &mut rhs);
        for i in 0..n {
            rho[i] -= cfg.dt * flux_x[i];
            v[i] += cfg.dt * rhs[i];
        }
        let t = step as f64 * cfg.dt;
        if let Some(i) = (0..n).find(|&i| !(rho[i] > 0.0) || !v[i].is_finite() || !rho[i].is_finite()) {
            let failure = Error::Breakdown {
                t,
                reason: format!("rho = {}, v = {} at x = {}", rho[i], v[i], x[i]),
            };
            return Ok(PdeRun {
                snapshots: snaps,
                failure: Some(failure),
            });
        }
        if step % every == 0 || step == steps {
            snaps.push(FieldSnapshot {
                t,
                x: x.clone(),
                rho: rho.clone(),
                v: v.clone(),
            });
        }
    }
    Ok(PdeRun {
        snapshots: snaps,
        failure: None,
    })
}

pub fn write_pde_csv<W: Write>(snaps: &[FieldSnapshot], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{PDE_CSV_HEADER}")?;
    for s in snaps {
        for i in 0..s.x.len() {
            writeln!(
                out,
                "{},{},{},{}",
                fmt_num(s.t),
                fmt_num(s.x[i]),
                fmt_num(s.rho[i]),
                fmt_num(s.v[i])
            )?;
        }
    }
    Ok(())
}
