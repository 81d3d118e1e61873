//! Scalar shooting solvers for heteroclinic, homoclinic and periodic waves.

mod checks;
mod hetero;
mod periodic;
mod pulse;

use serde::{Deserialize, Serialize};

pub use checks::{orbit_balance, slope_bounds, verify_nonexistence, Balance, NonexistenceReport};
pub use hetero::{back_gap, find_c_star, find_mu_b, find_mu_f, front_gap, CycleResult};
pub use periodic::{find_mu_per, find_mu_per_offset, find_periodic_with_period, periodic_gap, PeriodicResult, Rest};
pub use pulse::{find_mu_pul, pulse_gap, PulseOutcome};

use crate::error::{Error, Result};
use crate::phase::{HalfOrbit, Orbit, Sample};
use crate::roots::{bisect_sign, expand_bracket, Bisection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Back,
    Front,
    Pulse1,
    Pulse2,
    Periodic,
}

impl WaveKind {
    pub fn label(self) -> &'static str {
        match self {
            WaveKind::Back => "back",
            WaveKind::Front => "front",
            WaveKind::Pulse1 => "pulse1",
            WaveKind::Pulse2 => "pulse2",
            WaveKind::Periodic => "periodic",
        }
    }
}

impl std::str::FromStr for WaveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "back" => WaveKind::Back,
            "front" => WaveKind::Front,
            "pulse1" => WaveKind::Pulse1,
            "pulse2" => WaveKind::Pulse2,
            "periodic" => WaveKind::Periodic,
            _ => return Err(Error::InvalidParameter(format!("unknown wave kind {s:?}"))),
        })
    }
}

/// Controls of the scalar root searches in `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    /// Centre of the bracket expansion.
    pub warm_start: Option<f64>,
    /// First expansion step; steps double up to `max_doublings` times.
    pub step: f64,
    pub max_doublings: u32,
    /// Stop once the bracket is narrower than `width_rel * max(1, |mu|)`.
    pub width_rel: f64,
    /// Manifold offset relative to `u2 - u1`.
    pub eps_rel: f64,
    /// Relative tolerance of the shots.
    pub ode_rtol: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            warm_start: None,
            step: 1e-2,
            max_doublings: 40,
            width_rel: 1e-12,
            eps_rel: 1e-8,
            ode_rtol: crate::phase::SHOT_RTOL,
        }
    }
}

impl ShootOptions {
    pub fn warm(mut self, mu: f64, step: f64) -> Self {
        self.warm_start = Some(mu);
        self.step = step;
        self
    }
}

/// A solved heteroclinic or homoclinic orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct ShootResult {
    pub kind: WaveKind,
    pub mu: f64,
    /// Matching gap at the returned `mu`.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// The two half-orbits: forward-time part first.
    pub halves: [HalfOrbit; 2],
    pub orbit: Vec<Sample>,
}

impl ShootResult {
    pub fn u_range(&self) -> (f64, f64) {
        self.orbit
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s.u), hi.max(s.u))
            })
    }

    /// Largest distance between orbit samples.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.u_range();
        hi - lo
    }
}

pub(crate) fn solve_increasing<P>(mut positive: P, center: f64, opts: &ShootOptions, what: &str) -> Result<Bisection>
where
    P: FnMut(f64) -> Result<bool>,
{
    let (lo, hi) = expand_bracket(&mut positive, center, opts.step, opts.max_doublings)?
        .ok_or_else(|| Error::NoBracket(format!("{what}: expansion around mu = {center} exhausted")))?;
    bisect_within(positive, lo, hi, opts)
}

pub(crate) fn bisect_within<P>(positive: P, lo: f64, hi: f64, opts: &ShootOptions) -> Result<Bisection>
where
    P: FnMut(f64) -> Result<bool>,
{
    let w = opts.width_rel;
    bisect_sign(positive, lo, hi, |m| w * m.abs().max(1.0))
}

/// Joins a forward-time orbit with a backward-time orbit at the points
/// `z_fwd` and `z_bwd` where they meet, producing samples in increasing `z`.
pub(crate) fn join(fwd: &Orbit, z_fwd: f64, bwd: &Orbit, z_bwd: f64) -> Vec<Sample> {
    let mut out: Vec<Sample> = fwd.samples(1e-2).into_iter().filter(|s| s.z < z_fwd).collect();
    if let Some(s) = fwd.state(z_fwd) {
        out.push(s);
    }
    let shift = z_fwd - z_bwd;
    let mut tail: Vec<Sample> = bwd
        .samples(1e-2)
        .into_iter()
        .filter(|s| s.z > z_bwd)
        .map(|s| Sample { z: s.z + shift, ..s })
        .collect();
    tail.reverse();
    out.extend(tail);
    out
}
