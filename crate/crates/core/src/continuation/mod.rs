//! Natural-parameter continuation of wave branches in `c` and `K`, periodic
//! families, and the homotopy from the cubic comparison system.

mod acn;
mod homotopy;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use acn::{acn_damping, acn_exact, validate_acn, AcnCheck, AcnField, AcnKind};
pub use homotopy::{homotopy_trace, HomotopyField, HomotopyPoint, HomotopyTrace};

use crate::error::{Error, Result};
use crate::model::{ModelParams, OptimalVelocity, RegionClass, WaveContext};
use crate::output::{fmt_num, fmt_opt};
use crate::phase::Saddle;
use crate::roots::brent;
use crate::solve::{find_c_star, find_mu_b, find_mu_f, find_mu_per, find_mu_pul, PulseOutcome, ShootOptions, WaveKind};

pub const BRANCH_CSV_HEADER: &str = "kind,K,c,mu,u1,u0,u2,diameter,period,max_u";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    Back,
    Front,
    Pulse1,
    Pulse2,
    HopfLocus,
    PeriodicFamily,
}

impl BranchKind {
    pub fn label(self) -> &'static str {
        match self {
            BranchKind::Back => "back",
            BranchKind::Front => "front",
            BranchKind::Pulse1 => "pulse1",
            BranchKind::Pulse2 => "pulse2",
            BranchKind::HopfLocus => "hopf_locus",
            BranchKind::PeriodicFamily => "periodic_family",
        }
    }

    fn wave(self) -> Option<WaveKind> {
        Some(match self {
            BranchKind::Back => WaveKind::Back,
            BranchKind::Front => WaveKind::Front,
            BranchKind::Pulse1 => WaveKind::Pulse1,
            BranchKind::Pulse2 => WaveKind::Pulse2,
            _ => return None,
        })
    }
}

impl std::str::FromStr for BranchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "back" => BranchKind::Back,
            "front" => BranchKind::Front,
            "pulse1" => BranchKind::Pulse1,
            "pulse2" => BranchKind::Pulse2,
            "hopf_locus" | "hopf" => BranchKind::HopfLocus,
            "periodic_family" | "periodic" => BranchKind::PeriodicFamily,
            _ => return Err(Error::InvalidParameter(format!("unknown branch kind {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPoint {
    #[serde(rename = "K")]
    pub k: f64,
    pub c: f64,
    pub mu: f64,
    pub u1: Option<f64>,
    pub u0: f64,
    pub u2: f64,
    pub diameter: Option<f64>,
    pub period: Option<f64>,
    pub max_u: Option<f64>,
    /// Start headway of a periodic orbit.
    pub q: Option<f64>,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub kind: BranchKind,
    pub points: Vec<BranchPoint>,
    /// Grid values where no solution was found.
    pub gaps: Vec<f64>,
    /// Why the march stopped early, if it did.
    pub truncated: Option<String>,
}

impl Branch {
    fn new(kind: BranchKind) -> Self {
        Self {
            kind,
            points: Vec::new(),
            gaps: Vec::new(),
            truncated: None,
        }
    }

    /// Writes the points as CSV rows, without header.
    pub fn write_rows<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                self.kind.label(),
                fmt_num(p.k),
                fmt_num(p.c),
                fmt_num(p.mu),
                fmt_opt(p.u1),
                fmt_num(p.u0),
                fmt_num(p.u2),
                fmt_opt(p.diameter),
                fmt_opt(p.period),
                fmt_opt(p.max_u),
            )?;
        }
        Ok(())
    }

    pub fn mus(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mu).collect()
    }
}

/// Writes branches to one CSV with a shared header.
pub fn write_branches_csv<W: Write>(branches: &[Branch], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{BRANCH_CSV_HEADER}")?;
    for b in branches {
        b.write_rows(&mut out)?;
    }
    Ok(())
}

/// Admissible speed interval of a branch at flux `k`, with the cycle speed
/// when it was needed.
fn admissible<V: OptimalVelocity>(
    mp: &ModelParams<V>,
    k: f64,
    kind: BranchKind,
    opts: &ShootOptions,
) -> Result<(f64, f64, Option<f64>)> {
    let cs = mp.critical_speeds(k)?;
    let c_peak = cs.c_peak.ok_or(Error::RegionMismatch {
        k,
        c: f64::NAN,
        region: RegionClass::Outside,
        expected: "D1",
    })?;
    Ok(match kind {
        BranchKind::Pulse1 | BranchKind::Pulse2 => {
            let cyc = find_c_star(mp, k, opts)?;
            if kind == BranchKind::Pulse1 {
                (cyc.c_star, c_peak, Some(cyc.c_star))
            } else {
                (cs.c_lower, cyc.c_star, Some(cyc.c_star))
            }
        }
        _ => (cs.c_lower, c_peak, None),
    })
}

fn summary<V: OptimalVelocity>(ctx: &WaveContext<V>, mu: f64) -> Result<BranchPoint> {
    let z = ctx.require_zeros("D1 or D2")?;
    Ok(BranchPoint {
        k: ctx.k,
        c: ctx.c,
        mu,
        u1: z.u1,
        u0: z.u0,
        u2: z.u2,
        diameter: None,
        period: None,
        max_u: None,
        q: None,
        residual: None,
    })
}

/// Solves one connection at `ctx`, returning the summary point.
fn solve_point<V: OptimalVelocity>(ctx: &WaveContext<V>, kind: WaveKind, opts: &ShootOptions) -> Result<BranchPoint> {
    let r = match kind {
        WaveKind::Back => find_mu_b(ctx, opts)?,
        WaveKind::Front => find_mu_f(ctx, opts)?,
        WaveKind::Pulse1 | WaveKind::Pulse2 => {
            let saddle = if kind == WaveKind::Pulse1 {
                Saddle::Lower
            } else {
                Saddle::Upper
            };
            match find_mu_pul(ctx, saddle, opts)? {
                PulseOutcome::Pulse(r) => r,
                PulseOutcome::Cycle { .. } => {
                    return Err(Error::Refused(format!("c = {} lies on the cycle speed", ctx.c)))
                }
            }
        }
        WaveKind::Periodic => return Err(Error::InvalidParameter("use periodic_family".into())),
    };
    let (_, hi) = r.u_range();
    Ok(BranchPoint {
        diameter: Some(r.diameter()),
        max_u: Some(hi),
        residual: Some(r.residual),
        ..summary(ctx, r.mu)?
    })
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn warm_from(points: &[BranchPoint], opts: &ShootOptions) -> ShootOptions {
    match points {
        [.., a, b] => opts.warm(b.mu, (2.0 * (b.mu - a.mu).abs()).max(1e-4)),
        [b] => opts.warm(b.mu, 1e-3),
        [] => *opts,
    }
}

/// Hopf locus `mu = -f'(u0)` over `c`, with the linear period `2 pi / omega0`.
pub fn hopf_locus<V: OptimalVelocity>(
    mp: &ModelParams<V>,
    k: f64,
    c_range: (f64, f64),
    n_steps: usize,
) -> Result<Branch> {
    let mut b = Branch::new(BranchKind::HopfLocus);
    for c in grid(c_range.0, c_range.1, n_steps) {
        let ctx = match WaveContext::new(mp, k, c, 0.0) {
            Ok(ctx) if ctx.zeros.is_some() => ctx,
            _ => {
                b.gaps.push(c);
                continue;
            }
        };
        let mu = ctx.hopf_mu()?;
        let omega = ctx.hopf_frequency()?;
        b.points.push(BranchPoint {
            period: omega.is_finite().then(|| 2.0 * std::f64::consts::PI / omega),
            ..summary(&ctx, mu)?
        });
    }
    Ok(b)
}

/// Marches `c` over `c_range` clipped to the branch's admissible interval,
/// warm-starting each solve from its predecessors. A failing point ends the
/// branch with a diagnostic.
pub fn trace_in_c<V: OptimalVelocity>(
    mp: &ModelParams<V>,
    k: f64,
    kind: BranchKind,
    c_range: (f64, f64),
    n_steps: usize,
    opts: &ShootOptions,
) -> Result<Branch> {
    let (a, b, c_star) = admissible(mp, k, kind, opts)?;
    let margin = 1e-3 * (b - a);
    let lo = c_range.0.max(a + margin);
    let hi = c_range.1.min(b - margin);
    if !(lo < hi) {
        return Err(Error::OutOfRange {
            value: c_range.0,
            lo: a,
            hi: b,
        });
    }
    if kind == BranchKind::HopfLocus {
        return hopf_locus(mp, k, (lo, hi), n_steps);
    }
    let wave = kind
        .wave()
        .ok_or_else(|| Error::InvalidParameter("periodic families are traced over q".into()))?;
    let mut br = Branch::new(kind);
    // pulses are marched away from the cycle, where their orbits are largest
    let mut cs = grid(lo, hi, n_steps);
    if kind == BranchKind::Pulse2 {
        cs.reverse();
    }
    for c in cs {
        let mut ctx = WaveContext::new(mp, k, c, 0.0)?;
        if let Some(cs) = c_star {
            ctx = ctx.with_c_star(cs);
        }
        match solve_point(&ctx, wave, &warm_from(&br.points, opts)) {
            Ok(p) => br.points.push(p),
            Err(e) => {
                br.truncated = Some(format!("stopped at c = {c}: {e}"));
                break;
            }
        }
    }
    if kind == BranchKind::Pulse2 {
        br.points.reverse();
    }
    Ok(br)
}

/// For each `K`, the speed where the solved `mu` of `kind` equals
/// `2 tau K - 1`.
pub fn trace_in_k<V: OptimalVelocity>(
    mp: &ModelParams<V>,
    kind: BranchKind,
    k_range: (f64, f64),
    n_steps: usize,
    opts: &ShootOptions,
) -> Result<Branch> {
    let wave = kind
        .wave()
        .ok_or_else(|| Error::InvalidParameter(format!("{} has no (K, c) branch", kind.label())))?;
    let mut br = Branch::new(kind);
    for k in grid(k_range.0, k_range.1, n_steps) {
        match root_in_c(mp, k, kind, wave, opts) {
            Ok(p) => br.points.push(p),
            Err(_) => br.gaps.push(k),
        }
    }
    Ok(br)
}

fn root_in_c<V: OptimalVelocity>(
    mp: &ModelParams<V>,
    k: f64,
    kind: BranchKind,
    wave: WaveKind,
    opts: &ShootOptions,
) -> Result<BranchPoint> {
    let (a, b, c_star) = admissible(mp, k, kind, opts)?;
    let target = mp.mu_of_flux(k);
    let warm = opts.warm(target, 1e-3);
    let at = |c: f64| -> Result<BranchPoint> {
        let mut ctx = WaveContext::new(mp, k, c, 0.0)?;
        if let Some(cs) = c_star {
            ctx = ctx.with_c_star(cs);
        }
        solve_point(&ctx, wave, &warm)
    };
    let margin = 1e-4 * (b - a);
    let (lo, hi) = (a + margin, b - margin);
    let (flo, fhi) = (at(lo)?.mu - target, at(hi)?.mu - target);
    if flo * fhi > 0.0 {
        return Err(Error::NotBracketed { lo, hi, flo, fhi });
    }
    let mut failure = None;
    let c = brent(
        |c| match at(c) {
            Ok(p) => p.mu - target,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        1e-12,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    at(c?)
}

/// Start headways from next to `u0` toward the saddle the family ends on,
/// spaced geometrically at both ends.
pub fn family_grid<V: OptimalVelocity>(ctx: &WaveContext<V>, n: usize) -> Result<Vec<f64>> {
    let z = ctx.require_zeros("D1 or D2")?;
    let end = match ctx.region {
        RegionClass::D1Above | RegionClass::D1Cycle => {
            z.u1.ok_or_else(|| Error::InvalidParameter("lower saddle absent".into()))?
        }
        RegionClass::D1Below | RegionClass::D2 | RegionClass::D1Unsplit => z.u2,
        RegionClass::Outside => unreachable!("zeros exist"),
    };
    let half = (n / 2).max(2);
    let log = |t: f64| 10f64.powf(-4.0 + t * (0.5f64.log10() + 4.0));
    let mut fr: Vec<f64> = (0..half).map(|i| log(i as f64 / (half - 1) as f64)).collect();
    let tail: Vec<f64> = fr.iter().rev().skip(1).map(|f| 1.0 - f).collect();
    fr.extend(tail);
    Ok(fr.into_iter().map(|f| z.u0 + f * (end - z.u0)).collect())
}

/// Periodic orbits through `(q, 0)` for each `q` of the grid, in order.
pub fn periodic_family<V: OptimalVelocity>(
    mp: &ModelParams<V>,
    k: f64,
    c: f64,
    c_star: Option<f64>,
    q_grid: &[f64],
    opts: &ShootOptions,
) -> Result<Branch> {
    let mut ctx = WaveContext::new(mp, k, c, 0.0)?;
    if let Some(cs) = c_star {
        ctx = ctx.with_c_star(cs);
    }
    let mut br = Branch::new(BranchKind::PeriodicFamily);
    for &q in q_grid {
        let o = match br.points.last() {
            Some(p) => opts.warm(p.mu, 1e-3),
            None => *opts,
        };
        match find_mu_per(&ctx, q, &o) {
            Ok(r) => {
                let (lo, hi) = r.u_range();
                br.points.push(BranchPoint {
                    diameter: Some(hi - lo),
                    period: Some(r.period),
                    max_u: Some(hi),
                    q: Some(q),
                    residual: Some(r.residual),
                    ..summary(&ctx, r.mu_per)?
                });
            }
            Err(e @ Error::InvalidParameter(_)) => return Err(e),
            Err(e) => {
                br.truncated = Some(format!("stopped at q = {q}: {e}"));
                break;
            }
        }
    }
    Ok(br)
}
