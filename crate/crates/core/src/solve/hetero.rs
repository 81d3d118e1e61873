use serde::Serialize;

use super::{join, solve_increasing, ShootOptions, ShootResult, WaveKind};
use crate::error::{Error, Result};
use crate::model::{ModelParams, OptimalVelocity, WaveContext};
use crate::phase::{manifold_shoot_tol, w_at, Branch, HalfOrbit, PlanarField, Saddle, Terminal};
use crate::roots::brent;

/// `w` at `a`, or a signed infinity when the half-orbit stops short of `a`.
fn side_value(h: &HalfOrbit, a: f64) -> f64 {
    let sign = match h.branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    if h.reaches(a) {
        if let Ok(w) = w_at(h, a) {
            return w;
        }
    }
    if h.landing.terminal == Terminal::Escape {
        sign * f64::INFINITY
    } else {
        -sign * f64::INFINITY
    }
}

fn gap_of(w1: f64, w2: f64) -> f64 {
    if w1.is_infinite() {
        w1
    } else if w2.is_infinite() {
        -w2
    } else {
        w1 - w2
    }
}

pub(crate) fn matching_point<F: PlanarField>(field: &F) -> Result<f64> {
    let z = field.zeros()?;
    Ok(0.5 * (z.u0 + z.u2))
}

fn eps_of<F: PlanarField>(field: &F, opts: &ShootOptions) -> Result<f64> {
    let z = field.zeros()?;
    Ok(opts.eps_rel * (z.u2 - z.lower()))
}

/// `w1+(a) - w2+(a)` at the matching point, increasing in `mu`.
pub fn back_gap<F: PlanarField>(field: &F, mu: f64, eps: f64, rtol: f64) -> Result<(f64, HalfOrbit, HalfOrbit)> {
    let f = field.with_mu(mu);
    let a = matching_point(&f)?;
    let h1 = manifold_shoot_tol(&f, Saddle::Lower, Branch::Plus, eps, rtol)?;
    let h2 = manifold_shoot_tol(&f, Saddle::Upper, Branch::Plus, eps, rtol)?;
    Ok((gap_of(side_value(&h1, a), side_value(&h2, a)), h1, h2))
}

/// `w1-(a) - w2-(a)` at the matching point, increasing in `mu`.
pub fn front_gap<F: PlanarField>(field: &F, mu: f64, eps: f64, rtol: f64) -> Result<(f64, HalfOrbit, HalfOrbit)> {
    let f = field.with_mu(mu);
    let a = matching_point(&f)?;
    let h1 = manifold_shoot_tol(&f, Saddle::Lower, Branch::Minus, eps, rtol)?;
    let h2 = manifold_shoot_tol(&f, Saddle::Upper, Branch::Minus, eps, rtol)?;
    Ok((gap_of(side_value(&h1, a), side_value(&h2, a)), h1, h2))
}

type GapFn<F> = fn(&F, f64, f64, f64) -> Result<(f64, HalfOrbit, HalfOrbit)>;

fn solve_connection<F: PlanarField>(field: &F, kind: WaveKind, opts: &ShootOptions) -> Result<ShootResult> {
    let z = field.zeros()?;
    if z.u1.is_none() {
        return Err(Error::RegionMismatch {
            k: f64::NAN,
            c: f64::NAN,
            region: field.region(),
            expected: "D1",
        });
    }
    let gap: GapFn<F> = match kind {
        WaveKind::Back => back_gap::<F>,
        WaveKind::Front => front_gap::<F>,
        _ => unreachable!("connection solver handles back and front only"),
    };
    let eps = eps_of(field, opts)?;
    let b = solve_increasing(
        |mu| Ok(gap(field, mu, eps, opts.ode_rtol)?.0 >= 0.0),
        opts.warm_start.unwrap_or(0.0),
        opts,
        kind.label(),
    )?;
    let mu = b.mid();
    let (g, h1, h2) = gap(field, mu, eps, opts.ode_rtol)?;
    let a = matching_point(field)?;
    // forward-time half first: back = (1,+) then (2,+); front = (2,-) then (1,-)
    let (fwd, bwd) = match kind {
        WaveKind::Back => (h1, h2),
        _ => (h2, h1),
    };
    let (cf, cb) = match (fwd.orbit.crossing(a), bwd.orbit.crossing(a)) {
        (Some(cf), Some(cb)) => (cf, cb),
        _ => {
            return Err(Error::NoConvergence(b.iterations));
        }
    };
    let orbit = join(&fwd.orbit, cf.z, &bwd.orbit, cb.z);
    Ok(ShootResult {
        kind,
        mu,
        residual: g.abs(),
        bracket: (b.lo, b.hi),
        iterations: b.iterations,
        halves: [fwd, bwd],
        orbit,
    })
}

/// Traveling back: connection from the lower to the upper saddle.
pub fn find_mu_b<F: PlanarField>(field: &F, opts: &ShootOptions) -> Result<ShootResult> {
    solve_connection(field, WaveKind::Back, opts)
}

/// Traveling front: connection from the upper to the lower saddle.
pub fn find_mu_f<F: PlanarField>(field: &F, opts: &ShootOptions) -> Result<ShootResult> {
    solve_connection(field, WaveKind::Front, opts)
}

/// Speed where back and front coexist, forming a heteroclinic cycle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleResult {
    #[serde(rename = "K")]
    pub k: f64,
    pub c_star: f64,
    pub mu_star: f64,
    /// `mu_b - mu_f` at `c_star`.
    pub mismatch: f64,
    #[serde(skip)]
    pub back: ShootResult,
    #[serde(skip)]
    pub front: ShootResult,
}

/// Bisection in `c` for `mu_b(c) = mu_f(c)`.
pub fn find_c_star<V: OptimalVelocity>(mp: &ModelParams<V>, k: f64, opts: &ShootOptions) -> Result<CycleResult> {
    let cc = mp.critical_constants()?;
    let strong = k > cc.k1 && k < cc.k_max;
    let weak = mp.condition_h() && k > cc.k0 && k <= cc.k1;
    if !(strong || weak) {
        return Err(Error::Refused(format!(
            "K = {k} violates the existence condition: need K in ({}, {}), or K in ({}, {}] with a viscosity \
             satisfying the divergence condition",
            cc.k1, cc.k_max, cc.k0, cc.k1
        )));
    }
    let cs = mp.critical_speeds(k)?;
    let c_hi_lim = cs.c_peak.expect("peak exists above V'(0)");
    let width = c_hi_lim - cs.c_lower;
    let mut warm = (None::<f64>, None::<f64>);
    let mut psi = |c: f64| -> Result<f64> {
        let ctx = WaveContext::new(mp, k, c, 0.0)?;
        let ob = match warm.0 {
            Some(m) => opts.warm(m, 1e-3),
            None => *opts,
        };
        let of = match warm.1 {
            Some(m) => opts.warm(m, 1e-3),
            None => *opts,
        };
        let mb = find_mu_b(&ctx, &ob)?.mu;
        let mf = find_mu_f(&ctx, &of)?.mu;
        warm = (Some(mb), Some(mf));
        Ok(mb - mf)
    };
    let mut frac = 1e-4;
    let (lo, hi) = loop {
        let lo = cs.c_lower + frac * width;
        let hi = c_hi_lim - frac * width;
        let (pl, ph) = (psi(lo)?, psi(hi)?);
        if pl < 0.0 && ph > 0.0 {
            break (lo, hi);
        }
        frac *= 0.1;
        if frac < 1e-9 {
            return Err(Error::NoBracket(format!(
                "mu_b - mu_f keeps one sign on ({}, {})",
                cs.c_lower, c_hi_lim
            )));
        }
    };
    let mut failure = None;
    let c_star = brent(
        |c| match psi(c) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        1e-14,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let c_star = c_star?;
    let ctx = WaveContext::new(mp, k, c_star, 0.0)?;
    let back = find_mu_b(&ctx, opts)?;
    let front = find_mu_f(&ctx, &opts.warm(back.mu, 1e-3))?;
    Ok(CycleResult {
        k,
        c_star,
        mu_star: 0.5 * (back.mu + front.mu),
        mismatch: back.mu - front.mu,
        back,
        front,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn back_above_front_for_fast_waves() {
        let mp = ModelParams::default();
        let ctx = WaveContext::new(&mp, 1.25, 0.0163, 0.0).unwrap();
        let b = find_mu_b(&ctx, &ShootOptions::default()).unwrap();
        let f = find_mu_f(&ctx, &ShootOptions::default()).unwrap();
        assert!(b.mu > f.mu, "{} {}", b.mu, f.mu);
        let span = ctx.zeros.unwrap().u2 - ctx.zeros.unwrap().u1.unwrap();
        assert!(b.residual < 1e-9 * span, "residual {}", b.residual);
        assert!(b.bracket.1 - b.bracket.0 <= 1e-12 * b.mu.abs().max(1.0));
        assert!(b.orbit.iter().skip(1).all(|s| s.w > 0.0));
    }
}
