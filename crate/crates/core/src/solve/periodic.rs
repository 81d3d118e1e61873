use serde::{Deserialize, Serialize};

use super::{join, solve_increasing, ShootOptions};
use crate::error::{Error, Result};
use crate::model::RegionClass;
use crate::phase::{shoot_from_axis_tol, Anchor, Guards, Landing, Orbit, PlanarField, Saddle, Sample, Terminal};

/// Equilibrium used as the reference point of an initial headway.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rest {
    Lower,
    Middle,
    Upper,
}

/// A periodic orbit through `(q, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicResult {
    pub q: f64,
    /// Equilibrium `q` is measured from, and the offset `q - base`.
    pub base: f64,
    pub offset: f64,
    pub mu_per: f64,
    pub period: f64,
    /// `|u+ - u-|` at the far crossing.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub forward: Orbit,
    pub backward: Orbit,
    pub orbit: Vec<Sample>,
}

impl PeriodicResult {
    pub fn u_range(&self) -> (f64, f64) {
        self.orbit
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s.u), hi.max(s.u))
            })
    }
}

fn base_of<F: PlanarField>(field: &F, rest: Rest) -> Result<f64> {
    let z = field.zeros()?;
    Ok(match rest {
        Rest::Lower => {
            z.u1.ok_or_else(|| Error::InvalidParameter("lower saddle absent".into()))?
        }
        Rest::Middle => z.u0,
        Rest::Upper => z.u2,
    })
}

fn check_q<F: PlanarField>(field: &F, base: f64, offset: f64) -> Result<()> {
    let z = field.zeros()?;
    let inside = |lo: f64, hi: f64| {
        let (a, b) = (lo - base, hi - base);
        offset > a && offset < b
    };
    let q = base + offset;
    let left = inside(z.lower(), z.u0);
    let right = inside(z.u0, z.u2);
    let ok = match field.region() {
        RegionClass::D1Above | RegionClass::D1Cycle => left,
        RegionClass::D1Below | RegionClass::D2 => right,
        RegionClass::D1Unsplit => left || right,
        RegionClass::Outside => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "q = {q} is not an admissible start for region {} (zeros {z:?})",
            field.region().label()
        )))
    }
}

/// Signed distance between the far crossings of the forward and backward
/// shots from `(base + offset, 0)`, oriented to increase with `mu`.
pub fn periodic_gap<F: PlanarField>(
    field: &F,
    base: f64,
    offset: f64,
    mu: f64,
    rtol: f64,
) -> Result<(f64, (Orbit, Landing), (Orbit, Landing))> {
    let f = field.with_mu(mu);
    let lref = Guards::new(&f)?.lambda_ref;
    let anchor = Anchor::at_zero(base);
    let (of, lf, travel) = shoot_from_axis_tol(&f, anchor, offset, true, rtol)?;
    let (ob, lb, _) = shoot_from_axis_tol(&f, anchor, offset, false, rtol)?;
    let up = lf.extended(travel, lref);
    let um = lb.extended(travel, lref);
    let gap = travel * (up - um);
    let gap = if gap.is_nan() { travel * up } else { gap };
    Ok((gap, (of, lf), (ob, lb)))
}

/// Periodic orbit through `(base + offset, 0)` with `base` an equilibrium.
pub fn find_mu_per_offset<F: PlanarField>(
    field: &F,
    rest: Rest,
    offset: f64,
    opts: &ShootOptions,
) -> Result<PeriodicResult> {
    let base = base_of(field, rest)?;
    check_q(field, base, offset)?;
    if offset == 0.0 {
        return Err(Error::InvalidParameter("zero offset from an equilibrium".into()));
    }
    let center = match opts.warm_start {
        Some(m) => m,
        None => field.hopf_mu()?,
    };
    let opts = ShootOptions {
        width_rel: 0.0,
        ..*opts
    };
    let b = solve_increasing(
        |mu| Ok(periodic_gap(field, base, offset, mu, opts.ode_rtol)?.0 > 0.0),
        center,
        &opts,
        "periodic",
    )?;
    // Near a saddle connection the gap can jump between adjacent floats, so
    // the closing candidate is the bracket point with the smallest residual
    // among those whose shots both return to the axis.
    let mut best: Option<(f64, f64, (Orbit, Landing), (Orbit, Landing))> = None;
    let mut last_terminals = (Terminal::Axis, Terminal::Axis);
    for mu in [b.mid(), b.lo, b.hi] {
        let (gap, fwd, bwd) = periodic_gap(field, base, offset, mu, opts.ode_rtol)?;
        last_terminals = (fwd.1.terminal, bwd.1.terminal);
        if fwd.1.terminal != Terminal::Axis || bwd.1.terminal != Terminal::Axis {
            continue;
        }
        if best.as_ref().map_or(true, |bb| gap.abs() < bb.1) {
            best = Some((mu, gap.abs(), fwd, bwd));
        }
    }
    let Some((mu, residual, (fo, fl), (bo, bl))) = best else {
        return Err(Error::Refused(format!(
            "periodic shots did not return to the axis at mu = {} ({:?}, {:?})",
            b.mid(),
            last_terminals.0,
            last_terminals.1
        )));
    };
    let orbit = join(&fo, fl.z, &bo, bl.z);
    Ok(PeriodicResult {
        q: base + offset,
        base,
        offset,
        mu_per: mu,
        period: fl.z - bl.z,
        residual,
        bracket: (b.lo, b.hi),
        iterations: b.iterations,
        forward: fo,
        backward: bo,
        orbit,
    })
}

/// Periodic orbit through `(q, 0)`, measured from the nearest equilibrium.
pub fn find_mu_per<F: PlanarField>(field: &F, q: f64, opts: &ShootOptions) -> Result<PeriodicResult> {
    let z = field.zeros()?;
    let mut best = (Rest::Middle, z.u0);
    for (r, u) in [(Rest::Upper, Some(z.u2)), (Rest::Lower, z.u1)] {
        if let Some(u) = u {
            if (q - u).abs() < (q - best.1).abs() {
                best = (r, u);
            }
        }
    }
    find_mu_per_offset(field, best.0, q - best.1, opts)
}

/// Periodic orbit whose period is within `tol` of `period`, on the family
/// that ends at the homoclinic orbit of `saddle`. The start point approaches
/// the saddle geometrically until the period is bracketed, then the
/// logarithm of the offset is bisected. Close to a saddle connection the
/// period is only resolved to the float spacing of `mu`, so a short local
/// scan follows when bisection stalls.
pub fn find_periodic_with_period<F: PlanarField>(
    field: &F,
    saddle: Saddle,
    period: f64,
    tol: f64,
    opts: &ShootOptions,
) -> Result<PeriodicResult> {
    let z = field.zeros()?;
    let (rest, sign, width) = match saddle {
        Saddle::Lower => (
            Rest::Lower,
            1.0,
            z.u0 - z
                .u1
                .ok_or_else(|| Error::InvalidParameter("lower saddle absent".into()))?,
        ),
        Saddle::Upper => (Rest::Upper, -1.0, z.u2 - z.u0),
    };
    let mut warm: Option<f64> = opts.warm_start;
    let mut eval = |x: f64| -> Result<PeriodicResult> {
        let o = match warm {
            Some(m) => opts.warm(m, 1e-4),
            None => *opts,
        };
        let r = find_mu_per_offset(field, rest, sign * width * 10f64.powf(x), &o)?;
        warm = Some(r.mu_per);
        Ok(r)
    };
    // retries a few nearby offsets when one start fails to close
    let mut eval_near = |x: f64| -> Result<(f64, PeriodicResult)> {
        let mut err = None;
        for k in 0..6 {
            let xk = x - 1e-3 * k as f64;
            match eval(xk) {
                Ok(r) => return Ok((xk, r)),
                Err(e) => err = Some(e),
            }
        }
        Err(err.expect("at least one attempt"))
    };
    let close = |r: &PeriodicResult| (r.period - period).abs() <= tol;

    let (mut x_lo, first) = eval_near(-1.0)?;
    if close(&first) {
        return Ok(first);
    }
    if first.period > period {
        return Err(Error::NoBracket(format!(
            "period {} at the largest offset already exceeds {period}",
            first.period
        )));
    }
    let mut best = first;
    let mut x_hi = loop {
        let x = x_lo - 1.0;
        if x < -290.0 {
            return Err(Error::NoBracket(format!(
                "period {period} not reached before offset 1e-290"
            )));
        }
        let (x, r) = eval_near(x)?;
        let above = r.period >= period;
        if (r.period - period).abs() < (best.period - period).abs() {
            best = r;
        }
        if close(&best) {
            return Ok(best);
        }
        if above {
            break x;
        }
        x_lo = x;
    };
    while (x_lo - x_hi).abs() > 1e-3 {
        let (x, r) = eval_near(0.5 * (x_lo + x_hi))?;
        let above = r.period >= period;
        if (r.period - period).abs() < (best.period - period).abs() {
            best = r;
        }
        if close(&best) {
            return Ok(best);
        }
        if above {
            x_hi = x;
        } else {
            x_lo = x;
        }
    }
    let center = 0.5 * (x_lo + x_hi);
    for j in 1..=60 {
        for s in [1.0, -1.0] {
            if let Ok((_, r)) = eval_near(center + s * 2e-3 * j as f64) {
                if (r.period - period).abs() < (best.period - period).abs() {
                    best = r;
                }
                if close(&best) {
                    return Ok(best);
                }
            }
        }
    }
    Err(Error::Refused(format!(
        "closest period {} misses {period} by more than {tol}",
        best.period
    )))
}
