use super::hetero::{find_mu_b, find_mu_f};
use super::{bisect_within, join, solve_increasing, ShootOptions, ShootResult, WaveKind};
use crate::error::{Error, Result};
use crate::model::RegionClass;
use crate::phase::{manifold_shoot_tol, Branch, Guards, HalfOrbit, PlanarField, Saddle};

/// Result of a pulse request.
#[derive(Debug, Clone, PartialEq)]
pub enum PulseOutcome {
    Pulse(ShootResult),
    /// On the cycle speed no pulse exists; the cycle is returned instead.
    Cycle {
        back: ShootResult,
        front: ShootResult,
    },
}

/// Difference of the extended landing points of the two manifolds of one
/// saddle, increasing in `mu`. Returns `(gap, forward half, backward half)`.
pub fn pulse_gap<F: PlanarField>(
    field: &F,
    saddle: Saddle,
    mu: f64,
    eps: f64,
    rtol: f64,
) -> Result<(f64, HalfOrbit, HalfOrbit)> {
    let f = field.with_mu(mu);
    let lref = Guards::new(&f)?.lambda_ref;
    let plus = manifold_shoot_tol(&f, saddle, Branch::Plus, eps, rtol)?;
    let minus = manifold_shoot_tol(&f, saddle, Branch::Minus, eps, rtol)?;
    let gap = plus.extended_landing(lref) - minus.extended_landing(lref);
    let gap = if gap.is_nan() { plus.extended_landing(lref) } else { gap };
    Ok(match saddle {
        Saddle::Lower => (gap, plus, minus),
        Saddle::Upper => (gap, minus, plus),
    })
}

fn cycle<F: PlanarField>(field: &F, opts: &ShootOptions) -> Result<PulseOutcome> {
    let back = find_mu_b(field, opts)?;
    let front = find_mu_f(field, &opts.warm(back.mu, 1e-3))?;
    Ok(PulseOutcome::Cycle { back, front })
}

/// Homoclinic orbit to the lower (`pulse1`) or upper (`pulse2`) saddle.
pub fn find_mu_pul<F: PlanarField>(field: &F, saddle: Saddle, opts: &ShootOptions) -> Result<PulseOutcome> {
    let region = field.region();
    let z = field.zeros()?;
    let kind = match saddle {
        Saddle::Lower => WaveKind::Pulse1,
        Saddle::Upper => WaveKind::Pulse2,
    };
    let mismatch = |expected| Error::RegionMismatch {
        k: f64::NAN,
        c: f64::NAN,
        region,
        expected,
    };
    let eps = opts.eps_rel * (z.u2 - z.lower());
    let positive = |mu: f64| -> Result<bool> { Ok(pulse_gap(field, saddle, mu, eps, opts.ode_rtol)?.0 > 0.0) };

    let b = if region == RegionClass::D2 {
        if saddle == Saddle::Lower {
            return Err(mismatch("D1_1"));
        }
        if !field.condition_h() {
            return Err(Error::Refused(
                "pulses in D2 need a viscosity satisfying the divergence condition".into(),
            ));
        }
        let center = opts.warm_start.unwrap_or(-field.df(0.0));
        solve_increasing(positive, center, opts, kind.label())?
    } else {
        match (saddle, region) {
            (_, RegionClass::D1Cycle) => return cycle(field, opts),
            (Saddle::Lower, RegionClass::D1Below) => return Err(mismatch("D1_1")),
            (Saddle::Upper, RegionClass::D1Above) => return Err(mismatch("D1_2")),
            _ => {}
        }
        let mb = find_mu_b(field, opts)?.mu;
        let mf = find_mu_f(field, &opts.warm(mb, 1e-3))?.mu;
        if (mb - mf).abs() <= 1e-9 * mb.abs().max(1.0) {
            return cycle(field, opts);
        }
        let (lo, hi) = match saddle {
            Saddle::Lower if mf < mb => (mf, mb),
            Saddle::Upper if mb < mf => (mb, mf),
            Saddle::Lower => return Err(mismatch("D1_1")),
            Saddle::Upper => return Err(mismatch("D1_2")),
        };
        let pad = 1e-9 * (hi - lo);
        let (lo, hi) = (lo - pad, hi + pad);
        let pos = positive;
        if !pos(lo)? && pos(hi)? {
            bisect_within(pos, lo, hi, opts)?
        } else {
            let o = ShootOptions {
                step: 0.25 * (hi - lo),
                ..*opts
            };
            solve_increasing(pos, 0.5 * (lo + hi), &o, kind.label())?
        }
    };
    let mu = b.mid();
    let (gap, fwd, bwd) = pulse_gap(field, saddle, mu, eps, opts.ode_rtol)?;
    if fwd.landing_u().is_none() || bwd.landing_u().is_none() {
        return Err(Error::Refused(format!(
            "no homoclinic landing at mu = {mu}: forward {:?}, backward {:?}",
            fwd.landing.terminal, bwd.landing.terminal
        )));
    }
    let orbit = join(&fwd.orbit, fwd.landing.z, &bwd.orbit, bwd.landing.z);
    Ok(PulseOutcome::Pulse(ShootResult {
        kind,
        mu,
        residual: gap.abs(),
        bracket: (b.lo, b.hi),
        iterations: b.iterations,
        halves: [fwd, bwd],
        orbit,
    }))
}
