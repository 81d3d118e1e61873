use serde::{Deserialize, Serialize};

use super::field::{Anchor, PlanarField};
use super::orbit::{Orbit, Terminal};
use crate::error::{Error, Result};
use crate::ode::{integrate, Crossing, Event, OdeOptions, State, Stop};

/// Which saddle a manifold leaves from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Saddle {
    Lower,
    Upper,
}

/// Sign of `w` next to the saddle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

/// Where a shot ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landing {
    pub terminal: Terminal,
    pub z: f64,
    pub u: f64,
    pub w: f64,
}

/// Blow-up guards shared by all shots of one field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Guards {
    pub w_cap: f64,
    pub z_max: f64,
    /// Largest saddle eigenvalue modulus, used to extend landings past a
    /// boundary.
    pub lambda_ref: f64,
    pub span: f64,
}

impl Guards {
    pub fn new<F: PlanarField>(field: &F) -> Result<Self> {
        let z = field.zeros()?;
        let mut lams = Vec::with_capacity(4);
        for u in z.u1.into_iter().chain([z.u2]) {
            let (lm, lp) = field.saddle_eigen(u)?;
            lams.push(lm.abs());
            lams.push(lp.abs());
        }
        let lmax = lams.iter().cloned().fold(0.0, f64::max);
        let lmin = lams.iter().cloned().fold(f64::INFINITY, f64::min);
        let span = z.u2 - z.lower();
        Ok(Self {
            w_cap: 1e3 * lmax * span,
            z_max: 100.0 / lmin,
            lambda_ref: lmax,
            span,
        })
    }
}

/// A trajectory on a saddle's stable or unstable manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfOrbit {
    pub origin: Saddle,
    pub branch: Branch,
    pub origin_u: f64,
    /// Eigenvalue whose eigenvector seeds the shot.
    pub lambda: f64,
    /// `+1` when `u` increases away from the origin, `-1` otherwise.
    pub travel: f64,
    pub orbit: Orbit,
    pub landing: Landing,
}

impl HalfOrbit {
    /// Return point on the axis, if the shot landed there.
    pub fn landing_u(&self) -> Option<f64> {
        (self.landing.terminal == Terminal::Axis).then_some(self.landing.u)
    }

    /// Landing point extended continuously past a boundary crossing by
    /// `|w| / lambda_ref`.
    pub fn extended_landing(&self, lambda_ref: f64) -> f64 {
        self.landing.extended(self.travel, lambda_ref)
    }

    /// Whether the traversed `u`-interval contains `a`.
    pub fn reaches(&self, a: f64) -> bool {
        match self.landing.terminal {
            Terminal::Escape | Terminal::Horizon | Terminal::MaxSteps => self.orbit.crossing(a).is_some(),
            _ => self.travel * (self.landing.u - a) >= 0.0,
        }
    }
}

impl Landing {
    /// Landing point, continued past a boundary or guard crossing by
    /// `|w| / lambda_ref` in the direction of travel.
    pub fn extended(&self, travel: f64, lambda_ref: f64) -> f64 {
        match self.terminal {
            Terminal::Axis => self.u,
            Terminal::Boundary | Terminal::Floor | Terminal::Horizon | Terminal::MaxSteps => {
                self.u + travel * self.w.abs() / lambda_ref
            }
            Terminal::Escape => travel * f64::INFINITY,
        }
    }
}

struct ShotSpec {
    anchor: Anchor,
    y0: State,
    forward: bool,
    travel: f64,
    boundary: Option<f64>,
    z_max: f64,
    atol: f64,
    rtol: f64,
}

fn run_shot<F: PlanarField>(field: &F, g: &Guards, spec: ShotSpec) -> Result<(Orbit, Landing)> {
    let anchor = spec.anchor;
    let floor = field.u_floor();
    let travel = spec.travel;
    let mut events = vec![Event::new(Crossing::Either, |_, y: &State| y[1])];
    let mut kinds = vec![Terminal::Axis];
    if let Some(b) = spec.boundary {
        let sb = b - anchor.base;
        events.push(Event::new(Crossing::Rising, move |_, y: &State| travel * (y[0] - sb)));
        kinds.push(Terminal::Boundary);
    }
    if floor.is_finite() {
        events.push(Event::new(Crossing::Falling, move |_, y: &State| {
            anchor.base + y[0] - floor
        }));
        kinds.push(Terminal::Floor);
    }
    let cap = g.w_cap;
    events.push(Event::new(Crossing::Rising, move |_, y: &State| y[1].abs() - cap));
    kinds.push(Terminal::Escape);

    let opts = OdeOptions {
        atol: spec.atol,
        rtol: spec.rtol,
        ..OdeOptions::default()
    };
    let z_end = if spec.forward { spec.z_max } else { -spec.z_max };
    let tr = integrate(
        |_, y: &State| [y[1], field.accel(anchor, y[0], y[1])],
        0.0,
        spec.y0,
        z_end,
        &events,
        &opts,
    )?;
    let terminal = match tr.stop {
        Stop::Event(i) => kinds[i],
        Stop::Horizon => Terminal::Horizon,
        Stop::MaxSteps => Terminal::MaxSteps,
    };
    let orbit = Orbit {
        anchor,
        trajectory: tr,
        terminal,
    };
    let end = orbit.end();
    let landing = Landing {
        terminal,
        z: end.z,
        u: end.u,
        w: end.w,
    };
    Ok((orbit, landing))
}

fn scaled_atol(offset: f64) -> f64 {
    (1e-4 * offset.abs()).min(1e-12).max(f64::MIN_POSITIVE)
}

/// Relative tolerance of every shot unless a caller overrides it.
pub const SHOT_RTOL: f64 = 1e-10;

/// Shoots the manifold `(saddle, branch)` from the offset `eps` along the
/// unit eigenvector.
pub fn manifold_shoot_eps<F: PlanarField>(field: &F, origin: Saddle, branch: Branch, eps: f64) -> Result<HalfOrbit> {
    manifold_shoot_tol(field, origin, branch, eps, SHOT_RTOL)
}

/// [`manifold_shoot_eps`] with an explicit integrator tolerance.
pub fn manifold_shoot_tol<F: PlanarField>(
    field: &F,
    origin: Saddle,
    branch: Branch,
    eps: f64,
    rtol: f64,
) -> Result<HalfOrbit> {
    let z = field.zeros()?;
    let g = Guards::new(field)?;
    let (u_eq, boundary) = match origin {
        Saddle::Lower => (
            z.u1.ok_or_else(|| Error::InvalidParameter("lower saddle absent in this region".into()))?,
            Some(z.u2),
        ),
        Saddle::Upper => (z.u2, z.u1),
    };
    let (lm, lp) = field.saddle_eigen(u_eq)?;
    let (lambda, side, forward) = match (origin, branch) {
        (Saddle::Lower, Branch::Plus) => (lp, 1.0, true),
        (Saddle::Lower, Branch::Minus) => (lm, 1.0, false),
        (Saddle::Upper, Branch::Plus) => (lm, -1.0, false),
        (Saddle::Upper, Branch::Minus) => (lp, -1.0, true),
    };
    let n = (1.0 + lambda * lambda).sqrt();
    let s0 = side * eps / n;
    let w0 = side * eps * lambda / n;
    let (orbit, landing) = run_shot(
        field,
        &g,
        ShotSpec {
            anchor: Anchor::at_zero(u_eq),
            y0: [s0, w0],
            forward,
            travel: side,
            boundary,
            z_max: g.z_max,
            atol: scaled_atol(s0),
            rtol,
        },
    )?;
    Ok(HalfOrbit {
        origin,
        branch,
        origin_u: u_eq,
        lambda,
        travel: side,
        orbit,
        landing,
    })
}

/// Manifold shot with the default offset `1e-8 * (u2 - u1)`.
pub fn manifold_shoot<F: PlanarField>(field: &F, origin: Saddle, branch: Branch) -> Result<HalfOrbit> {
    let z = field.zeros()?;
    manifold_shoot_eps(field, origin, branch, 1e-8 * (z.u2 - z.lower()))
}

/// Shoots from `(anchor.base + s0, 0)` to the next return to the axis.
///
/// Returns the orbit, its landing and the direction of travel in `u`.
pub fn shoot_from_axis<F: PlanarField>(
    field: &F,
    anchor: Anchor,
    s0: f64,
    forward: bool,
) -> Result<(Orbit, Landing, f64)> {
    shoot_from_axis_tol(field, anchor, s0, forward, SHOT_RTOL)
}

/// [`shoot_from_axis`] with an explicit integrator tolerance.
pub fn shoot_from_axis_tol<F: PlanarField>(
    field: &F,
    anchor: Anchor,
    s0: f64,
    forward: bool,
    rtol: f64,
) -> Result<(Orbit, Landing, f64)> {
    let z = field.zeros()?;
    let g = Guards::new(field)?;
    let travel = field.accel(anchor, s0, 0.0).signum();
    if !(travel == 1.0 || travel == -1.0) {
        return Err(Error::InvalidParameter(format!(
            "start u = {} is an equilibrium or outside the domain",
            anchor.base + s0
        )));
    }
    let boundary = if travel > 0.0 { Some(z.u2) } else { z.u1 };
    let rel = (s0.abs() / g.span).max(f64::MIN_POSITIVE);
    let z_max = g.z_max * (1.0 + 0.02 * rel.ln().abs());
    let offset = if anchor.on_zero { s0 } else { g.span };
    let (orbit, landing) = run_shot(
        field,
        &g,
        ShotSpec {
            anchor,
            y0: [s0, 0.0],
            forward,
            travel,
            boundary,
            z_max,
            atol: scaled_atol(offset),
            rtol,
        },
    )?;
    Ok((orbit, landing, travel))
}

/// `w` on the half-orbit where it passes `u = a`.
pub fn w_at(half: &HalfOrbit, a: f64) -> Result<f64> {
    if a == half.origin_u {
        return Ok(0.0);
    }
    let start = half.orbit.start();
    if (a - half.origin_u) * (start.u - a) > 0.0 {
        return Ok(half.lambda * (a - half.origin_u));
    }
    half.orbit.crossing(a).map(|s| s.w).ok_or(Error::OutOfRange {
        value: a,
        lo: half.origin_u.min(half.landing.u),
        hi: half.origin_u.max(half.landing.u),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelParams, WaveContext};

    fn ctx(c: f64, mu: f64) -> WaveContext {
        WaveContext::new(&ModelParams::default(), 1.25, c, mu).unwrap()
    }

    #[test]
    fn slope_at_origin_matches_eigenvalue() {
        let cx = ctx(0.0163, 0.05);
        let h = manifold_shoot(&cx, Saddle::Lower, Branch::Plus).unwrap();
        let (_, lp) = cx.saddle_eigen(h.origin_u).unwrap();
        let a = h.origin_u + 1e-6 * (cx.zeros.unwrap().u2 - h.origin_u);
        let slope = w_at(&h, a).unwrap() / (a - h.origin_u);
        assert!((slope / lp - 1.0).abs() < 1e-3, "{slope} vs {lp}");
        assert_eq!(w_at(&h, h.origin_u).unwrap(), 0.0);
    }

    #[test]
    fn large_mu_crosses_upper_saddle() {
        let cx = ctx(0.0163, 5.0);
        let h = manifold_shoot(&cx, Saddle::Lower, Branch::Plus).unwrap();
        assert!(matches!(h.landing.terminal, Terminal::Boundary | Terminal::Escape));
        assert!(h.landing.w > 0.0);
    }

    #[test]
    fn landing_segments() {
        let cx = ctx(0.0163, -0.3);
        let z = cx.zeros.unwrap();
        let h = manifold_shoot(&cx, Saddle::Lower, Branch::Plus).unwrap();
        assert_eq!(h.landing.terminal, Terminal::Axis);
        let u = h.landing_u().unwrap();
        assert!(u > z.u0 && u < z.u2);
        assert!(h.landing.w.abs() < 1e-12);
    }
}
