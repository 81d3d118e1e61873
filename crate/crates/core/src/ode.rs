//! Dormand–Prince 5(4) integration of planar systems with dense output and
//! event location.

use crate::error::{Error, Result};

pub type State = [f64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
    /// Events are refined until `|g| < event_tol`.
    pub event_tol: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 500_000,
            event_tol: 1e-12,
        }
    }
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseSegment {
    pub z0: f64,
    /// Signed step length.
    pub h: f64,
    /// Fraction of the step that belongs to the trajectory (`< 1` on the
    /// step where an event stopped the integration).
    pub theta_end: f64,
    rcont: [State; 5],
}

impl DenseSegment {
    pub fn eval_theta(&self, theta: f64) -> State {
        let t1 = 1.0 - theta;
        let r = &self.rcont;
        let mut y = [0.0; 2];
        for i in 0..2 {
            y[i] = r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])));
        }
        y
    }

    pub fn eval(&self, z: f64) -> State {
        self.eval_theta((z - self.z0) / self.h)
    }

    pub fn z_end(&self) -> f64 {
        self.z0 + self.theta_end * self.h
    }

    pub fn start(&self) -> State {
        self.rcont[0]
    }

    pub fn end(&self) -> State {
        self.eval_theta(self.theta_end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Rising,
    Falling,
    Either,
}

impl Crossing {
    fn matches(self, before: f64, after: f64) -> bool {
        if before == 0.0 {
            return false;
        }
        match self {
            Crossing::Rising => before < 0.0 && after >= 0.0,
            Crossing::Falling => before > 0.0 && after <= 0.0,
            Crossing::Either => before.signum() != after.signum() || after == 0.0,
        }
    }
}

/// Terminal event `g(z, y) = 0`.
pub struct Event<'a> {
    pub g: Box<dyn Fn(f64, &State) -> f64 + 'a>,
    pub crossing: Crossing,
}

impl<'a> Event<'a> {
    pub fn new(crossing: Crossing, g: impl Fn(f64, &State) -> f64 + 'a) -> Self {
        Self {
            g: Box::new(g),
            crossing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// The requested end of the interval was reached.
    Horizon,
    /// Event `index` fired.
    Event(usize),
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub z0: f64,
    pub y0: State,
    pub segments: Vec<DenseSegment>,
    pub stop: Stop,
    pub z_end: f64,
    pub y_end: State,
}

impl Trajectory {
    /// Dense evaluation; `z` must lie in the traversed interval.
    pub fn eval(&self, z: f64) -> Option<State> {
        let dir = (self.z_end - self.z0).signum();
        if self.segments.is_empty() {
            return (z == self.z0).then_some(self.y0);
        }
        let idx = self.segments.partition_point(|s| dir * (s.z_end() - z) < 0.0);
        self.segments.get(idx).map(|s| s.eval(z))
    }

    /// `int g(z, y(z)) dz` along the trajectory (signed by direction) using
    /// 8-point Gauss–Legendre per segment.
    pub fn quadrature(&self, g: impl Fn(f64, &State) -> f64) -> f64 {
        const X: [f64; 4] = [
            0.183_434_642_495_649_8,
            0.525_532_409_916_329_0,
            0.796_666_477_413_626_7,
            0.960_289_856_497_536_3,
        ];
        const W: [f64; 4] = [
            0.362_683_783_378_362_0,
            0.313_706_645_877_887_3,
            0.222_381_034_453_374_5,
            0.101_228_536_290_376_3,
        ];
        let mut total = 0.0;
        for seg in &self.segments {
            let half = 0.5 * seg.theta_end;
            let mut acc = 0.0;
            for (x, w) in X.iter().zip(W) {
                for th in [half * (1.0 - x), half * (1.0 + x)] {
                    let y = seg.eval_theta(th);
                    acc += w * g(seg.z0 + th * seg.h, &y);
                }
            }
            total += acc * half * seg.h;
        }
        total
    }
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for i in 0..2 {
        let mut s = 0.0;
        for (a, k) in terms {
            s += a * k[i];
        }
        out[i] += h * s;
    }
    out
}

fn finite(y: &State) -> bool {
    y[0].is_finite() && y[1].is_finite()
}

/// Integrates `y' = rhs(z, y)` from `z0` towards `z_end` (either direction),
/// stopping at the first event.
pub fn integrate<F>(
    rhs: F,
    z0: f64,
    y0: State,
    z_end: f64,
    events: &[Event<'_>],
    opts: &OdeOptions,
) -> Result<Trajectory>
where
    F: Fn(f64, &State) -> State,
{
    let dir = if z_end >= z0 { 1.0 } else { -1.0 };
    let span = (z_end - z0).abs();
    let mut segments = Vec::new();
    let mut z = z0;
    let mut y = y0;
    let mut k1 = rhs(z, &y);
    if !finite(&k1) {
        return Err(Error::InvalidParameter(format!(
            "non-finite field at z = {z0}, y = {y0:?}"
        )));
    }
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(z, &y)).collect();
    let sc = |a: f64, b: f64| opts.atol + opts.rtol * a.abs().max(b.abs());

    let mut h = match opts.h_init {
        Some(h) => h.abs(),
        None => {
            let d0 = ((y[0] / sc(y[0], 0.0)).powi(2) + (y[1] / sc(y[1], 0.0)).powi(2)).sqrt() / 2f64.sqrt();
            let d1 = ((k1[0] / sc(y[0], 0.0)).powi(2) + (k1[1] / sc(y[1], 0.0)).powi(2)).sqrt() / 2f64.sqrt();
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            h0.min(span.max(f64::MIN_POSITIVE))
        }
    }
    .min(opts.h_max);
    if span == 0.0 {
        return Ok(Trajectory {
            z0,
            y0,
            segments,
            stop: Stop::Horizon,
            z_end: z0,
            y_end: y0,
        });
    }

    let mut reject_streak = 0usize;
    for _ in 0..opts.max_steps {
        let remaining = (z_end - z) * dir;
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = dir * h;
        let k2 = rhs(z + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = rhs(z + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(z + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            z + C5 * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            z + hs,
            &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(z + hs, &y1);
        let stages_ok = [&k2, &k3, &k4, &k5, &k6, &k7].iter().all(|k| finite(k)) && finite(&y1);
        let err = if stages_ok {
            let mut e2 = 0.0;
            for i in 0..2 {
                let ei = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                e2 += (ei / sc(y[i], y1[i])).powi(2);
            }
            (e2 / 2.0).sqrt()
        } else {
            f64::INFINITY
        };
        if !(err <= 1.0) {
            reject_streak += 1;
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).max(0.2)
            } else {
                0.5
            };
            h *= fac;
            if h <= 1e-15 * z.abs().max(1.0) || reject_streak > 200 {
                return Err(Error::StepUnderflow(z));
            }
            continue;
        }
        reject_streak = 0;

        let mut rcont = [[0.0; 2]; 5];
        for i in 0..2 {
            let ydiff = y1[i] - y[i];
            let bspl = hs * k1[i] - ydiff;
            rcont[0][i] = y[i];
            rcont[1][i] = ydiff;
            rcont[2][i] = bspl;
            rcont[3][i] = ydiff - hs * k7[i] - bspl;
            rcont[4][i] = hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        let mut seg = DenseSegment {
            z0: z,
            h: hs,
            theta_end: 1.0,
            rcont,
        };

        // earliest event inside the step
        let mut hit: Option<(usize, f64)> = None;
        let mut g_new = Vec::with_capacity(events.len());
        for (idx, ev) in events.iter().enumerate() {
            let gn = (ev.g)(z + hs, &y1);
            g_new.push(gn);
            if ev.crossing.matches(g_prev[idx], gn) {
                let th = locate(&seg, ev, g_prev[idx], gn, opts.event_tol);
                if hit.map_or(true, |(_, t)| th < t) {
                    hit = Some((idx, th));
                }
            }
        }
        if let Some((idx, th)) = hit {
            seg.theta_end = th;
            let ye = seg.eval_theta(th);
            let ze = z + th * hs;
            segments.push(seg);
            return Ok(Trajectory {
                z0,
                y0,
                segments,
                stop: Stop::Event(idx),
                z_end: ze,
                y_end: ye,
            });
        }
        segments.push(seg);
        z = if last { z_end } else { z + hs };
        y = y1;
        k1 = k7;
        g_prev = g_new;
        if last {
            return Ok(Trajectory {
                z0,
                y0,
                segments,
                stop: Stop::Horizon,
                z_end: z,
                y_end: y,
            });
        }
        let fac = if err == 0.0 {
            10.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 10.0)
        };
        h = (h * fac).min(opts.h_max);
    }
    Ok(Trajectory {
        z0,
        y0,
        segments,
        stop: Stop::MaxSteps,
        z_end: z,
        y_end: y,
    })
}

/// Illinois iteration on the dense output for the event root in `(0, 1]`.
fn locate(seg: &DenseSegment, ev: &Event<'_>, g0: f64, g1: f64, tol: f64) -> f64 {
    let g = |th: f64| (ev.g)(seg.z0 + th * seg.h, &seg.eval_theta(th));
    let (mut a, mut b) = (0.0, 1.0);
    let (mut ga, mut gb) = (g0, g1);
    if gb == 0.0 {
        return 1.0;
    }
    let mut side = 0i8;
    let mut best = 1.0;
    for _ in 0..200 {
        let mut t = (a * gb - b * ga) / (gb - ga);
        if !(t > a && t < b) {
            t = 0.5 * (a + b);
        }
        let gt = g(t);
        if gt.abs() < tol || b - a < 4.0 * f64::EPSILON {
            return t;
        }
        if gt.signum() == gb.signum() {
            b = t;
            gb = gt;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        } else {
            a = t;
            ga = gt;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        }
        best = b;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(_: f64, y: &State) -> State {
        [y[1], -y[0]]
    }

    #[test]
    fn harmonic_oscillator_accuracy() {
        let tr = integrate(oscillator, 0.0, [1.0, 0.0], 10.0, &[], &OdeOptions::default()).unwrap();
        assert_eq!(tr.stop, Stop::Horizon);
        assert!((tr.y_end[0] - 10f64.cos()).abs() < 1e-8);
        for z in [0.3, 2.5, 7.77] {
            let y = tr.eval(z).unwrap();
            assert!((y[0] - z.cos()).abs() < 1e-8, "dense output at {z}");
        }
    }

    #[test]
    fn backward_and_events() {
        let ev = [Event::new(Crossing::Falling, |_, y: &State| y[0])];
        let tr = integrate(oscillator, 0.0, [1.0, 0.0], -10.0, &ev, &OdeOptions::default()).unwrap();
        assert_eq!(tr.stop, Stop::Event(0));
        assert!((tr.z_end + std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        assert!(tr.y_end[0].abs() < 1e-12);
    }

    #[test]
    fn initial_zero_is_ignored() {
        let ev = [Event::new(Crossing::Either, |_, y: &State| y[1])];
        let tr = integrate(oscillator, 0.0, [1.0, 0.0], 10.0, &ev, &OdeOptions::default()).unwrap();
        assert!((tr.z_end - std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn quadrature_of_cosine() {
        let tr = integrate(oscillator, 0.0, [1.0, 0.0], 2.0, &[], &OdeOptions::default()).unwrap();
        let q = tr.quadrature(|_, y| y[0]);
        assert!((q - 2f64.sin()).abs() < 1e-9);
    }
}
