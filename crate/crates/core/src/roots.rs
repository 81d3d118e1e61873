//! Bracketed scalar root finding.

use crate::error::{Error, Result};

const MAX_ITER: usize = 300;

/// Brent's method on `[a, b]`; `f(a)` and `f(b)` must differ in sign.
///
/// Terminates when the bracket is narrower than `xtol` plus a few ulps of the
/// current iterate.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NotBracketed {
            lo: a,
            hi: b,
            flo: fa,
            fhi: fb,
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NotBracketed {
                lo: a,
                hi: b,
                flo: fa,
                fhi: fb,
            });
        }
    }
    Err(Error::NoConvergence(MAX_ITER))
}

/// Outcome of a sign-only bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

impl Bisection {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Bisection on an increasing sign predicate: `positive(x)` is false at `lo`
/// and true at `hi`. Stops once `hi - lo <= width(mid)`.
pub fn bisect_sign<F, W>(mut positive: F, lo: f64, hi: f64, width: W) -> Result<Bisection>
where
    F: FnMut(f64) -> Result<bool>,
    W: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    for it in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= width(mid) || mid <= lo || mid >= hi {
            return Ok(Bisection { lo, hi, iterations: it });
        }
        if positive(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::NoConvergence(MAX_ITER))
}

/// Expands `[center - step, center + step]`-style probes geometrically until
/// the increasing predicate changes value. Returns `(lo, hi)` with
/// `positive(lo) == false` and `positive(hi) == true`.
pub fn expand_bracket<F>(mut positive: F, center: f64, step: f64, max_doublings: u32) -> Result<Option<(f64, f64)>>
where
    F: FnMut(f64) -> Result<bool>,
{
    let at_center = positive(center)?;
    let mut last = center;
    for k in 0..=max_doublings {
        let delta = step * 2f64.powi(k as i32);
        let probe = if at_center { center - delta } else { center + delta };
        let p = positive(probe)?;
        if p != at_center {
            return Ok(Some(if at_center { (probe, last) } else { (last, probe) }));
        }
        last = probe;
    }
    Ok(None)
}
