//! Linear stability of uniform flow: dispersion relation, instability
//! criterion and the band of growing wavenumbers.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelParams, OptimalVelocity};
use crate::output::{fmt_num, fmt_opt};
use crate::roots::brent;

pub const DISPERSION_CSV_HEADER: &str = "k,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus";
pub const STABILITY_MAP_CSV_HEADER: &str = "rho,unstable,k1,k2";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformState {
    pub rho_star: f64,
    pub v_star: f64,
}

impl UniformState {
    pub fn new<V: OptimalVelocity>(mp: &ModelParams<V>, rho_star: f64) -> Result<Self> {
        if !(rho_star > 0.0 && rho_star.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "density must be positive, got {rho_star}"
            )));
        }
        Ok(Self {
            rho_star,
            v_star: mp.ov.value(1.0 / rho_star),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionPoint {
    pub k: f64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
}

struct Coeffs {
    /// `1/tau + kappa k^2`.
    b: f64,
    /// `z(k) - b^2`.
    cross: Complex64,
    shift: Complex64,
}

fn coeffs<V: OptimalVelocity>(mp: &ModelParams<V>, us: &UniformState, k: f64) -> Coeffs {
    let rho = us.rho_star;
    let vp = mp.ov.slope(1.0 / rho);
    let b = 1.0 / mp.tau + mp.kappa(rho) * k * k;
    let ik = Complex64::new(0.0, k);
    let cross = 4.0 * ik / (mp.tau * rho) * (ik / (2.0 * rho) + 1.0) * vp;
    Coeffs {
        b,
        cross,
        shift: -ik * us.v_star,
    }
}

/// Growth rates `lambda_+(k)`, `lambda_-(k)` of the mode `exp(lambda t + i k x)`.
/// `lambda_+` is formed as `cross / (sqrt z + b)` so small `k` keeps its
/// relative precision.
pub fn dispersion<V: OptimalVelocity>(mp: &ModelParams<V>, us: &UniformState, k: f64) -> DispersionPoint {
    let Coeffs { b, cross, shift } = coeffs(mp, us, k);
    let root = (b * b + cross).sqrt();
    DispersionPoint {
        k,
        lambda_plus: shift + 0.5 * cross / (root + b),
        lambda_minus: shift - 0.5 * (b + root),
    }
}

/// Residual of the characteristic polynomial `s^2 + b s - c` in
/// `s = lambda + i k v*`, relative to the monomial magnitudes of its
/// expansion in `lambda`.
pub fn characteristic_residual<V: OptimalVelocity>(
    mp: &ModelParams<V>,
    us: &UniformState,
    k: f64,
    lambda: Complex64,
) -> f64 {
    let rho = us.rho_star;
    let vp = mp.ov.slope(1.0 / rho);
    let ik = Complex64::new(0.0, k);
    let s = lambda + ik * us.v_star;
    let b = 1.0 / mp.tau + mp.kappa(rho) * k * k;
    let t2 = ik / (mp.tau * rho) * (ik / (2.0 * rho) + 1.0) * vp;
    let m = lambda.norm() + (k * us.v_star).abs();
    let scale = m * m + b * m + t2.norm();
    (s * s + b * s - t2).norm() / scale.max(f64::MIN_POSITIVE)
}

/// Real part of `lambda_+`.
pub fn growth_rate<V: OptimalVelocity>(mp: &ModelParams<V>, us: &UniformState, k: f64) -> f64 {
    dispersion(mp, us, k).lambda_plus.re
}

/// Long-wave instability: `2 tau V'(1/rho) > 1`.
pub fn is_unstable<V: OptimalVelocity>(mp: &ModelParams<V>, rho_star: f64) -> bool {
    2.0 * mp.tau * mp.ov.slope(1.0 / rho_star) > 1.0
}

/// `lambda_r''(0) = V' (2 tau V' - 1) / rho^2`.
pub fn curvature_at_zero<V: OptimalVelocity>(mp: &ModelParams<V>, rho_star: f64) -> f64 {
    let vp = mp.ov.slope(1.0 / rho_star);
    vp * (2.0 * mp.tau * vp - 1.0) / (rho_star * rho_star)
}

/// `lambda_r'(k)` at a neutral wavenumber, `-k^3 kappa / (k^2 + rho^2)`.
pub fn neutral_slope<V: OptimalVelocity>(mp: &ModelParams<V>, rho_star: f64, k: f64) -> f64 {
    -k.powi(3) * mp.kappa(rho_star) / (k * k + rho_star * rho_star)
}

/// Limit of `lambda_r` as `|k| -> inf`.
pub fn short_wave_limit<V: OptimalVelocity>(mp: &ModelParams<V>, rho_star: f64) -> f64 {
    -mp.ov.slope(1.0 / rho_star) / (2.0 * mp.tau * rho_star * rho_star * mp.kappa(rho_star))
}

fn band_edge<V: OptimalVelocity>(mp: &ModelParams<V>, us: &UniformState, sign: f64) -> Result<f64> {
    let g = |k: f64| growth_rate(mp, us, sign * k);
    let mut hi = 1.0;
    while g(hi) >= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoBracket("growth rate stays nonnegative".into()));
        }
    }
    let mut lo = hi;
    while g(lo) <= 0.0 {
        lo *= 0.5;
        if lo < 1e-12 {
            return Err(Error::NoBracket("no growing wavenumber found".into()));
        }
    }
    Ok(sign * brent(g, lo, hi, 1e-14 * hi)?)
}

/// Wavenumbers `k1 < 0 < k2` bounding the growing modes, or `None` when
/// uniform flow is stable.
pub fn unstable_band<V: OptimalVelocity>(mp: &ModelParams<V>, rho_star: f64) -> Result<Option<(f64, f64)>> {
    if !is_unstable(mp, rho_star) {
        return Ok(None);
    }
    let us = UniformState::new(mp, rho_star)?;
    Ok(Some((band_edge(mp, &us, -1.0)?, band_edge(mp, &us, 1.0)?)))
}

pub fn write_dispersion_csv<W: Write>(points: &[DispersionPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{DISPERSION_CSV_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(p.k),
            fmt_num(p.lambda_plus.re),
            fmt_num(p.lambda_plus.im),
            fmt_num(p.lambda_minus.re),
            fmt_num(p.lambda_minus.im)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityRow {
    pub rho: f64,
    pub unstable: bool,
    pub band: Option<(f64, f64)>,
}

pub fn stability_map<V: OptimalVelocity>(mp: &ModelParams<V>, rhos: &[f64]) -> Result<Vec<StabilityRow>> {
    rhos.iter()
        .map(|&rho| {
            Ok(StabilityRow {
                rho,
                unstable: is_unstable(mp, rho),
                band: unstable_band(mp, rho)?,
            })
        })
        .collect()
}

pub fn write_stability_map_csv<W: Write>(rows: &[StabilityRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{STABILITY_MAP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_num(r.rho),
            u8::from(r.unstable),
            fmt_opt(r.band.map(|b| b.0)),
            fmt_opt(r.band.map(|b| b.1))
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_wavenumber() {
        let mp = ModelParams::default();
        let us = UniformState::new(&mp, 30.0).unwrap();
        let d = dispersion(&mp, &us, 0.0);
        assert_eq!(d.lambda_plus, Complex64::new(0.0, 0.0));
        assert!((d.lambda_minus.re + 1.0 / mp.tau).abs() < 1e-15);
    }

    #[test]
    fn band_closed_form() {
        // at a neutral k: V' = tau/2 (1/tau + kappa k^2)^2
        let mp = ModelParams::default();
        let rho = 33.0;
        let (k1, k2) = unstable_band(&mp, rho).unwrap().unwrap();
        let vp = mp.ov.slope(1.0 / rho);
        let oracle = (((2.0 * vp / mp.tau).sqrt() - 1.0 / mp.tau) / mp.kappa(rho)).sqrt();
        assert!((k2 / oracle - 1.0).abs() < 1e-10, "{k2} vs {oracle}");
        assert!((k1 + oracle).abs() / oracle < 1e-10);
    }

    #[test]
    fn stable_density_has_no_band() {
        let mp = ModelParams::default();
        assert!(!is_unstable(&mp, 1.0 / (10.0 * mp.ov.u_c)));
        assert_eq!(unstable_band(&mp, 1.0 / (10.0 * mp.ov.u_c)).unwrap(), None);
    }
}
