use crate::error::{Error, Result};

use super::pde::FieldSnapshot;

/// Smallest density contrast `(max - min) / max` that counts as a pulse.
pub const PULSE_CONTRAST: f64 = 0.2;

fn contrast(rho: &[f64]) -> f64 {
    let (lo, hi) = rho
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| (a.min(r), b.max(r)));
    (hi - lo) / hi
}

/// Number of congested stretches: maximal runs on the ring where `rho`
/// exceeds the midpoint of its range. Zero when the contrast is too small.
pub fn count_pulses(s: &FieldSnapshot) -> usize {
    if contrast(&s.rho) < PULSE_CONTRAST {
        return 0;
    }
    let (lo, hi) = s
        .rho
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| (a.min(r), b.max(r)));
    let mid = 0.5 * (lo + hi);
    let n = s.rho.len();
    (0..n)
        .filter(|&i| s.rho[i] > mid && s.rho[(i + n - 1) % n] <= mid)
        .count()
}

/// Position on the ring where the fundamental Fourier mode of `v` is
/// smallest. It moves rigidly with any translating profile and is not
/// disturbed by flat troughs.
pub fn trough_position(s: &FieldSnapshot, length: f64) -> f64 {
    let n = s.v.len();
    let (mut re, mut im) = (0.0, 0.0);
    for (i, &v) in s.v.iter().enumerate() {
        let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        re += v * th.cos();
        im += v * th.sin();
    }
    // v ~ A cos(theta - phi) with phi = atan2(im, re); its minimum is at phi + pi
    let phi = im.atan2(re) + std::f64::consts::PI;
    (s.x[0] + phi / (2.0 * std::f64::consts::PI) * length).rem_euclid(length)
}

/// Wave speed `c` in the moving frame `z = x + c t`, from a least-squares
/// fit of the unwrapped trough position against time. A profile that moves
/// toward decreasing `x` has `c > 0`.
pub fn estimate_wave_speed(snaps: &[FieldSnapshot], length: f64) -> Result<f64> {
    if snaps.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least three snapshots to fit a speed, got {}",
            snaps.len()
        )));
    }
    if let Some(s) = snaps.iter().find(|s| contrast(&s.rho) < PULSE_CONTRAST) {
        return Err(Error::Refused(format!("no pulse detected at t = {}", s.t)));
    }
    let mut pos = Vec::with_capacity(snaps.len());
    let mut prev: Option<f64> = None;
    for s in snaps {
        let p = trough_position(s, length);
        let p = match prev {
            Some(q) => q + (p - q.rem_euclid(length) + 0.5 * length).rem_euclid(length) - 0.5 * length,
            None => p,
        };
        pos.push(p);
        prev = Some(p);
    }
    let n = snaps.len() as f64;
    let tm = snaps.iter().map(|s| s.t).sum::<f64>() / n;
    let pm = pos.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (s, p) in snaps.iter().zip(&pos) {
        sxy += (s.t - tm) * (p - pm);
        sxx += (s.t - tm) * (s.t - tm);
    }
    Ok(-sxy / sxx)
}

/// `K = rho (v + c)` at `x_probe`, interpolated linearly on the ring.
pub fn estimate_k(s: &FieldSnapshot, x_probe: f64, c: f64, length: f64) -> f64 {
    let n = s.rho.len();
    let pos = x_probe.rem_euclid(length) / length * n as f64;
    let i = (pos.floor() as usize) % n;
    let t = pos - pos.floor();
    let j = (i + 1) % n;
    let rho = (1.0 - t) * s.rho[i] + t * s.rho[j];
    let v = (1.0 - t) * s.v[i] + t * s.v[j];
    rho * (v + c)
}

/// A probe point in free flow: the grid point of lowest density.
pub fn free_flow_probe(s: &FieldSnapshot) -> f64 {
    let (i, _) = s.rho.iter().enumerate().fold(
        (0, f64::INFINITY),
        |(bi, bv), (i, &r)| if r < bv { (i, r) } else { (bi, bv) },
    );
    s.x[i]
}
