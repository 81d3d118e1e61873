#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use travwave::model::{ModelParams, WaveContext};

pub fn mp() -> ModelParams {
    ModelParams::default()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A point of the three-zero region, kept away from its edges by `margin`
/// of the admissible speed interval.
pub fn random_d1(r: &mut StdRng, margin: f64) -> (f64, f64) {
    let p = mp();
    let k = r.random_range(0.9..1.45);
    let cs = p.critical_speeds(k).unwrap();
    let (lo, hi) = (cs.c_lower, cs.c_peak.unwrap());
    let t = r.random_range(margin..1.0 - margin);
    (k, lo + t * (hi - lo))
}

pub fn ctx(k: f64, c: f64, mu: f64) -> WaveContext {
    WaveContext::new(&mp(), k, c, mu).unwrap()
}
