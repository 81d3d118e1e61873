//! Traveling-wave coefficients, critical values, equilibria and regions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ov::OptimalVelocity;
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::roots::brent;

const ROOT_TOL: f64 = 1e-15;
/// Half-width of the band treated as `c == c*`.
pub const CYCLE_BAND: f64 = 1e-8;
/// Half-width of the band treated as `c == c0`.
pub const C0_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalConstants {
    /// `V'(0)`.
    pub k0: f64,
    /// `max V'`.
    pub k_max: f64,
    /// Flux where the trough speed equals `c0`.
    pub k1: f64,
    /// Headway of the maximal slope.
    pub u_inflection: f64,
    /// `-V(0)`.
    pub c0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalSpeeds {
    /// Local maximum of `K u - V(u)`, present only when `K > V'(0)`.
    pub u_peak: Option<f64>,
    /// Local minimum of `K u - V(u)`.
    pub u_trough: f64,
    pub c_peak: Option<f64>,
    pub c_trough: f64,
    /// `max(c0, c_trough)`.
    pub c_lower: f64,
}

impl<V: OptimalVelocity> ModelParams<V> {
    pub fn c0(&self) -> f64 {
        -self.ov.value(0.0)
    }

    pub fn k0(&self) -> f64 {
        self.ov.slope(0.0)
    }

    pub fn k_max(&self) -> f64 {
        self.ov.slope(self.ov.inflection())
    }

    /// Headways where `V'(u) = K` on each side of the inflection.
    fn slope_preimages(&self, k: f64) -> Result<(Option<f64>, f64)> {
        let k_max = self.k_max();
        if !(k > 0.0 && k <= k_max) {
            return Err(Error::FluxOutOfRange { k, lo: 0.0, hi: k_max });
        }
        let um = self.ov.inflection();
        if k >= k_max * (1.0 - 4.0 * f64::EPSILON) {
            return Ok((Some(um), um));
        }
        let g = |u: f64| self.ov.slope(u) - k;
        let peak = if self.k0() < k {
            Some(brent(g, 0.0, um, ROOT_TOL)?)
        } else {
            None
        };
        let mut hi = 2.0 * um;
        while g(hi) > 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::InvalidParameter("V' does not decay".into()));
            }
        }
        Ok((peak, brent(g, um, hi, ROOT_TOL)?))
    }

    /// Critical headways and speeds for `0 < K < max V'`.
    pub fn critical_speeds(&self, k: f64) -> Result<CriticalSpeeds> {
        let k_max = self.k_max();
        if !(k > 0.0 && k < k_max) {
            return Err(Error::FluxOutOfRange { k, lo: 0.0, hi: k_max });
        }
        let (u_peak, u_trough) = self.slope_preimages(k)?;
        let c_at = |u: f64| k * u - self.ov.value(u);
        let c_trough = c_at(u_trough);
        Ok(CriticalSpeeds {
            u_peak,
            u_trough,
            c_peak: u_peak.map(c_at),
            c_trough,
            c_lower: c_trough.max(self.c0()),
        })
    }

    fn c_trough_closed(&self, k: f64) -> Result<f64> {
        let (_, u) = self.slope_preimages(k)?;
        Ok(k * u - self.ov.value(u))
    }

    /// The flux `K1`, computed once and cached.
    pub fn k1(&self) -> Result<f64> {
        self.k1_cache
            .get_or_init(|| {
                let c0 = self.c0();
                let (lo, hi) = (self.k0(), self.k_max());
                brent(
                    |k| self.c_trough_closed(k).map(|c| c - c0).unwrap_or(f64::NAN),
                    lo,
                    hi,
                    1e-15,
                )
                .map_err(|e| Error::InvalidParameter(format!("inconsistent OV parameters: {e}")))
            })
            .clone()
    }

    pub fn critical_constants(&self) -> Result<CriticalConstants> {
        Ok(CriticalConstants {
            k0: self.k0(),
            k_max: self.k_max(),
            k1: self.k1()?,
            u_inflection: self.ov.inflection(),
            c0: self.c0(),
        })
    }

    /// Region of the `(K, c)` plane. With `c_star`, the first region is split.
    pub fn classify(&self, k: f64, c: f64, c_star: Option<f64>) -> RegionClass {
        if !(k.is_finite() && c.is_finite()) || k <= 0.0 || k >= self.k_max() {
            return RegionClass::Outside;
        }
        let Ok(cs) = self.critical_speeds(k) else {
            return RegionClass::Outside;
        };
        let c0 = self.c0();
        let k0 = self.k0();
        let below_k1 = self.k1().map(|k1| k < k1).unwrap_or(false);
        if below_k1 && ((k > k0 && (c - c0).abs() <= C0_BAND) || (cs.c_trough < c && c < c0)) {
            return RegionClass::D2;
        }
        if let Some(c_peak) = cs.c_peak {
            if cs.c_lower < c && c < c_peak {
                return match c_star {
                    None => RegionClass::D1Unsplit,
                    Some(cs) if (c - cs).abs() < CYCLE_BAND => RegionClass::D1Cycle,
                    Some(cs) if c > cs => RegionClass::D1Above,
                    Some(_) => RegionClass::D1Below,
                };
            }
        }
        RegionClass::Outside
    }

    /// Finer description of points outside both existence regions.
    pub fn outside_kind(&self, k: f64, c: f64) -> Option<OutsideKind> {
        if self.classify(k, c, None) != RegionClass::Outside || k == 0.0 {
            return None;
        }
        let c0 = self.c0();
        if k < 0.0 {
            return Some(if c >= c0 {
                OutsideKind::Positive
            } else {
                OutsideKind::SingleCrossing
            });
        }
        let k1 = self.k1().ok()?;
        if k >= self.k_max() {
            return Some(if c > c0 {
                OutsideKind::SingleCrossing
            } else {
                OutsideKind::Positive
            });
        }
        let cs = self.critical_speeds(k).ok()?;
        if (k <= k1 && c <= cs.c_trough) || (k > k1 && c <= c0) {
            Some(OutsideKind::Positive)
        } else {
            Some(OutsideKind::SingleCrossing)
        }
    }

    /// Ordered zeros of `f` for `(K, c)` in one of the existence regions.
    pub fn zeros_of_f(&self, k: f64, c: f64) -> Result<Zeros> {
        let region = self.classify(k, c, None);
        let cs = match region {
            RegionClass::Outside => {
                return Err(Error::RegionMismatch {
                    k,
                    c,
                    region,
                    expected: "D1 or D2",
                })
            }
            _ => self.critical_speeds(k)?,
        };
        let g = |u: f64| k * u - self.ov.value(u) - c;
        let mut hi = 2.0 * cs.u_trough;
        while g(hi) <= 0.0 {
            hi *= 2.0;
        }
        let u2 = brent(g, cs.u_trough, hi, ROOT_TOL)?;
        let zeros = if region == RegionClass::D2 {
            let lo = match cs.u_peak {
                Some(p) if k > self.k0() => p,
                _ => 0.0,
            };
            Zeros {
                u1: None,
                u0: brent(g, lo, cs.u_trough, ROOT_TOL)?,
                u2,
            }
        } else {
            let up = cs.u_peak.expect("first region requires a peak");
            Zeros {
                u1: Some(brent(g, 0.0, up, ROOT_TOL)?),
                u0: brent(g, up, cs.u_trough, ROOT_TOL)?,
                u2,
            }
        };
        let df = |u: f64| k - self.ov.slope(u);
        let ok = zeros.u1.map_or(true, |u| df(u) > 0.0) && df(zeros.u0) < 0.0 && df(zeros.u2) > 0.0;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "zeros {zeros:?} violate the expected slope pattern"
            )));
        }
        Ok(zeros)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionClass {
    /// Three zeros, `c > c*`.
    #[serde(rename = "D1_1")]
    D1Above,
    /// Three zeros, `c < c*`.
    #[serde(rename = "D1_2")]
    D1Below,
    /// Three zeros, `c = c*` within [`CYCLE_BAND`].
    #[serde(rename = "D1_3")]
    D1Cycle,
    /// Three zeros, `c*` not supplied.
    #[serde(rename = "D1")]
    D1Unsplit,
    /// Two positive zeros.
    #[serde(rename = "D2")]
    D2,
    #[serde(rename = "outside")]
    Outside,
}

impl RegionClass {
    pub fn is_d1(self) -> bool {
        matches!(
            self,
            RegionClass::D1Above | RegionClass::D1Below | RegionClass::D1Cycle | RegionClass::D1Unsplit
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            RegionClass::D1Above => "D1_1",
            RegionClass::D1Below => "D1_2",
            RegionClass::D1Cycle => "D1_3",
            RegionClass::D1Unsplit => "D1",
            RegionClass::D2 => "D2",
            RegionClass::Outside => "outside",
        }
    }
}

/// Structure of `f` outside the existence regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutsideKind {
    /// `f >= 0` for all `u > 0`.
    Positive,
    /// `f <= 0` below a single crossing and `f >= 0` above it.
    SingleCrossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zeros {
    /// Absent when the lowest zero is not positive.
    pub u1: Option<f64>,
    pub u0: f64,
    pub u2: f64,
}

impl Zeros {
    /// Lower saddle, or `0` when it is absent.
    pub fn lower(&self) -> f64 {
        self.u1.unwrap_or(0.0)
    }
}

/// Eigen-decomposition of the linearization at an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumEigen {
    pub lambda_minus: Complex64,
    pub lambda_plus: Complex64,
    /// Unit eigenvectors `(1, lambda)/|(1, lambda)|`.
    pub v_minus: [Complex64; 2],
    pub v_plus: [Complex64; 2],
}

impl EquilibriumEigen {
    pub fn is_saddle(&self) -> bool {
        self.lambda_minus.im == 0.0
            && self.lambda_plus.im == 0.0
            && self.lambda_minus.re < 0.0
            && self.lambda_plus.re > 0.0
    }
}

/// Roots of `lambda^2 - trace * lambda - det = 0`, ordered by real part.
pub fn planar_eigen(trace: f64, det: f64) -> (Complex64, Complex64) {
    let disc = trace * trace + 4.0 * det;
    if disc >= 0.0 {
        let r = disc.sqrt();
        let big = 0.5 * (trace + r.copysign(trace));
        let other = if big != 0.0 { -det / big } else { 0.0 };
        let (lo, hi) = if big < other { (big, other) } else { (other, big) };
        (Complex64::new(lo, 0.0), Complex64::new(hi, 0.0))
    } else {
        let im = 0.5 * (-disc).sqrt();
        (Complex64::new(0.5 * trace, -im), Complex64::new(0.5 * trace, im))
    }
}

fn unit_eigvec(l: Complex64) -> [Complex64; 2] {
    let n = (1.0 + l.norm_sqr()).sqrt();
    [Complex64::new(1.0 / n, 0.0), l / n]
}

/// Speed, flux and control parameter together with the derived zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveContext<V: OptimalVelocity = super::OvParams> {
    pub params: ModelParams<V>,
    pub k: f64,
    pub c: f64,
    pub mu: f64,
    pub zeros: Option<Zeros>,
    pub region: RegionClass,
}

impl<V: OptimalVelocity> WaveContext<V> {
    pub fn new(params: &ModelParams<V>, k: f64, c: f64, mu: f64) -> Result<Self> {
        if k == 0.0 || !k.is_finite() || !c.is_finite() || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("bad (K, c, mu) = ({k}, {c}, {mu})")));
        }
        let region = params.classify(k, c, None);
        let zeros = if region == RegionClass::Outside {
            None
        } else {
            Some(params.zeros_of_f(k, c)?)
        };
        Ok(Self {
            params: params.clone(),
            k,
            c,
            mu,
            zeros,
            region,
        })
    }

    /// Refines the region with a known cycle speed.
    pub fn with_c_star(mut self, c_star: f64) -> Self {
        self.region = self.params.classify(self.k, self.c, Some(c_star));
        self
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        Self { mu, ..self.clone() }
    }

    pub fn require_zeros(&self, expected: &'static str) -> Result<Zeros> {
        self.zeros.ok_or(Error::RegionMismatch {
            k: self.k,
            c: self.c,
            region: self.region,
            expected,
        })
    }

    pub fn require_d1(&self) -> Result<(f64, f64, f64)> {
        match self.zeros {
            Some(Zeros { u1: Some(u1), u0, u2 }) if self.region.is_d1() => Ok((u1, u0, u2)),
            _ => Err(Error::RegionMismatch {
                k: self.k,
                c: self.c,
                region: self.region,
                expected: "D1",
            }),
        }
    }

    pub fn f(&self, u: f64) -> f64 {
        (self.k * u - self.params.ov.value(u) - self.c) / self.k
    }

    /// `f(base + s)` assuming `f(base) = 0`, without cancellation.
    pub fn f_from_zero(&self, base: f64, s: f64) -> f64 {
        (self.k * s - self.params.ov.increment(base, s)) / self.k
    }

    pub fn df(&self, u: f64) -> f64 {
        (self.k - self.params.ov.slope(u)) / self.k
    }

    pub fn h(&self, u: f64) -> f64 {
        self.df(u) + self.mu
    }

    pub fn g1(&self, u: f64) -> f64 {
        self.params.g1(u)
    }

    pub fn g2(&self, u: f64) -> f64 {
        self.params.g2(u)
    }

    /// `(du/dz, dw/dz)` of the planar system.
    pub fn vector_field(&self, u: f64, w: f64) -> Result<(f64, f64)> {
        if !(u > 0.0) {
            return Err(Error::NonPositiveHeadway(u));
        }
        Ok((w, self.g1(u) * self.f(u) + self.g2(u) * self.h(u) * w))
    }

    /// `-f'(u0)`, where the middle equilibrium has purely imaginary eigenvalues.
    pub fn hopf_mu(&self) -> Result<f64> {
        Ok(-self.df(self.require_zeros("D1 or D2")?.u0))
    }

    /// Angular frequency at the Hopf value.
    pub fn hopf_frequency(&self) -> Result<f64> {
        let u0 = self.require_zeros("D1 or D2")?.u0;
        Ok((-self.g1(u0) * self.df(u0)).sqrt())
    }

    pub fn equilibrium_eigen(&self, u_eq: f64) -> Result<EquilibriumEigen> {
        let fv = self.f(u_eq);
        if !(u_eq > 0.0) || fv.abs() > 1e-10 * (1.0 + u_eq) {
            return Err(Error::NotEquilibrium(u_eq, fv));
        }
        let (lm, lp) = planar_eigen(self.g2(u_eq) * self.h(u_eq), self.g1(u_eq) * self.df(u_eq));
        Ok(EquilibriumEigen {
            lambda_minus: lm,
            lambda_plus: lp,
            v_minus: unit_eigvec(lm),
            v_plus: unit_eigvec(lp),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{OvParams, Viscosity};

    fn mp() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn constants_and_speeds() {
        let p = mp();
        let cc = p.critical_constants().unwrap();
        assert!((cc.k_max - 1.50696).abs() < 1e-12);
        assert!((cc.k0 - 0.06646).abs() < 1e-4);
        assert!((cc.c0 - 0.0010870).abs() < 1e-6);
        assert!(cc.k0 < cc.k1 && cc.k1 < cc.k_max);
        let cs = p.critical_speeds(1.25).unwrap();
        // closed form: sech^2(beta (u - u_c)) = K / (V0 beta)
        let ov = OvParams::default();
        let x = (ov.v0 * ov.beta / 1.25).sqrt().acosh() / ov.beta;
        assert!((cs.u_peak.unwrap() - (ov.u_c - x)).abs() < 1e-13);
        assert!((cs.u_trough - (ov.u_c + x)).abs() < 1e-13);
        assert!((cs.c_trough - 0.0151).abs() < 5e-4);
        assert!((cs.c_peak.unwrap() - 0.0167).abs() < 5e-4);
        assert!(p.critical_speeds(2.0).is_err());
        assert!(p.critical_speeds(-1.0).is_err());
    }

    #[test]
    fn coalescence_near_max_slope() {
        let p = mp();
        let cs = p.critical_speeds(p.k_max() * (1.0 - 1e-10)).unwrap();
        assert!((cs.u_peak.unwrap() - 0.025).abs() < 1e-6);
        assert!((cs.u_trough - 0.025).abs() < 1e-6);
    }

    #[test]
    fn classification_examples() {
        let p = mp();
        assert_eq!(p.classify(1.25, 0.0163, Some(0.01611)), RegionClass::D1Above);
        assert_eq!(p.classify(1.25, 0.0155, Some(0.01611)), RegionClass::D1Below);
        assert_eq!(p.classify(1.25, 0.01611 + 1e-9, Some(0.01611)), RegionClass::D1Cycle);
        assert_eq!(p.classify(1.25, 0.0163, None), RegionClass::D1Unsplit);
        assert_eq!(p.classify(-1.0, p.c0() + 1.0, None), RegionClass::Outside);
        assert_eq!(p.outside_kind(-1.0, p.c0() + 1.0), Some(OutsideKind::Positive));
        let k1 = p.k1().unwrap();
        let k = 0.5 * (p.k0() + k1);
        assert_eq!(p.classify(k, p.c0(), None), RegionClass::D2);
        let cs = p.critical_speeds(k).unwrap();
        assert_eq!(p.classify(k, 0.5 * (cs.c_trough + p.c0()), None), RegionClass::D2);
        assert_eq!(p.classify(0.5 * p.k0(), p.c0() - 1e-5, None), RegionClass::D2);
    }

    #[test]
    fn zeros_at_cycle_speed() {
        let z = mp().zeros_of_f(1.25, 0.01611).unwrap();
        assert!((z.u1.unwrap() - 0.0166).abs() < 2e-4);
        assert!((z.u2 - 0.0344).abs() < 2e-4);
        let k = 0.5 * (mp().k0() + mp().k1().unwrap());
        let z = mp().zeros_of_f(k, mp().c0()).unwrap();
        assert!(z.u1.is_none() && z.u0 > 0.0);
    }

    #[test]
    fn lee_coefficients_ignore_tau() {
        for tau in [0.1, 0.5, 2.0] {
            let p = ModelParams::new(OvParams::default(), Viscosity::LeeEtAl, tau).unwrap();
            assert_eq!(p.g1(0.02), 6.0 / 0.0004);
            assert_eq!(p.g2(0.02), 3.0 / 0.02);
        }
        let p = ModelParams::new(OvParams::default(), Viscosity::Constant { kappa0: 1.0 / 7500.0 }, 0.5).unwrap();
        assert!((p.g1(0.03) - 15000.0).abs() < 1e-9);
    }

    #[test]
    fn hopf_pair_is_imaginary() {
        let ctx = WaveContext::new(&mp(), 1.25, 0.0163, 0.0).unwrap();
        let ctx = ctx.with_mu(ctx.hopf_mu().unwrap());
        let e = ctx.equilibrium_eigen(ctx.zeros.unwrap().u0).unwrap();
        assert!(e.lambda_plus.re.abs() < 1e-12);
        assert!((e.lambda_plus.im - ctx.hopf_frequency().unwrap()).abs() < 1e-9);
        assert!(ctx.equilibrium_eigen(0.02).is_err());
    }
}
