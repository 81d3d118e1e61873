mod common;

use common::{mp, rng};
use rand::RngExt;
use travwave::model::OptimalVelocity;
use travwave::roots::brent;
use travwave::stability::{
    characteristic_residual, curvature_at_zero, dispersion, growth_rate, is_unstable, neutral_slope, short_wave_limit,
    stability_map, unstable_band, UniformState,
};

fn us(rho: f64) -> UniformState {
    UniformState::new(&mp(), rho).unwrap()
}

fn max_growth(rho: f64) -> f64 {
    let p = mp();
    let s = us(rho);
    (1..=4000)
        .map(|i| 10f64.powf(-4.0 + 7.0 * i as f64 / 4000.0))
        .flat_map(|k| [k, -k])
        .map(|k| growth_rate(&p, &s, k))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Density where `2 tau V'(1/rho) = 1` on the dense side of the inflection.
fn boundary_density() -> f64 {
    let p = mp();
    let uc = p.ov.inflection();
    let u = brent(|u| 2.0 * p.tau * p.ov.slope(u) - 1.0, 0.2 * uc, uc, 1e-16).unwrap();
    1.0 / u
}

#[test]
fn zero_wavenumber() {
    let p = mp();
    let d = dispersion(&p, &us(30.0), 0.0);
    assert_eq!(d.lambda_plus.norm(), 0.0);
    assert!((d.lambda_minus.re + 1.0 / p.tau).abs() < 1e-14 && d.lambda_minus.im == 0.0);
    assert!((us(30.0).v_star - p.ov.value(1.0 / 30.0)).abs() == 0.0);
}

#[test]
fn fast_branch_decays() {
    let p = mp();
    for rho in [5.0, 20.0, 33.0, 40.0, 80.0, 300.0] {
        for k in [0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0] {
            let d = dispersion(&p, &us(rho), k);
            assert!(d.lambda_minus.re < 0.0, "rho={rho} k={k}");
            assert!(d.lambda_plus.re >= d.lambda_minus.re);
        }
    }
}

#[test]
fn short_wave_limit_is_reached() {
    let p = mp();
    for rho in [10.0, 33.0, 60.0] {
        let lim = short_wave_limit(&p, rho);
        let at = growth_rate(&p, &us(rho), 1e3);
        assert!(lim < 0.0);
        assert!((at / lim - 1.0).abs() < 1e-2, "rho={rho}: {at} vs {lim}");
    }
}

#[test]
fn roots_satisfy_the_characteristic_equation() {
    let p = mp();
    let mut r = rng(5);
    for _ in 0..1000 {
        let rho = 10f64.powf(r.random_range(0.0..3.0));
        let k = 10f64.powf(r.random_range(-3.0..3.0)) * if r.random_bool(0.5) { 1.0 } else { -1.0 };
        let s = us(rho);
        let d = dispersion(&p, &s, k);
        assert!(
            characteristic_residual(&p, &s, k, d.lambda_plus) < 1e-10,
            "rho={rho} k={k}"
        );
        assert!(
            characteristic_residual(&p, &s, k, d.lambda_minus) < 1e-10,
            "rho={rho} k={k}"
        );
    }
}

#[test]
fn long_wave_expansion() {
    let p = mp();
    let h = 1e-4;
    for rho in [10.0, 25.0, 33.0, 40.0, 60.0] {
        let s = us(rho);
        let g = |k: f64| growth_rate(&p, &s, k);
        assert!(g(0.0).abs() < 1e-15);
        let d1 = (g(h) - g(-h)) / (2.0 * h);
        let d2 = (g(h) - 2.0 * g(0.0) + g(-h)) / (h * h);
        let exact = curvature_at_zero(&p, rho);
        assert!(d1.abs() < 1e-6 * exact.abs().max(1e-12), "rho={rho}: {d1}");
        assert!((d2 / exact - 1.0).abs() < 1e-3, "rho={rho}: {d2} vs {exact}");
        assert_eq!(exact > 0.0, is_unstable(&p, rho));
    }
}

#[test]
fn slope_at_the_band_edge() {
    let p = mp();
    for rho in [36.0, 40.0, 45.0] {
        let (k1, k2) = unstable_band(&p, rho).unwrap().expect("unstable density");
        assert!(k1 < 0.0 && k2 > 0.0);
        let s = us(rho);
        for k in [k1, k2] {
            let h = 1e-6 * k.abs();
            let fd = (growth_rate(&p, &s, k + h) - growth_rate(&p, &s, k - h)) / (2.0 * h);
            let exact = neutral_slope(&p, rho, k);
            assert!((fd / exact - 1.0).abs() < 1e-4, "rho={rho} k={k}: {fd} vs {exact}");
        }
        for i in 1..40 {
            let t = i as f64 / 40.0;
            assert!(growth_rate(&p, &s, t * k2) > 0.0);
            assert!(growth_rate(&p, &s, t * k1) > 0.0);
            assert!(growth_rate(&p, &s, k2 * (1.0 + t)) < 0.0);
            assert!(growth_rate(&p, &s, k1 * (1.0 + t)) < 0.0);
        }
    }
}

#[test]
fn marginal_density_is_flat_to_second_order() {
    let p = mp();
    let rho = boundary_density();
    assert!(curvature_at_zero(&p, rho).abs() < 1e-10);
    let s = us(rho);
    let g = |k: f64| growth_rate(&p, &s, k);
    let h = 2e-3;
    let d2 = (g(h) - 2.0 * g(0.0) + g(-h)) / (h * h);
    let d4 = (g(2.0 * h) - 4.0 * g(h) + 6.0 * g(0.0) - 4.0 * g(-h) + g(-2.0 * h)) / h.powi(4);
    let vp = p.ov.slope(1.0 / rho);
    let exact4 = -24.0 * vp * p.kappa(rho) * p.tau / (rho * rho);
    assert!(d2.abs() < 1e-6 * exact4.abs(), "{d2}");
    assert!(d4 < 0.0);
    assert!((d4 / exact4 - 1.0).abs() < 1e-2, "{d4} vs {exact4}");
}

#[test]
fn flag_matches_the_numerical_maximum() {
    let p = mp();
    let uc = p.ov.inflection();
    // 2 tau V'(u_c) = 1.507 > 1: long waves grow
    assert!(is_unstable(&p, 1.0 / uc));
    assert!(max_growth(1.0 / uc) > 0.0);
    // V' is nearly zero far from u_c
    assert!(!is_unstable(&p, 1.0 / (10.0 * uc)));
    assert!(max_growth(1.0 / (10.0 * uc)) <= 0.0);
    assert!(unstable_band(&p, 1.0 / (10.0 * uc)).unwrap().is_none());
}

#[test]
fn map_flips_where_the_criterion_crosses_one() {
    let p = mp();
    let rhos: Vec<f64> = (0..400).map(|i| 5.0 + 0.25 * i as f64).collect();
    let rows = stability_map(&p, &rhos).unwrap();
    for (row, &rho) in rows.iter().zip(&rhos) {
        let crit = 2.0 * p.tau * p.ov.slope(1.0 / rho);
        assert_eq!(row.unstable, crit > 1.0, "rho={rho}");
        assert_eq!(row.band.is_some(), row.unstable);
    }
    let flips = rows.windows(2).filter(|w| w[0].unstable != w[1].unstable).count();
    assert_eq!(flips, 2);
}

#[test]
fn nonpositive_density_is_rejected() {
    assert!(UniformState::new(&mp(), 0.0).is_err());
    assert!(UniformState::new(&mp(), -1.0).is_err());
}
