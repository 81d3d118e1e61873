mod common;

use common::{ctx, mp};
use proptest::prelude::*;
use travwave::continuation::{acn_damping, acn_exact, AcnKind};
use travwave::model::{OptimalVelocity, OvParams};
use travwave::phase::{manifold_shoot, w_at, Branch, Saddle};
use travwave::simulate::{micro_run, pde_run, MicroConfig, MicroInitial, PdeConfig, PdeInitial};
use travwave::solve::{find_mu_b, find_mu_f, ShootOptions};
use travwave::stability::{characteristic_residual, dispersion, UniformState};

/// A speed inside the three-zero band at `k`, a fraction `t` of the way up.
fn speed(k: f64, t: f64) -> f64 {
    let cs = mp().critical_speeds(k).unwrap();
    cs.c_lower + t * (cs.c_peak.unwrap() - cs.c_lower)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ov_is_increasing_with_consistent_derivatives(u in 1e-4f64..0.2, du in 1e-6f64..1e-2) {
        let ov = OvParams::default();
        prop_assert!(ov.value(u + du) > ov.value(u));
        let diff = ov.value(u + du) - ov.value(u);
        prop_assert!((ov.increment(u, du) - diff).abs() <= 1e-13 * diff.abs().max(1e-3));
        let h = 1e-7;
        let fd1 = (ov.value(u + h) - ov.value(u - h)) / (2.0 * h);
        let fd2 = (ov.slope(u + h) - ov.slope(u - h)) / (2.0 * h);
        prop_assert!((fd1 - ov.slope(u)).abs() < 1e-6);
        prop_assert!((fd2 - ov.curvature(u)).abs() < 1e-4 * ov.curvature(ov.u_c + 1.0 / ov.beta).abs());
    }

    #[test]
    fn scaled_nullcline_is_flux_minus_speed(k in 0.9f64..1.45, t in 0.0f64..1.0, u in 1e-3f64..0.1) {
        let c = ctx(k, speed(k, t), 0.0);
        let v = OvParams::default().value(u);
        prop_assert!((k * c.f(u) - (k * u - v - c.c)).abs() < 1e-15);
        let z = c.zeros.unwrap();
        let u1 = z.u1.unwrap();
        prop_assert!(u1 < z.u0 && z.u0 < z.u2);
        for r in [u1, z.u0, z.u2] {
            prop_assert!(c.f(r).abs() < 1e-14);
        }
        prop_assert!(c.df(u1) > 0.0 && c.df(z.u0) < 0.0 && c.df(z.u2) > 0.0);
    }

    #[test]
    fn dispersion_roots_solve_their_equation(lr in 0.0f64..3.0, lk in -3.0f64..3.0, neg in any::<bool>()) {
        let p = mp();
        let rho = 10f64.powf(lr);
        let k = 10f64.powf(lk) * if neg { -1.0 } else { 1.0 };
        let s = UniformState::new(&p, rho).unwrap();
        let d = dispersion(&p, &s, k);
        prop_assert!(characteristic_residual(&p, &s, k, d.lambda_plus) < 1e-10);
        prop_assert!(characteristic_residual(&p, &s, k, d.lambda_minus) < 1e-10);
        prop_assert!(d.lambda_plus.re >= d.lambda_minus.re);
    }

    #[test]
    fn acn_closed_forms_satisfy_the_cubic_equation(a in 0.02f64..0.48, z in -12.0f64..12.0) {
        for kind in [AcnKind::Het, AcnKind::Hom] {
            let m = acn_damping(a, kind).unwrap();
            let h = 1e-5;
            let (u, up) = acn_exact(a, z, kind).unwrap();
            let (ua, upa) = acn_exact(a, z - h, kind).unwrap();
            let (ub, upb) = acn_exact(a, z + h, kind).unwrap();
            prop_assert!(((ub - ua) / (2.0 * h) - up).abs() < 1e-8);
            let upp = (upb - upa) / (2.0 * h);
            prop_assert!((upp - (-m * up + u * (u - a) * (u - 1.0))).abs() < 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn headways_always_sum_to_the_ring_length(
        n in 10usize..80,
        amplitude in 0.0f64..0.3,
        mode in 1u32..4,
        length in 0.5f64..4.0,
    ) {
        let cfg = MicroConfig {
            n_vehicles: n,
            length,
            t_end: 20.0,
            snapshot_every: 2.0,
            initial: MicroInitial::Uniform { amplitude, mode },
            ..MicroConfig::ring_default()
        };
        let run = micro_run(&mp(), &cfg).unwrap();
        prop_assert!(run.failure.is_none());
        for s in &run.snapshots {
            let sum: f64 = s.headways.iter().sum();
            prop_assert!((sum - length).abs() < 1e-12 * length);
        }
    }

    #[test]
    fn density_mass_is_conserved(rho in 5.0f64..80.0, amplitude in 0.0f64..0.2, mode in 1u32..4) {
        let cfg = PdeConfig {
            length: 2.33,
            n: 64,
            k_trunc: 20,
            dt: 1e-3,
            t_end: 2.0,
            snapshot_every: 0.5,
            initial: PdeInitial::Cosine { rho_mean: rho, amplitude, mode },
        };
        let run = pde_run(&mp(), &cfg).unwrap();
        prop_assert!(run.failure.is_none());
        let m0 = run.snapshots[0].mass();
        prop_assert!((m0 - rho * 2.33).abs() < 1e-10 * m0);
        for s in &run.snapshots {
            prop_assert!(((s.mass() - m0) / m0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn back_slope_grows_with_mu_and_falls_with_c(k in 0.9f64..1.45, t in 0.1f64..0.9) {
        let c = ctx(k, speed(k, t), 0.0);
        let z = c.zeros.unwrap();
        let a = 0.5 * (z.u0 + z.u2);
        let mu = find_mu_b(&c, &ShootOptions::default()).unwrap().mu + 0.01;
        let w = |cx: &travwave::model::WaveContext| {
            w_at(&manifold_shoot(cx, Saddle::Lower, Branch::Plus).unwrap(), a).unwrap()
        };
        let base = w(&c.with_mu(mu));
        prop_assert!(w(&c.with_mu(mu + 1e-3)) > base);
        let dc = 1e-3 * (speed(k, 1.0) - speed(k, 0.0));
        prop_assert!(w(&ctx(k, c.c + dc, mu)) < base);
    }

    #[test]
    fn connections_move_apart_as_c_grows(k in 0.9f64..1.45, t in 0.1f64..0.85) {
        let opts = ShootOptions::default();
        let dc = 0.05 * (speed(k, 1.0) - speed(k, 0.0));
        let (a, b) = (ctx(k, speed(k, t), 0.0), ctx(k, speed(k, t) + dc, 0.0));
        prop_assert!(find_mu_b(&b, &opts).unwrap().mu > find_mu_b(&a, &opts).unwrap().mu);
        prop_assert!(find_mu_f(&b, &opts).unwrap().mu < find_mu_f(&a, &opts).unwrap().mu);
    }
}
