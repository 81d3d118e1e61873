mod common;

use common::{ctx, mp, random_d1, rng};
use rand::RngExt;
use travwave::model::WaveContext;
use travwave::ode::{integrate, Crossing, Event, OdeOptions, State};
use travwave::phase::{manifold_shoot, manifold_shoot_eps, w_at, Branch, PlanarField, Saddle, Terminal};
use travwave::solve::{find_mu_b, ShootOptions};

fn rhs(c: &WaveContext) -> impl Fn(f64, &State) -> State + '_ {
    move |_, y| {
        let (a, b) = c.vector_field(y[0], y[1]).unwrap_or((f64::NAN, f64::NAN));
        [a, b]
    }
}

#[test]
fn flow_is_reversible() {
    let c = ctx(1.25, 0.0163, 0.05);
    let z = c.zeros.unwrap();
    let y0 = [0.5 * (z.u1.unwrap() + z.u0), 0.01];
    let o = OdeOptions::default();
    let fw = integrate(rhs(&c), 0.0, y0, 0.05, &[], &o).unwrap();
    let bw = integrate(rhs(&c), 0.05, fw.y_end, 0.0, &[], &o).unwrap();
    assert!((bw.y_end[0] - y0[0]).abs() < 1e-8 && (bw.y_end[1] - y0[1]).abs() < 1e-8);
}

#[test]
fn small_loop_at_the_hopf_value() {
    let base = ctx(1.25, 0.0163, 0.0);
    let u0 = base.zeros.unwrap().u0;
    let c = base.with_mu(base.hopf_mu().unwrap());
    let omega = c.hopf_frequency().unwrap();
    let r = 1e-3;
    // full turn: w leaves zero negative, passes zero rising, then falls back to zero
    let ev = [Event::new(Crossing::Falling, |_, y: &State| y[1])];
    let tr = integrate(rhs(&c), 0.0, [u0 + r, 0.0], 50.0 / omega, &ev, &OdeOptions::default()).unwrap();
    let gap = (tr.y_end[0] - (u0 + r)).abs();
    assert!(gap < 1e-4, "return gap {gap}");
    let period = 2.0 * std::f64::consts::PI / omega;
    assert!((tr.z_end / period - 1.0).abs() < 0.05, "{} vs {period}", tr.z_end);
    // harmonic oracle over the first quarter turn
    let z = 0.25 * period;
    let y = tr.eval(z).unwrap();
    assert!((y[0] - (u0 + r * (omega * z).cos())).abs() < 0.1 * r);
    assert!((y[1] + r * omega * (omega * z).sin()).abs() < 0.1 * r * omega);
}

#[test]
fn back_manifold_lands_on_the_upper_saddle_at_its_mu() {
    let c = ctx(1.25, 0.0163, 0.0);
    let mu_b = find_mu_b(&c, &ShootOptions::default()).unwrap().mu;
    let h = manifold_shoot(&c.with_mu(mu_b), Saddle::Lower, Branch::Plus).unwrap();
    let u2 = c.zeros.unwrap().u2;
    assert!((h.landing.u - u2).abs() < 1e-6, "{:?}", h.landing);
    // the residual saddle divergence limits how small w can be at u2
    let w_max = h.orbit.samples(1e-2).iter().map(|s| s.w.abs()).fold(0.0, f64::max);
    assert!(h.landing.w.abs() < 1e-2 * w_max, "{} vs {w_max}", h.landing.w);
    let below = manifold_shoot(&c.with_mu(mu_b - 1e-6), Saddle::Lower, Branch::Plus).unwrap();
    let above = manifold_shoot(&c.with_mu(mu_b + 1e-6), Saddle::Lower, Branch::Plus).unwrap();
    assert!(below.landing.terminal == Terminal::Axis && below.landing.u < u2);
    assert!(above.landing.terminal == Terminal::Boundary && above.landing.w > 0.0);
}

#[test]
fn large_mu_carries_the_manifold_past_u2() {
    let c = ctx(1.25, 0.0163, 5.0);
    let h = manifold_shoot(&c, Saddle::Lower, Branch::Plus).unwrap();
    assert_eq!(h.landing.terminal, Terminal::Boundary);
    assert!(h.landing.w > 0.0);
}

#[test]
fn upper_unstable_manifold_stays_positive_in_d2() {
    let p = mp();
    let k = 0.5 * (p.k0() + p.k1().unwrap());
    let cs = p.critical_speeds(k).unwrap();
    let c = WaveContext::new(&p, k, 0.5 * (cs.c_trough + p.c0()), 0.0).unwrap();
    assert_eq!(c.region.label(), "D2");
    let c = c.with_mu(-WaveContext::df(&c, 0.0));
    let h = manifold_shoot(&c, Saddle::Upper, Branch::Minus).unwrap();
    let (lo, _) = h.orbit.u_range();
    assert!(lo > 0.0);
    if let Some(u) = h.landing_u() {
        assert!(u > 0.0);
    }
}

#[test]
fn w_at_origin_and_monotonicity() {
    let c = ctx(1.25, 0.0163, 0.0);
    let z = c.zeros.unwrap();
    let a = 0.5 * (z.u0 + z.u2);
    let mu_b = find_mu_b(&c, &ShootOptions::default()).unwrap().mu;
    let mu = mu_b + 0.01;
    let w = |cx: &WaveContext| {
        let h = manifold_shoot(cx, Saddle::Lower, Branch::Plus).unwrap();
        w_at(&h, a).unwrap()
    };
    let h = manifold_shoot(&c.with_mu(mu), Saddle::Lower, Branch::Plus).unwrap();
    assert_eq!(w_at(&h, h.origin_u).unwrap(), 0.0);
    assert!(w_at(&h, 1.0).is_err());
    let base = w(&c.with_mu(mu));
    assert!(w(&c.with_mu(mu + 1e-3)) > base);
    let shifted = WaveContext::new(&mp(), 1.25, 0.0163 + 1e-6, mu).unwrap();
    assert!(w(&shifted) < base);
}

#[test]
fn orbit_samples_satisfy_the_field() {
    let c = ctx(1.25, 0.0163, 0.06);
    let h = manifold_shoot(&c, Saddle::Lower, Branch::Plus).unwrap();
    let tr = &h.orbit.trajectory;
    let scale = h
        .orbit
        .samples(1e-2)
        .iter()
        .map(|s| c.forcing(s.u).abs())
        .fold(0.0, f64::max);
    let (z0, z1) = (tr.z0.min(tr.z_end), tr.z0.max(tr.z_end));
    let d = 1e-5 * (z1 - z0);
    let mut checked = 0;
    for s in h.orbit.samples(1e-2) {
        if s.z - d <= z0 || s.z + d >= z1 || s.w == 0.0 {
            continue;
        }
        let (ya, yb) = (tr.eval(s.z - d).unwrap(), tr.eval(s.z + d).unwrap());
        // d(w^2/2)/du along the orbit against g1 f + g2 h w
        let lhs = 0.5 * (yb[1] * yb[1] - ya[1] * ya[1]) / (yb[0] - ya[0]);
        let rhs = c.accel(h.orbit.anchor, h.orbit.trajectory.eval(s.z).unwrap()[0], s.w);
        assert!((lhs - rhs).abs() < 1e-6 * scale, "z={} {lhs} vs {rhs}", s.z);
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn landings_lie_in_their_segments() {
    let mut r = rng(11);
    for _ in 0..20 {
        let (k, cc) = random_d1(&mut r, 0.05);
        let mu = r.random_range(-0.2..0.3);
        let c = ctx(k, cc, mu);
        let z = c.zeros.unwrap();
        let u1 = z.u1.unwrap();
        for (s, b) in [
            (Saddle::Lower, Branch::Plus),
            (Saddle::Lower, Branch::Minus),
            (Saddle::Upper, Branch::Plus),
            (Saddle::Upper, Branch::Minus),
        ] {
            let h = manifold_shoot(&c, s, b).unwrap();
            if let Some(u) = h.landing_u() {
                let ok = match s {
                    Saddle::Lower => u >= z.u0 && u <= z.u2,
                    Saddle::Upper => u >= u1 && u <= z.u0,
                };
                assert!(ok, "K={k} c={cc} mu={mu} {s:?} {b:?} landed at {u}");
                assert!(h.landing.w.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn landing_is_insensitive_to_the_offset() {
    let c = ctx(1.25, 0.0163, -0.05);
    let span = c.zeros.unwrap().u2 - c.zeros.unwrap().u1.unwrap();
    for (s, b) in [(Saddle::Lower, Branch::Plus), (Saddle::Upper, Branch::Minus)] {
        let l: Vec<f64> = [1e-6, 1e-8, 1e-10]
            .iter()
            .map(|e| {
                manifold_shoot_eps(&c, s, b, e * span)
                    .unwrap()
                    .landing_u()
                    .expect("axis landing")
            })
            .collect();
        assert!((l[0] - l[2]).abs() < 1e-6, "{l:?}");
        assert!((l[1] - l[2]).abs() < 1e-6, "{l:?}");
    }
}
