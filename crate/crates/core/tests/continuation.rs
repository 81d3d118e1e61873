mod common;

use common::{ctx, mp};
use travwave::continuation::{
    acn_damping, acn_exact, family_grid, homotopy_trace, hopf_locus, periodic_family, trace_in_c, validate_acn,
    AcnKind, BranchKind, HomotopyField,
};
use travwave::phase::Saddle;
use travwave::solve::{
    find_c_star, find_mu_b, find_mu_f, find_mu_per, find_mu_pul, PulseOutcome, ShootOptions, WaveKind,
};

const K: f64 = 1.25;

fn opts() -> ShootOptions {
    ShootOptions::default()
}

fn speeds() -> (f64, f64) {
    let cs = mp().critical_speeds(K).unwrap();
    (cs.c_lower, cs.c_peak.unwrap())
}

#[test]
fn back_and_front_branches_cross_at_the_cycle_speed() {
    let range = speeds();
    let back = trace_in_c(&mp(), K, BranchKind::Back, range, 60, &opts()).unwrap();
    let front = trace_in_c(&mp(), K, BranchKind::Front, range, 60, &opts()).unwrap();
    assert!(back.truncated.is_none() && front.truncated.is_none());
    assert_eq!(back.points.len(), front.points.len());
    let d: Vec<(f64, f64)> = back
        .points
        .iter()
        .zip(&front.points)
        .map(|(b, f)| (b.c, b.mu - f.mu))
        .collect();
    let i = d
        .windows(2)
        .position(|p| p[0].1 < 0.0 && p[1].1 >= 0.0)
        .expect("one crossing");
    assert_eq!(d.windows(2).filter(|p| (p[0].1 < 0.0) != (p[1].1 < 0.0)).count(), 1);
    // cubic through four neighbours, then Newton on it
    let s = &d[i - 1..i + 3];
    let poly = |c: f64| {
        s.iter()
            .enumerate()
            .map(|(j, &(cj, yj))| {
                yj * s
                    .iter()
                    .enumerate()
                    .filter(|(m, _)| *m != j)
                    .map(|(_, &(cm, _))| (c - cm) / (cj - cm))
                    .product::<f64>()
            })
            .sum::<f64>()
    };
    let mut c = d[i].0 - d[i].1 * (d[i + 1].0 - d[i].0) / (d[i + 1].1 - d[i].1);
    for _ in 0..20 {
        let h = 1e-9;
        c -= poly(c) / ((poly(c + h) - poly(c - h)) / (2.0 * h));
    }
    let cyc = find_c_star(&mp(), K, &opts()).unwrap();
    assert!((c - cyc.c_star).abs() < 1e-6, "{c} vs {}", cyc.c_star);
    for p in &back.points {
        assert!(p.diameter.unwrap() > 0.0);
    }
}

fn ratio_to_median(steps: &[f64]) -> f64 {
    let max = steps.iter().cloned().fold(0.0, f64::max);
    let mut s = steps.to_vec();
    s.sort_by(f64::total_cmp);
    max / s[s.len() / 2]
}

#[test]
fn branches_are_continuous() {
    let range = speeds();
    for kind in [
        BranchKind::Back,
        BranchKind::Front,
        BranchKind::Pulse1,
        BranchKind::Pulse2,
        BranchKind::HopfLocus,
    ] {
        let b = trace_in_c(&mp(), K, kind, range, 40, &opts()).unwrap();
        assert!(b.truncated.is_none(), "{kind:?}: {:?}", b.truncated);
        assert!(b.points.windows(2).all(|p| p[1].c > p[0].c));
        let steps: Vec<f64> = b.mus().windows(2).map(|p| (p[1] - p[0]).abs()).collect();
        // the branches end in square-root folds, so the outer steps are
        // compared with their neighbours and the rest with the median
        for i in 0..steps.len() {
            let nb = [i.wrapping_sub(1), i + 1]
                .iter()
                .filter_map(|&j| steps.get(j))
                .cloned()
                .fold(0.0, f64::max);
            assert!(steps[i] < 3.0 * nb, "{kind:?}: step {i} {} vs {nb}", steps[i]);
        }
        let m = steps.len() / 20;
        let r = ratio_to_median(&steps[m..steps.len() - m]);
        assert!(r < 5.0, "{kind:?}: {r}");
    }
}

#[test]
fn back_branch_is_monotone_and_spans_the_speed_interval() {
    let (c_m, c_big) = speeds();
    let b = trace_in_c(&mp(), K, BranchKind::Back, (c_m, c_big), 40, &opts()).unwrap();
    assert!(b.mus().windows(2).all(|p| p[1] > p[0]));
    let f = trace_in_c(&mp(), K, BranchKind::Front, (c_m, c_big), 40, &opts()).unwrap();
    assert!(f.mus().windows(2).all(|p| p[1] < p[0]));
    for br in [&b, &f] {
        assert!((br.points[0].c - c_m).abs() < 1e-5);
        assert!((br.points.last().unwrap().c - c_big).abs() < 1e-5);
    }
}

#[test]
fn pulse_approaches_the_cycle_from_above() {
    let cyc = find_c_star(&mp(), K, &opts()).unwrap();
    let (_, c_big) = speeds();
    let cycle: Vec<(f64, f64)> = cyc
        .back
        .orbit
        .iter()
        .chain(&cyc.front.orbit)
        .map(|s| (s.u, s.w))
        .collect();
    let dist = |a: &[(f64, f64)], b: &[(f64, f64)]| {
        let one = |p: &[(f64, f64)], q: &[(f64, f64)]| {
            p.iter()
                .map(|x| {
                    q.iter()
                        .map(|y| (x.0 - y.0).hypot(x.1 - y.1))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        one(a, b).max(one(b, a))
    };
    let mut prev: Option<(f64, f64)> = None;
    for j in 0..6 {
        let c = cyc.c_star + 0.2 * 0.5f64.powi(j) * (c_big - cyc.c_star);
        let x = ctx(K, c, 0.0).with_c_star(cyc.c_star);
        assert!(matches!(find_mu_pul(&x, Saddle::Upper, &opts()), Err(_)));
        let r = match find_mu_pul(&x, Saddle::Lower, &opts()).unwrap() {
            PulseOutcome::Pulse(r) => r,
            _ => unreachable!(),
        };
        let orbit: Vec<(f64, f64)> = r.orbit.iter().map(|s| (s.u, s.w)).collect();
        let now = ((r.mu - cyc.mu_star).abs(), dist(&orbit, &cycle));
        if let Some(p) = prev {
            assert!(now.0 < p.0 && now.1 < p.1, "j={j}: {now:?} after {p:?}");
        }
        prev = Some(now);
    }
}

#[test]
fn pulse_branch_shrinks_toward_the_peak_speed() {
    let (_, c_m) = speeds();
    let b = trace_in_c(&mp(), K, BranchKind::Pulse1, (0.0, c_m), 20, &opts()).unwrap();
    assert!(b.truncated.is_none(), "{:?}", b.truncated);
    let mu = b.mus();
    let first = mu[0];
    let last = *mu.last().unwrap();
    assert!(last.abs() < 0.1 * first.abs(), "{first} .. {last}");
    let d: Vec<f64> = b.points.iter().map(|p| p.diameter.unwrap()).collect();
    assert!(d.last().unwrap() < &(0.1 * d[0]));
}

#[test]
fn hopf_locus_vanishes_at_the_peak_speed() {
    let (c_lo, c_big) = speeds();
    let h = hopf_locus(&mp(), K, (c_lo, c_big), 50).unwrap();
    for p in &h.points {
        let c = ctx(K, p.c, 0.0);
        assert!((p.mu + c.df(p.u0)).abs() < 1e-14);
    }
    // u0 meets u1 in a fold, so -f'(u0) decays like the square root of the distance
    let w = c_big - c_lo;
    let mu: Vec<f64> = [1e-2, 1e-4, 1e-6, 1e-8]
        .iter()
        .map(|e| ctx(K, c_big - e * w, 0.0).hopf_mu().unwrap())
        .collect();
    for p in mu.windows(2) {
        assert!(p[1].abs() < p[0].abs());
        assert!((p[1] / p[0] - 0.1).abs() < 0.02, "{mu:?}");
    }
    assert!(mu[3].abs() < 1e-3 * h.points[0].mu.abs());
}

#[test]
fn homotopy_starts_at_the_closed_form_and_ends_at_the_shot() {
    let c = ctx(K, 0.0163, 0.0);
    let t = homotopy_trace(&c, WaveKind::Back, 10, &opts()).unwrap();
    assert!(
        (t.start().mu - t.predicted).abs() < 1e-6,
        "{} vs {}",
        t.start().mu,
        t.predicted
    );
    let direct = find_mu_b(&c, &opts()).unwrap().mu;
    assert!((t.end().mu - direct).abs() < 1e-8, "{} vs {direct}", t.end().mu);
    assert_eq!(t.end().phi, 1.0);
    let f = HomotopyField::new(&c, 0.0).unwrap();
    assert!((f.predicted_mu(WaveKind::Front).unwrap() + t.predicted).abs() < 1e-15);
}

#[test]
fn homotopy_front_reaches_the_front_shot() {
    let c = ctx(K, 0.0163, 0.0);
    let t = homotopy_trace(&c, WaveKind::Front, 10, &opts()).unwrap();
    assert!((t.start().mu - t.predicted).abs() < 1e-6);
    let direct = find_mu_f(&c, &opts()).unwrap().mu;
    assert!((t.end().mu - direct).abs() < 1e-8, "{} vs {direct}", t.end().mu);
}

fn acn_residual(a: f64, kind: AcnKind, z: f64) -> f64 {
    let m = acn_damping(a, kind).unwrap();
    let h = 1e-4;
    let u = |z: f64| acn_exact(a, z, kind).unwrap().0;
    let upp = (u(z + h) - 2.0 * u(z) + u(z - h)) / (h * h);
    let (u0, w0) = acn_exact(a, z, kind).unwrap();
    upp + m * w0 - u0 * (u0 - a) * (u0 - 1.0)
}

#[test]
fn acn_closed_forms_solve_their_equation() {
    for a in [0.1, 0.25, 0.4] {
        for z in [-6.0, -2.0, -0.5, 0.0, 0.7, 3.0] {
            assert!(acn_residual(a, AcnKind::Het, z).abs() < 1e-6, "het a={a} z={z}");
            assert!(acn_residual(a, AcnKind::Hom, z).abs() < 1e-6, "hom a={a} z={z}");
            let h = 1e-6;
            for kind in [AcnKind::Het, AcnKind::Hom] {
                let (_, w) = acn_exact(a, z, kind).unwrap();
                let fd = (acn_exact(a, z + h, kind).unwrap().0 - acn_exact(a, z - h, kind).unwrap().0) / (2.0 * h);
                assert!((w - fd).abs() < 1e-8);
            }
        }
        // the pulse peaks at z = 0 on the far zero of the cubic integral
        let peak = acn_exact(a, 0.0, AcnKind::Hom).unwrap().0;
        let oracle = (2.0 * (1.0 + a) - (2.0 * (2.0 - a) * (1.0 - 2.0 * a)).sqrt()) / 3.0;
        assert!((peak - oracle).abs() < 1e-12, "{peak} vs {oracle}");
    }
    assert!(acn_exact(0.5, 0.0, AcnKind::Hom).is_err());
    assert!(acn_damping(1.2, AcnKind::Het).is_err());
}

#[test]
fn acn_solvers_recover_the_closed_forms() {
    for a in [0.1, 0.25, 0.4] {
        let r = validate_acn(a, &opts()).unwrap();
        assert!(r.max_error() < 1e-6, "a={a}: {r:?}");
    }
}

#[test]
fn periodic_family_runs_from_hopf_to_the_pulse() {
    let cyc = find_c_star(&mp(), K, &opts()).unwrap();
    let c = 0.0163;
    let x = ctx(K, c, 0.0).with_c_star(cyc.c_star);
    let z = x.zeros.unwrap();
    let u1 = z.u1.unwrap();
    let grid = family_grid(&x, 24).unwrap();
    let fam = periodic_family(&mp(), K, c, Some(cyc.c_star), &grid, &opts()).unwrap();
    assert!(fam.truncated.is_none(), "{:?}", fam.truncated);
    let max_u: Vec<f64> = fam.points.iter().map(|p| p.max_u.unwrap()).collect();
    assert!(max_u.windows(2).all(|p| p[1] >= p[0]), "{max_u:?}");
    let mu = fam.mus();
    assert!(mu.windows(2).all(|p| p[1] < p[0]), "{mu:?}");

    let hopf = x.hopf_mu().unwrap();
    let near_u0 = find_mu_per(&x, z.u0 - 1e-4 * (z.u2 - u1), &opts()).unwrap();
    assert!(
        (near_u0.mu_per - hopf).abs() < 1e-3 * hopf.abs(),
        "{} vs {hopf}",
        near_u0.mu_per
    );
    let pul = match find_mu_pul(&x, Saddle::Lower, &opts()).unwrap() {
        PulseOutcome::Pulse(r) => r.mu,
        _ => unreachable!(),
    };
    let near_u1 = find_mu_per(&x, u1 + 1e-4 * (z.u0 - u1), &opts()).unwrap();
    assert!((near_u1.mu_per - pul).abs() < 1e-4, "{} vs {pul}", near_u1.mu_per);
}

#[test]
fn pulses_lie_between_front_and_back_across_k() {
    for k in [0.95, 1.05, 1.15, 1.3, 1.45] {
        let cyc = find_c_star(&mp(), k, &opts()).unwrap();
        let c_m = mp().critical_speeds(k).unwrap().c_peak.unwrap();
        let c = 0.5 * (cyc.c_star + c_m);
        let x = ctx(k, c, 0.0).with_c_star(cyc.c_star);
        let mb = find_mu_b(&x, &opts()).unwrap().mu;
        let mf = find_mu_f(&x, &opts()).unwrap().mu;
        let p = match find_mu_pul(&x, Saddle::Lower, &opts()).unwrap() {
            PulseOutcome::Pulse(r) => r.mu,
            _ => unreachable!(),
        };
        assert!(mf < p && p < mb, "K={k}: {mf} {p} {mb}");
    }
}
