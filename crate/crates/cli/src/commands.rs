//! The single-purpose commands. Each writes its data files and a
//! `result.json` through the [`Run`] collector.

use rayon::prelude::*;
use serde::Serialize;
use travwave::continuation::{
    family_grid, periodic_family, trace_in_c, trace_in_k, validate_acn as acn_check, write_branches_csv, AcnCheck,
    Branch, BranchKind,
};
use travwave::model::{CriticalConstants, CriticalSpeeds, ModelParams, RegionClass, WaveContext};
use travwave::phase::{write_orbit_csv, PlanarField, Saddle, Sample};
use travwave::simulate::{
    count_pulses, estimate_k, estimate_wave_speed, free_flow_probe, micro_run, pde_run, write_micro_csv, write_pde_csv,
    FieldSnapshot, PdeRun,
};
use travwave::solve::{
    find_c_star, find_mu_b, find_mu_f, find_mu_per, find_mu_pul, find_periodic_with_period, orbit_balance, CycleResult,
    PeriodicResult, PulseOutcome, ShootOptions, ShootResult, WaveKind,
};
use travwave::stability::{
    curvature_at_zero, dispersion, is_unstable, short_wave_limit, stability_map, unstable_band, write_dispersion_csv,
    write_stability_map_csv, UniformState,
};

use crate::config::Sweep;
use crate::error::CliError;
use crate::manifest::Run;
use crate::svg::{Plot, Series};

pub const RESULT_FILE: &str = "result.json";

pub fn parse_kind<T: std::str::FromStr<Err = travwave::Error>>(s: &str) -> Result<T, CliError> {
    s.parse().map_err(|e: travwave::Error| CliError::Config(e.to_string()))
}

/// Cycle speed at `k`, or `None` where no cycle exists.
pub fn cycle_if_any(mp: &ModelParams, k: f64, opts: &ShootOptions) -> Result<Option<CycleResult>, CliError> {
    match find_c_star(mp, k, opts) {
        Ok(c) => Ok(Some(c)),
        Err(travwave::Error::Refused(_)) | Err(travwave::Error::FluxOutOfRange { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn context(run: &Run, with_cycle: bool) -> Result<(WaveContext, Option<CycleResult>), CliError> {
    let cfg = run.config();
    let mp = cfg.params()?;
    let (k, c) = (cfg.require_k()?, cfg.require_c()?);
    let ctx = WaveContext::new(&mp, k, c, 0.0)?;
    if !with_cycle || !ctx.region.is_d1() {
        return Ok((ctx, None));
    }
    let cyc = cycle_if_any(&mp, k, &cfg.shoot_options())?;
    let ctx = match &cyc {
        Some(cy) => ctx.with_c_star(cy.c_star),
        None => ctx,
    };
    Ok((ctx, cyc))
}

pub fn phase_plot(title: &str, curves: Vec<(String, &[Sample])>) -> Plot {
    curves.into_iter().fold(Plot::new(title, "u", "w"), |p, (label, s)| {
        p.with(Series::line(label, s.iter().map(|s| (s.u, s.w)).collect()))
    })
}

#[derive(Serialize)]
struct RegionsOut {
    constants: CriticalConstants,
    #[serde(rename = "K")]
    k: Option<f64>,
    speeds: Option<CriticalSpeeds>,
    c_star: Option<f64>,
    mu_star: Option<f64>,
    c: Option<f64>,
    region: Option<&'static str>,
    zeros: Option<travwave::model::Zeros>,
}

pub fn regions(run: &mut Run) -> Result<(), CliError> {
    let cfg = run.config().clone();
    let mp = cfg.params()?;
    let cc = mp.critical_constants()?;
    let mut out = RegionsOut {
        constants: cc,
        k: cfg.k,
        speeds: None,
        c_star: None,
        mu_star: None,
        c: cfg.c,
        region: None,
        zeros: None,
    };
    if let Some(k) = cfg.k {
        out.speeds = Some(mp.critical_speeds(k)?);
        if let Some(cy) = cycle_if_any(&mp, k, &cfg.shoot_options())? {
            out.c_star = Some(cy.c_star);
            out.mu_star = Some(cy.mu_star);
        }
        if let Some(c) = cfg.c {
            let r = mp.classify(k, c, out.c_star);
            out.region = Some(r.label());
            if r != RegionClass::Outside {
                out.zeros = Some(mp.zeros_of_f(k, c)?);
            }
        }
    }
    let n = 400;
    let rows: Vec<(f64, CriticalSpeeds)> = (1..n)
        .filter_map(|i| {
            let k = cc.k_max * i as f64 / n as f64;
            mp.critical_speeds(k).ok().map(|s| (k, s))
        })
        .collect();
    run.file("regions.csv", |w| {
        use std::io::Write;
        use travwave::output::{fmt_num, fmt_opt};
        writeln!(w, "K,c0,c_trough,c_peak")?;
        for (k, s) in &rows {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_num(*k),
                fmt_num(cc.c0),
                fmt_num(s.c_trough),
                fmt_opt(s.c_peak)
            )?;
        }
        Ok(())
    })?;
    run.svg("regions.svg", || {
        Plot::new("Region boundaries", "K", "c")
            .with(Series::line(
                "c_trough",
                rows.iter().map(|(k, s)| (*k, s.c_trough)).collect(),
            ))
            .with(Series::line(
                "c_peak",
                rows.iter().filter_map(|(k, s)| s.c_peak.map(|c| (*k, c))).collect(),
            ))
            .with(Series::line(
                "c0",
                vec![(rows[0].0, cc.c0), (rows[rows.len() - 1].0, cc.c0)],
            ))
    })?;
    run.json(RESULT_FILE, &out)
}

#[derive(Serialize)]
pub struct ShootOut {
    pub kind: &'static str,
    #[serde(rename = "K")]
    pub k: f64,
    pub c: f64,
    pub mu: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub orbit_file: String,
    pub region: &'static str,
    /// Relative size of the integral of the forcing along a pulse; it
    /// vanishes on closed orbits only.
    pub balance: Option<f64>,
}

pub fn write_shoot(run: &mut Run, ctx: &WaveContext, r: &ShootResult, stem: &str) -> Result<ShootOut, CliError> {
    let orbit_file = format!("{stem}.csv");
    run.file(&orbit_file, |w| write_orbit_csv(w, &r.orbit))?;
    run.svg(&format!("{stem}.svg"), || {
        phase_plot(
            &format!("{} orbit", r.kind.label()),
            vec![(r.kind.label().into(), &r.orbit)],
        )
    })?;
    let closed = matches!(r.kind, WaveKind::Pulse1 | WaveKind::Pulse2);
    let bal = closed.then(|| orbit_balance(&ctx.with_mu(r.mu), &[&r.halves[0].orbit, &r.halves[1].orbit]).relative());
    Ok(ShootOut {
        kind: r.kind.label(),
        k: ctx.k,
        c: ctx.c,
        mu: r.mu,
        residual: r.residual,
        bracket: r.bracket,
        orbit_file,
        region: ctx.region.label(),
        balance: bal,
    })
}

pub fn shoot(run: &mut Run) -> Result<(), CliError> {
    let kind: WaveKind = parse_kind(run.config().kind.as_deref().unwrap_or("back"))?;
    match kind {
        WaveKind::Pulse1 | WaveKind::Pulse2 => return pulse(run),
        WaveKind::Periodic => return periodic(run),
        _ => {}
    }
    let (ctx, _) = context(run, false)?;
    let opts = run.config().shoot_options();
    let r = if kind == WaveKind::Back {
        find_mu_b(&ctx, &opts)?
    } else {
        find_mu_f(&ctx, &opts)?
    };
    let out = write_shoot(run, &ctx, &r, "orbit")?;
    run.json(RESULT_FILE, &out)
}

#[derive(Serialize)]
struct Eigenpair {
    u: f64,
    lambda_minus: f64,
    lambda_plus: f64,
}

#[derive(Serialize)]
struct CycleOut {
    kind: &'static str,
    #[serde(rename = "K")]
    k: f64,
    c_star: f64,
    mu_star: f64,
    mismatch: f64,
    u1: Option<f64>,
    u0: f64,
    u2: f64,
    eigen: Vec<Eigenpair>,
    back_file: String,
    front_file: String,
}

pub fn cycle(run: &mut Run) -> Result<(), CliError> {
    let cfg = run.config().clone();
    let mp = cfg.params()?;
    let k = cfg.require_k()?;
    let cy = find_c_star(&mp, k, &cfg.shoot_options())?;
    let ctx = WaveContext::new(&mp, k, cy.c_star, cy.mu_star)?;
    let z = ctx.require_zeros("D1")?;
    let mut eigen = Vec::new();
    for u in [z.u1, Some(z.u2)].into_iter().flatten() {
        let (lm, lp) = ctx.saddle_eigen(u)?;
        eigen.push(Eigenpair {
            u,
            lambda_minus: lm,
            lambda_plus: lp,
        });
    }
    run.file("back.csv", |w| write_orbit_csv(w, &cy.back.orbit))?;
    run.file("front.csv", |w| write_orbit_csv(w, &cy.front.orbit))?;
    run.svg("cycle.svg", || {
        phase_plot(
            "Heteroclinic cycle",
            vec![("back".into(), &cy.back.orbit), ("front".into(), &cy.front.orbit)],
        )
    })?;
    run.json(
        RESULT_FILE,
        &CycleOut {
            kind: "cycle",
            k,
            c_star: cy.c_star,
            mu_star: cy.mu_star,
            mismatch: cy.mismatch,
            u1: z.u1,
            u0: z.u0,
            u2: z.u2,
            eigen,
            back_file: "back.csv".into(),
            front_file: "front.csv".into(),
        },
    )
}

pub fn pulse(run: &mut Run) -> Result<(), CliError> {
    let (ctx, _) = context(run, true)?;
    let opts = run.config().shoot_options();
    let kind = match run.config().kind.as_deref() {
        Some(s) => parse_kind::<WaveKind>(s)?,
        None if ctx.region == RegionClass::D1Above => WaveKind::Pulse1,
        None => WaveKind::Pulse2,
    };
    let saddle = match kind {
        WaveKind::Pulse1 => Saddle::Lower,
        WaveKind::Pulse2 => Saddle::Upper,
        other => {
            return Err(CliError::Config(format!(
                "pulse expects pulse1 or pulse2, got {}",
                other.label()
            )))
        }
    };
    match find_mu_pul(&ctx, saddle, &opts)? {
        PulseOutcome::Pulse(r) => {
            let out = write_shoot(run, &ctx, &r, "orbit")?;
            run.json(RESULT_FILE, &out)
        }
        PulseOutcome::Cycle { back, front } => {
            // on the cycle speed the answer is the pair of connections
            let b = write_shoot(run, &ctx, &back, "back")?;
            let f = write_shoot(run, &ctx, &front, "front")?;
            run.json(
                RESULT_FILE,
                &serde_json::json!({"kind": "cycle", "back": b, "front": f}),
            )
        }
    }
}

#[derive(Serialize)]
pub struct PeriodicOut {
    pub kind: &'static str,
    #[serde(rename = "K")]
    pub k: f64,
    pub c: f64,
    pub q: f64,
    pub offset: f64,
    pub mu: f64,
    pub period: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub orbit_file: String,
    pub region: &'static str,
    pub balance: f64,
}

pub fn write_periodic(
    run: &mut Run,
    ctx: &WaveContext,
    r: &PeriodicResult,
    stem: &str,
) -> Result<PeriodicOut, CliError> {
    let orbit_file = format!("{stem}.csv");
    run.file(&orbit_file, |w| write_orbit_csv(w, &r.orbit))?;
    run.svg(&format!("{stem}.svg"), || {
        phase_plot("Periodic orbit", vec![("periodic".into(), &r.orbit)])
    })?;
    let bal = orbit_balance(&ctx.with_mu(r.mu_per), &[&r.forward, &r.backward]);
    Ok(PeriodicOut {
        kind: "periodic",
        k: ctx.k,
        c: ctx.c,
        q: r.q,
        offset: r.offset,
        mu: r.mu_per,
        period: r.period,
        residual: r.residual,
        bracket: r.bracket,
        orbit_file,
        region: ctx.region.label(),
        balance: bal.relative(),
    })
}

/// Saddle whose homoclinic orbit bounds the periodic family in `region`.
pub fn family_saddle(region: RegionClass) -> Saddle {
    match region {
        RegionClass::D1Above | RegionClass::D1Cycle => Saddle::Lower,
        _ => Saddle::Upper,
    }
}

/// On the cycle speed itself both saddle sides are nearly connected and
/// long orbits are only reachable from the upper side, so the search runs
/// without the split.
pub fn periodic_by_period(
    mp: &ModelParams,
    ctx: &WaveContext,
    period: f64,
    tol: f64,
    opts: &ShootOptions,
) -> Result<(WaveContext, PeriodicResult), travwave::Error> {
    let ctx = if ctx.region == RegionClass::D1Cycle {
        WaveContext::new(mp, ctx.k, ctx.c, ctx.mu)?
    } else {
        ctx.clone()
    };
    let r = find_periodic_with_period(&ctx, family_saddle(ctx.region), period, tol, opts)?;
    Ok((ctx, r))
}

pub fn periodic(run: &mut Run) -> Result<(), CliError> {
    let (ctx, cyc) = context(run, true)?;
    let cfg = run.config().clone();
    let opts = cfg.shoot_options();
    if let Some(q) = cfg.q {
        let r = find_mu_per(&ctx, q, &opts)?;
        let out = write_periodic(run, &ctx, &r, "orbit")?;
        return run.json(RESULT_FILE, &out);
    }
    if let Some(period) = cfg.periodic.period {
        run.tolerance("period_tol", cfg.periodic.period_tol);
        let mp = cfg.params()?;
        let (ctx, r) = periodic_by_period(&mp, &ctx, period, cfg.periodic.period_tol, &opts)?;
        let out = write_periodic(run, &ctx, &r, "orbit")?;
        return run.json(RESULT_FILE, &out);
    }
    let grid = family_grid(&ctx, cfg.periodic.family_size)?;
    let mp = cfg.params()?;
    let br = periodic_family(&mp, ctx.k, ctx.c, cyc.map(|c| c.c_star), &grid, &opts)?;
    write_branches(run, &[br], "family", false)
}

#[derive(Serialize)]
struct BranchSummary {
    kind: &'static str,
    points: usize,
    gaps: Vec<f64>,
    truncated: Option<String>,
}

pub fn write_branches(run: &mut Run, branches: &[Branch], stem: &str, over_k: bool) -> Result<(), CliError> {
    run.file(&format!("{stem}.csv"), |w| write_branches_csv(branches, w))?;
    run.svg(&format!("{stem}.svg"), || branch_plot(branches, over_k))?;
    let summary: Vec<BranchSummary> = branches
        .iter()
        .map(|b| BranchSummary {
            kind: b.kind.label(),
            points: b.points.len(),
            gaps: b.gaps.clone(),
            truncated: b.truncated.clone(),
        })
        .collect();
    run.json(RESULT_FILE, &summary)
}

pub fn branch_plot(branches: &[Branch], over_k: bool) -> Plot {
    let (title, x, y) = if over_k {
        ("Branches with mu = 2 tau K - 1", "K", "c")
    } else if branches.iter().all(|b| b.kind == BranchKind::PeriodicFamily) {
        ("Periodic family", "max u", "mu")
    } else {
        ("Branches at fixed K", "c", "mu")
    };
    branches.iter().fold(Plot::new(title, x, y), |p, b| {
        let pts = b
            .points
            .iter()
            .map(|pt| {
                if over_k {
                    (pt.k, pt.c)
                } else if b.kind == BranchKind::PeriodicFamily {
                    (pt.max_u.unwrap_or(f64::NAN), pt.mu)
                } else {
                    (pt.c, pt.mu)
                }
            })
            .collect();
        p.with(Series::line(b.kind.label(), pts))
    })
}

pub fn branch(run: &mut Run) -> Result<(), CliError> {
    let cfg = run.config().clone();
    let mp = cfg.params()?;
    let opts = cfg.shoot_options();
    let kinds: Vec<BranchKind> = match cfg.kind.as_deref() {
        Some(s) => vec![parse_kind(s)?],
        None => vec![
            BranchKind::Back,
            BranchKind::Front,
            BranchKind::Pulse1,
            BranchKind::Pulse2,
            BranchKind::HopfLocus,
        ],
    };
    if kinds == [BranchKind::PeriodicFamily] {
        return periodic(run);
    }
    let branches: Vec<Result<Branch, travwave::Error>> = match cfg.branch.over {
        Sweep::C => {
            let n = cfg.branch.n_steps;
            let k = cfg.require_k()?;
            let range = cfg.branch.c_range.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
            kinds
                .par_iter()
                .map(|&kd| trace_in_c(&mp, k, kd, range, n, &opts))
                .collect()
        }
        Sweep::K => {
            let n = cfg.branch.k_steps;
            let cc = mp.critical_constants()?;
            let range = cfg.branch.k_range.unwrap_or((cc.k1, cc.k_max));
            let range = (
                range.0.max(cc.k1 + 1e-3 * (cc.k_max - cc.k1)),
                range.1.min(cc.k_max * (1.0 - 1e-3)),
            );
            kinds
                .par_iter()
                .map(|&kd| trace_in_k(&mp, kd, range, n, &opts))
                .collect()
        }
    };
    let branches = branches.into_iter().collect::<Result<Vec<_>, _>>()?;
    write_branches(run, &branches, "branch", cfg.branch.over == Sweep::K)
}

#[derive(Serialize)]
struct StabilityOut {
    rho_star: f64,
    v_star: f64,
    unstable: bool,
    band: Option<(f64, f64)>,
    curvature_at_zero: f64,
    short_wave_limit: f64,
    max_growth: f64,
    k_at_max_growth: f64,
}

pub fn stability(run: &mut Run) -> Result<(), CliError> {
    let cfg = run.config().clone();
    let mp = cfg.params()?;
    let sc = &cfg.stability;
    if sc.n_k < 1 || sc.n_rho < 1 || !(sc.k_max > 0.0) || !(sc.rho_range.0 > 0.0 && sc.rho_range.0 < sc.rho_range.1) {
        return Err(CliError::Config(
            "stability grids need positive sizes and an increasing density range".into(),
        ));
    }
    let us = UniformState::new(&mp, sc.rho_star)?;
    let pts: Vec<_> = (0..=sc.n_k)
        .map(|i| dispersion(&mp, &us, sc.k_max * i as f64 / sc.n_k as f64))
        .collect();
    let rhos: Vec<f64> = (0..=sc.n_rho)
        .map(|i| sc.rho_range.0 + (sc.rho_range.1 - sc.rho_range.0) * i as f64 / sc.n_rho as f64)
        .collect();
    let map = stability_map(&mp, &rhos)?;
    run.file("dispersion.csv", |w| write_dispersion_csv(&pts, w))?;
    run.file("stability_map.csv", |w| write_stability_map_csv(&map, w))?;
    run.svg("dispersion.svg", || {
        Plot::new(format!("Growth rate at rho* = {:.4}", sc.rho_star), "k", "Re lambda+").with(Series::line(
            "Re lambda+",
            pts.iter().map(|p| (p.k, p.lambda_plus.re)).collect(),
        ))
    })?;
    run.svg("stability_map.svg", || {
        Plot::new("Band of growing wavenumbers", "rho*", "k2").with(Series::line(
            "k2",
            map.iter().filter_map(|r| r.band.map(|b| (r.rho, b.1))).collect(),
        ))
    })?;
    let best = pts.iter().fold((0.0, f64::NEG_INFINITY), |b, p| {
        if p.lambda_plus.re > b.1 {
            (p.k, p.lambda_plus.re)
        } else {
            b
        }
    });
    run.json(
        RESULT_FILE,
        &StabilityOut {
            rho_star: sc.rho_star,
            v_star: us.v_star,
            unstable: is_unstable(&mp, sc.rho_star),
            band: unstable_band(&mp, sc.rho_star)?,
            curvature_at_zero: curvature_at_zero(&mp, sc.rho_star),
            short_wave_limit: short_wave_limit(&mp, sc.rho_star),
            max_growth: best.1,
            k_at_max_growth: best.0,
        },
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct PdeSummary {
    pub t_final: f64,
    pub snapshots: usize,
    pub pulses: usize,
    /// Largest relative deviation of the mass from its initial value.
    pub mass_drift: f64,
    pub c_estimate: Option<f64>,
    #[serde(rename = "K_estimate")]
    pub k_estimate: Option<f64>,
    pub failure: Option<String>,
}

/// Pulse count, mass drift and, when a pulse is present throughout the
/// final `window`, the speed and flux estimates.
pub fn summarize_pde(run: &PdeRun, length: f64, window: f64) -> PdeSummary {
    let snaps = &run.snapshots;
    let last = snaps.last().expect("initial snapshot is always stored");
    let m0 = snaps[0].mass();
    let mass_drift = snaps.iter().map(|s| ((s.mass() - m0) / m0).abs()).fold(0.0, f64::max);
    let recent: Vec<FieldSnapshot> = snaps.iter().filter(|s| s.t >= last.t - window).cloned().collect();
    let c = estimate_wave_speed(&recent, length).ok();
    let k = c.map(|c| estimate_k(last, free_flow_probe(last), c, length));
    PdeSummary {
        t_final: last.t,
        snapshots: snaps.len(),
        pulses: count_pulses(last),
        mass_drift,
        c_estimate: c,
        k_estimate: k,
        failure: run.failure.as_ref().map(|e| e.to_string()),
    }
}

pub fn simulate_pde(run: &mut Run) -> Result<(), CliError> {
    let cfg = run.config().clone();
    let mp = cfg.params()?;
    cfg.pde.validate()?;
    let res = pde_run(&mp, &cfg.pde)?;
    run.file("pde.csv", |w| write_pde_csv(&res.snapshots, w))?;
    let summary = summarize_pde(&res, cfg.pde.length, 100.0f64.min(0.5 * cfg.pde.t_end));
    run.svg("pde.svg", || density_plot(&res.snapshots))?;
    run.json(RESULT_FILE, &summary)?;
    match res.failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

/// Density profiles at up to five evenly spread snapshot times.
pub fn density_plot(snaps: &[FieldSnapshot]) -> Plot {
    let n = snaps.len();
    let picks: Vec<usize> = if n <= 5 {
        (0..n).collect()
    } else {
        (0..5).map(|i| i * (n - 1) / 4).collect()
    };
    picks.into_iter().fold(Plot::new("Density", "x", "rho"), |p, i| {
        let s = &snaps[i];
        p.with(Series::line(
            format!("t = {}", s.t),
            s.x.iter().copied().zip(s.rho.iter().copied()).collect(),
        ))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MicroSummary {
    pub t_final: f64,
    pub snapshots: usize,
    /// Largest deviation of the summed headways from the ring length.
    pub headway_sum_error: f64,
    pub min_headway: f64,
    pub max_headway: f64,
    pub failure: Option<String>,
}

pub fn summarize_micro(run: &travwave::simulate::MicroRun, length: f64) -> MicroSummary {
    let snaps = &run.snapshots;
    let last = snaps.last().expect("initial snapshot is always stored");
    MicroSummary {
        t_final: last.t,
        snapshots: snaps.len(),
        headway_sum_error: snaps
            .iter()
            .map(|s| (s.headways.iter().sum::<f64>() - length).abs())
            .fold(0.0, f64::max),
        min_headway: last.headways.iter().copied().fold(f64::INFINITY, f64::min),
        max_headway: last.headways.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        failure: run.failure.as_ref().map(|e| e.to_string()),
    }
}

pub fn simulate_micro(run: &mut Run) -> Result<(), CliError> {
    let cfg = run.config().clone();
    let mp = cfg.params()?;
    cfg.micro.validate()?;
    let res = micro_run(&mp, &cfg.micro)?;
    run.file("micro.csv", |w| write_micro_csv(&res.snapshots, w))?;
    let summary = summarize_micro(&res, cfg.micro.length);
    run.svg("micro.svg", || headway_plot(&res.snapshots))?;
    run.json(RESULT_FILE, &summary)?;
    match res.failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

pub fn headway_plot(snaps: &[travwave::simulate::ParticleSnapshot]) -> Plot {
    let last = snaps.last().expect("nonempty");
    let first = &snaps[0];
    let series =
        |s: &travwave::simulate::ParticleSnapshot| s.headways.iter().enumerate().map(|(i, h)| (i as f64, *h)).collect();
    Plot::new("Headways", "vehicle", "headway")
        .with(Series::dots(format!("t = {}", first.t), series(first)))
        .with(Series::dots(format!("t = {}", last.t), series(last)))
}

#[derive(Serialize)]
struct AcnOut {
    tolerance: f64,
    max_error: f64,
    checks: Vec<AcnCheck>,
}

pub fn validate_acn(run: &mut Run) -> Result<(), CliError> {
    let cfg = run.config().clone();
    let opts = cfg.shoot_options();
    let tol = cfg.acn.tolerance;
    run.tolerance("acn_tolerance", tol);
    let checks = cfg
        .acn
        .a
        .par_iter()
        .map(|&a| acn_check(a, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    let max_error = checks.iter().map(AcnCheck::max_error).fold(0.0, f64::max);
    run.json(
        RESULT_FILE,
        &AcnOut {
            tolerance: tol,
            max_error,
            checks: checks.clone(),
        },
    )?;
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !(c.max_error() < tol))
        .map(|c| format!("a = {}: error {} exceeds {tol}", c.a, c.max_error()))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Checks(failed))
    }
}
