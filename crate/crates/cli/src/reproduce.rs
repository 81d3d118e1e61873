//! Figure reproduction with embedded checks. Each figure writes its data,
//! a `checks.json`, and fails with exit code 1 when any check fails.

use rayon::prelude::*;
use serde::Serialize;
use travwave::continuation::{
    family_grid, periodic_family, trace_in_c, trace_in_k, write_branches_csv, Branch, BranchKind,
};
use travwave::model::{ModelParams, WaveContext};
use travwave::phase::{write_orbit_csv, Saddle};
use travwave::simulate::{micro_run, pde_run, write_micro_csv, write_pde_csv};
use travwave::solve::{find_c_star, find_mu_b, find_mu_f, find_mu_per, find_mu_pul, PulseOutcome, ShootOptions};

use crate::commands::{
    branch_plot, density_plot, headway_plot, phase_plot, summarize_micro, summarize_pde, write_branches,
};
use crate::error::CliError;
use crate::manifest::Run;
use crate::svg::{Plot, Series};
use crate::Figure;

/// Flux and speeds used for the published diagrams.
const RING_K: f64 = 1.11672;
const RING_C: f64 = 0.013089412;
const DIAGRAM_K: f64 = 1.25;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    /// `|value - target| <= tolerance`.
    fn near(&mut self, name: &str, value: f64, target: f64, tolerance: f64) {
        self.0.push(Check {
            name: name.into(),
            value,
            target,
            tolerance,
            pass: (value - target).abs() <= tolerance,
        });
    }

    /// `|value / target - 1| <= tolerance`.
    fn relative(&mut self, name: &str, value: f64, target: f64, tolerance: f64) {
        self.0.push(Check {
            name: name.into(),
            value,
            target,
            tolerance,
            pass: ((value - target) / target).abs() <= tolerance,
        });
    }

    /// `value < bound`.
    fn below(&mut self, name: &str, value: f64, bound: f64) {
        self.0.push(Check {
            name: name.into(),
            value,
            target: bound,
            tolerance: 0.0,
            pass: value < bound,
        });
    }

    fn holds(&mut self, name: &str, pass: bool) {
        self.0.push(Check {
            name: name.into(),
            value: f64::from(u8::from(pass)),
            target: 1.0,
            tolerance: 0.0,
            pass,
        });
    }

    fn finish(self, run: &mut Run) -> Result<(), CliError> {
        run.json("checks.json", &self.0)?;
        let failed: Vec<String> = self
            .0
            .iter()
            .filter(|c| !c.pass)
            .map(|c| {
                format!(
                    "{}: value {} target {} tolerance {}",
                    c.name, c.value, c.target, c.tolerance
                )
            })
            .collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::Checks(failed))
        }
    }
}

fn monotone(v: &[f64], increasing: bool) -> bool {
    v.windows(2).all(|p| if increasing { p[1] > p[0] } else { p[1] < p[0] })
}

pub fn reproduce(run: &mut Run, figure: Figure) -> Result<(), CliError> {
    match figure {
        Figure::Fig1 => fig1(run),
        Figure::Fig2 => fig2(run),
        Figure::Fig3 => fig3(run),
        Figure::Fig4 => fig4(run),
    }
}

/// Ring simulations: one pulse forms, moving with the traveling wave speed.
fn fig1(run: &mut Run) -> Result<(), CliError> {
    let cfg = run.config().clone();
    let mp = cfg.params()?;
    cfg.pde.validate()?;
    cfg.micro.validate()?;
    let (pde, micro) = rayon::join(|| pde_run(&mp, &cfg.pde), || micro_run(&mp, &cfg.micro));
    let (pde, micro) = (pde?, micro?);
    run.file("fig1_pde.csv", |w| write_pde_csv(&pde.snapshots, w))?;
    run.file("fig1_micro.csv", |w| write_micro_csv(&micro.snapshots, w))?;
    run.svg("fig1_density.svg", || density_plot(&pde.snapshots))?;
    run.svg("fig1_headways.svg", || headway_plot(&micro.snapshots))?;
    let ps = summarize_pde(&pde, cfg.pde.length, 100.0f64.min(0.5 * cfg.pde.t_end));
    let ms = summarize_micro(&micro, cfg.micro.length);
    run.json("fig1.json", &serde_json::json!({"pde": ps, "micro": ms}))?;

    let mut ch = Checks::default();
    ch.holds("pde completed", pde.failure.is_none());
    ch.near("pde pulse count", ps.pulses as f64, 1.0, 0.0);
    ch.relative("wave speed", ps.c_estimate.unwrap_or(f64::NAN), 0.0131, 0.05);
    ch.relative("flux constant", ps.k_estimate.unwrap_or(f64::NAN), RING_K, 0.01);
    ch.below("relative mass drift", ps.mass_drift, 1e-8);
    run.tolerance("mass_drift", 1e-8);
    ch.holds("car-following completed", micro.failure.is_none());
    ch.below("headway sum error", ms.headway_sum_error, 1e-9 * cfg.micro.length);
    ch.finish(run)
}

fn diagram_k(run: &Run) -> f64 {
    run.config().k.unwrap_or(DIAGRAM_K)
}

/// `(c, mu)` diagram of backs, fronts, pulses and the Hopf locus at fixed K.
fn fig2(run: &mut Run) -> Result<(), CliError> {
    let cfg = run.config().clone();
    let mp = cfg.params()?;
    let opts = cfg.shoot_options();
    let k = diagram_k(run);
    let cs = mp.critical_speeds(k)?;
    let cy = find_c_star(&mp, k, &opts)?;
    let kinds = [
        BranchKind::Back,
        BranchKind::Front,
        BranchKind::Pulse1,
        BranchKind::Pulse2,
        BranchKind::HopfLocus,
    ];
    let n = cfg.branch.n_steps;
    let branches = kinds
        .par_iter()
        .map(|&kd| trace_in_c(&mp, k, kd, (f64::NEG_INFINITY, f64::INFINITY), n, &opts))
        .collect::<Result<Vec<Branch>, _>>()?;
    write_branches(run, &branches, "fig2", false)?;
    run.file("fig2_back.csv", |w| write_orbit_csv(w, &cy.back.orbit))?;
    run.file("fig2_front.csv", |w| write_orbit_csv(w, &cy.front.orbit))?;
    run.svg("fig2_cycle.svg", || {
        phase_plot(
            "Heteroclinic cycle",
            vec![("back".into(), &cy.back.orbit), ("front".into(), &cy.front.orbit)],
        )
    })?;

    let mut ch = Checks::default();
    if k == DIAGRAM_K {
        ch.near("c_m", cs.c_trough, 0.0151, 5e-4);
        ch.near("c_M", cs.c_peak.unwrap_or(f64::NAN), 0.0167, 5e-4);
        ch.near("c*", cy.c_star, 0.01611, 1e-4);
        ch.near("mu*", cy.mu_star, 0.0734, 5e-3);
    }
    for b in &branches {
        ch.holds(
            &format!("{} branch complete", b.kind.label()),
            b.truncated.is_none() && b.gaps.is_empty(),
        );
    }
    ch.holds("mu_b increasing in c", monotone(&branches[0].mus(), true));
    ch.holds("mu_f decreasing in c", monotone(&branches[1].mus(), false));
    let c_peak = cs.c_peak.unwrap_or(f64::NAN);
    let between = |c: f64, saddle: Saddle| -> Result<bool, CliError> {
        let ctx = WaveContext::new(&mp, k, c, 0.0)?.with_c_star(cy.c_star);
        let mb = find_mu_b(&ctx, &opts)?.mu;
        let mf = find_mu_f(&ctx, &opts)?.mu;
        let mp_ = match find_mu_pul(&ctx, saddle, &opts)? {
            PulseOutcome::Pulse(r) => r.mu,
            PulseOutcome::Cycle { .. } => return Ok(false),
        };
        Ok(mp_ > mb.min(mf) && mp_ < mb.max(mf))
    };
    for f in [0.25, 0.5, 0.75] {
        let c1 = cy.c_star + f * (c_peak - cy.c_star);
        ch.holds(
            &format!("mu_f < mu_pulse1 < mu_b at c = {c1}"),
            between(c1, Saddle::Lower)?,
        );
        let c2 = cs.c_lower + f * (cy.c_star - cs.c_lower);
        ch.holds(
            &format!("mu_b < mu_pulse2 < mu_f at c = {c2}"),
            between(c2, Saddle::Upper)?,
        );
    }
    ch.finish(run)
}

/// Periodic families at two speeds on either side of the cycle speed.
fn fig3(run: &mut Run) -> Result<(), CliError> {
    let cfg = run.config().clone();
    let mp = cfg.params()?;
    let opts = cfg.shoot_options();
    let k = diagram_k(run);
    let cy = find_c_star(&mp, k, &opts)?;
    let speeds = [0.0163, 0.0155];
    let size = cfg.periodic.family_size;
    let fams = speeds
        .par_iter()
        .map(|&c| -> Result<(f64, WaveContext, Branch), travwave::Error> {
            let ctx = WaveContext::new(&mp, k, c, 0.0)?.with_c_star(cy.c_star);
            let grid = family_grid(&ctx, size)?;
            Ok((
                c,
                ctx.clone(),
                periodic_family(&mp, k, c, Some(cy.c_star), &grid, &opts)?,
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let branches: Vec<Branch> = fams.iter().map(|f| f.2.clone()).collect();
    write_branches(run, &branches, "fig3", false)?;

    let mut ch = Checks::default();
    run.tolerance("hopf_limit_rel", 1e-2);
    for (c, ctx, b) in &fams {
        ch.holds(
            &format!("family at c = {c} complete"),
            b.truncated.is_none() && !b.points.is_empty(),
        );
        let Some(first) = b.points.first() else { continue };
        let hopf = ctx.hopf_mu()?;
        let linear_period = 2.0 * std::f64::consts::PI / ctx.hopf_frequency()?;
        ch.relative(&format!("c = {c}: mu near the Hopf value"), first.mu, hopf, 1e-2);
        ch.relative(
            &format!("c = {c}: period near 2 pi / omega0"),
            first.period.unwrap_or(f64::NAN),
            linear_period,
            1e-2,
        );
        let periods: Vec<f64> = b.points.iter().filter_map(|p| p.period).collect();
        ch.holds(
            &format!("c = {c}: period largest next to the saddle"),
            periods.last() >= periods.iter().max_by(|a, b| a.total_cmp(b)),
        );
        // phase portraits of a few members
        let picks: Vec<f64> = b
            .points
            .iter()
            .step_by((b.points.len() / 5).max(1))
            .filter_map(|p| p.q)
            .collect();
        let orbits = picks
            .par_iter()
            .map(|&q| find_mu_per(ctx, q, &opts))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, o) in orbits.iter().enumerate() {
            run.file(&format!("fig3_c{c}_orbit{i}.csv"), |w| write_orbit_csv(w, &o.orbit))?;
        }
        run.svg(&format!("fig3_c{c}.svg"), || {
            orbits
                .iter()
                .fold(Plot::new(format!("Periodic orbits at c = {c}"), "u", "w"), |p, o| {
                    p.with(Series::line(
                        format!("q = {:.5}", o.q),
                        o.orbit.iter().map(|s| (s.u, s.w)).collect(),
                    ))
                })
        })?;
    }
    ch.finish(run)
}

/// `(K, c)` diagram of the solutions with `mu = 2 tau K - 1`, and the
/// periodic orbit matching the ring simulation.
fn fig4(run: &mut Run) -> Result<(), CliError> {
    let cfg = run.config().clone();
    let mp = cfg.params()?;
    let opts = cfg.shoot_options();
    let cc = mp.critical_constants()?;
    let width = cc.k_max - cc.k1;
    let range = cfg
        .branch
        .k_range
        .unwrap_or((cc.k1 + 1e-3 * width, cc.k_max - 1e-3 * width));
    let n = cfg.branch.k_steps;
    let kinds = [
        BranchKind::Back,
        BranchKind::Front,
        BranchKind::Pulse1,
        BranchKind::Pulse2,
    ];
    let (branches, per) = rayon::join(
        || {
            kinds
                .par_iter()
                .map(|&kd| trace_in_k(&mp, kd, range, n, &opts))
                .collect::<Result<Vec<Branch>, _>>()
        },
        || ring_periodic(&mp, &opts),
    );
    let branches = branches?;
    let (ctx, per) = per?;
    run.file("fig4.csv", |w| write_branches_csv(&branches, w))?;
    run.file("fig4_periodic.csv", |w| write_orbit_csv(w, &per.orbit))?;
    run.svg("fig4.svg", || {
        branch_plot(&branches, true).with(Series::dots("periodic", vec![(ctx.k, ctx.c)]))
    })?;
    run.json(
        "fig4_periodic.json",
        &serde_json::json!({"K": ctx.k, "c": ctx.c, "q": per.q, "mu": per.mu_per, "period": per.period, "residual": per.residual}),
    )?;

    let mut ch = Checks::default();
    let target = mp.mu_of_flux(RING_K);
    run.tolerance("period_tol", 5e-4);
    ch.near("periodic mu", per.mu_per, 0.1164080, 1e-4);
    ch.near("periodic period", per.period, 2.3302, 1e-3);
    ch.near("periodic mu against 2 tau K - 1", per.mu_per, target, 4e-4);
    let back: Vec<f64> = branches[0].points.iter().map(|p| p.c).collect();
    ch.holds("back speed increasing in K", back.len() >= 2 && monotone(&back, true));
    for b in &branches {
        let ok = b.points.iter().all(|p| (p.mu - mp.mu_of_flux(p.k)).abs() < 1e-8);
        ch.holds(&format!("{} points satisfy mu = 2 tau K - 1", b.kind.label()), ok);
    }
    ch.finish(run)
}

fn ring_periodic(
    mp: &ModelParams,
    opts: &ShootOptions,
) -> Result<(WaveContext, travwave::solve::PeriodicResult), travwave::Error> {
    let cy = find_c_star(mp, RING_K, opts)?;
    let ctx = WaveContext::new(mp, RING_K, RING_C, 0.0)?.with_c_star(cy.c_star);
    crate::commands::periodic_by_period(mp, &ctx, 2.33022, 5e-4, opts)
}
