//! One run: evolve the flow and `u` together, analyse windows as they
//! complete, keep only what later windows still need.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::energy::{check_data_predicates, fit_constants, gronwall_verify, EnergyReport, EnergyTracker, Norm, PredicateReport, Verdict};
use crate::error::{Error, Result};
use crate::euler2d::{init_perturbed_rarefaction, initial_acoustical_function, write_planes, Boundary, FlowField, NamedPlane, Solver};
use crate::gas::Invariant;
use crate::geometry::{
    commutation_residual_y, commutation_residual_z, sign_monitors, structure_fields, Band, LevelSet, SignReport, Window,
};
use crate::riemann::centered_fan;

/// Max and band `L1` norms of a residual field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub max: f64,
    pub l1: f64,
}

impl Norms {
    fn of(win: &Window, f: &[f64]) -> Self {
        let g = &win.centre().field.grid;
        let rows: Vec<f64> =
            (0..g.n2).map(|j| (0..g.n1).map(|i| g.idx(i, j)).filter(|&k| win.mask[k]).map(|k| f[k].abs()).sum()).collect();
        Self { max: win.band_max_abs(f), l1: rows.iter().sum::<f64>() * g.cell_area() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub t: f64,
    pub band_cells: usize,
    /// `max |kappa / t - 1|`.
    pub kappa_over_t: f64,
    pub that1_plus_1: f64,
    pub that2: f64,
    pub chi: f64,
    pub zeta: f64,
    pub eta: f64,
    pub yring: f64,
    pub zring: f64,
    pub chiring: f64,
    pub etaring: f64,
    /// `max |mu - c^2 / (d_t u + v . grad u)|`.
    pub mu_check: f64,
    pub y_residual: Norms,
    pub z_residual: Norms,
    pub l_kappa_residual: Norms,
    pub l_that_residual: Norms,
    pub m_prime: (f64, f64),
    pub signs: SignReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GronwallFit {
    pub psi: Invariant,
    pub norm: Norm,
    pub order: usize,
    /// Unconstrained least-squares `(A, B, C)`.
    pub fit: [f64; 3],
    /// Constants actually checked.
    pub constants: [f64; 3],
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: RunConfig,
    pub steps: usize,
    pub seconds: f64,
    /// `L1` distance of row 0 at the final time to the exact 1D fan.
    pub fan_l1_error: f64,
    pub x2_variation: f64,
    pub mass_change: f64,
    pub windows: Vec<WindowStats>,
    pub predicates: PredicateReport,
    pub energy: EnergyReport,
    pub gronwall: Vec<GronwallFit>,
}

impl RunResult {
    pub fn window_at(&self, t: f64) -> Option<&WindowStats> {
        self.windows.iter().find(|w| (w.t - t).abs() < 1e-9)
    }
}

fn window_stats(win: &Window) -> WindowStats {
    let s = win.centre();
    let t = s.time();
    let f = &s.foliation;
    let r = &s.ring;
    let sup = |v: &[f64]| win.band_max_abs(v);
    let shifted = |v: &[f64], a: f64, b: f64| v.iter().map(|x| a * x + b).collect::<Vec<f64>>();

    // mu = c^2 / (d_t u + v . grad u) from the transported u.
    let us = win.map(|s| s.foliation.u.clone());
    let [c, v1, v2] = &s.prim;
    let st = win.stencil();
    let (g1, g2) = st.grad(&us[win.at]);
    let times: Vec<f64> = win.slices.iter().map(|s| s.time()).collect();
    let w = crate::stencil::time_weights(&times, win.at);
    let mu_check: Vec<f64> = (0..c.len())
        .map(|k| {
            if !win.mask[k] {
                return 0.0;
            }
            let dt: f64 = w.iter().zip(&us).map(|(w, u)| w * u[k]).sum();
            f.mu[k] - c[k] * c[k] / (dt + v1[k] * g1[k] + v2[k] * g2[k])
        })
        .collect();

    let [rk, r1, r2, mp] = structure_fields(win);
    let rt: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| a.hypot(*b)).collect();
    WindowStats {
        t,
        band_cells: win.mask.iter().filter(|m| **m).count(),
        kappa_over_t: sup(&shifted(&f.kappa, 1.0 / t, -1.0)),
        that1_plus_1: sup(&shifted(&f.that1, 1.0, 1.0)),
        that2: sup(&f.that2),
        chi: sup(&f.chi),
        zeta: sup(&f.zeta),
        eta: sup(&f.eta),
        yring: sup(&r.yring),
        zring: sup(&r.zring),
        chiring: sup(&r.chiring),
        etaring: sup(&r.etaring),
        mu_check: sup(&mu_check),
        y_residual: Norms::of(win, &commutation_residual_y(win)),
        z_residual: Norms::of(win, &commutation_residual_z(win)),
        l_kappa_residual: Norms::of(win, &rk),
        l_that_residual: Norms::of(win, &rt),
        m_prime: win.band_range(&mp),
        signs: sign_monitors(win),
    }
}

/// `L1` error of row 0 against the exact fan cut at `u_left`.
fn fan_error(cfg: &RunConfig, field: &FlowField) -> Result<f64> {
    let fan = centered_fan(field.gas, cfg.v0, cfg.c0)?;
    let g = &field.grid;
    let t = field.time;
    let mut err = 0.0;
    for i in 0..g.n1 {
        let xi = (g.x1(i) / t).max(fan.head() - cfg.u_left);
        let ex = fan.at_slope(xi);
        let s = field.primitive(i, 0);
        err += (s.c - ex.c).abs() + (s.v1 - ex.v).abs();
    }
    Ok(err * g.dx1())
}

/// Execute one run and its analyses, optionally writing window snapshots
/// with their derived planes under `out`.
pub fn execute(cfg: &RunConfig, out: Option<&Path>) -> Result<RunResult> {
    cfg.validate()?;
    let clock = Instant::now();
    let gas = cfg.gas()?;
    let grid = cfg.grid()?;
    let spec = cfg.perturbation();
    let field0 = init_perturbed_rarefaction(gas, grid, cfg.delta, cfg.fan(), &spec)?;
    let mass0 = field0.mass();
    let u0 = initial_acoustical_function(&grid, cfg.delta, cfg.fan(), &spec);
    let solver = Solver::new(gas, cfg.solver.clone(), Boundary::frozen_from(&field0))?;
    let band = Band { u_lo: cfg.analysis.u_lo, u_hi: cfg.u_star + cfg.analysis.band_pad };

    let centres = cfg.analysis_times();
    let wins: Vec<([f64; 3], usize)> = centres.iter().map(|&t| cfg.window_times(t)).collect();
    let mut times: Vec<f64> = wins.iter().flat_map(|(w, _)| w.iter().copied()).collect();
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut ls = LevelSet::new(grid, cfg.delta, u0)?;
    let mut field = field0;
    let mut steps = 0usize;
    let mut buffer: Vec<(FlowField, Vec<f64>)> = Vec::new();
    let mut stats = Vec::new();
    let mut tracker = EnergyTracker::new(cfg.epsilon, cfg.analysis.u_lo, cfg.levels(), cfg.analysis.max_order)?;
    let mut predicates = None;
    let mut next = 0usize;

    for &ts in &times {
        if ts > field.time {
            field = solver.advance(field, ts, |a, b| {
                steps += 1;
                ls.advance(a, b)
            })?;
        }
        buffer.push((field.clone(), ls.u.clone()));
        while next < wins.len() && (wins[next].0[2] - ts).abs() < 1e-12 {
            let (wt, at) = wins[next];
            let pick = |t: f64| buffer.iter().find(|(f, _)| (f.time - t).abs() < 1e-12).ok_or_else(|| Error::Precondition(format!("missing snapshot at t = {t}")));
            let mut fs = Vec::new();
            let mut us = Vec::new();
            for t in wt {
                let (f, u) = pick(t)?;
                fs.push(f.clone());
                us.push(u.clone());
            }
            let win = Window::new(&fs, &us, at, band)?;
            if next == 0 {
                predicates = Some(check_data_predicates(
                    &win,
                    cfg.c0,
                    cfg.epsilon,
                    cfg.delta,
                    cfg.analysis.predicate_cap,
                    cfg.analysis.predicate_floor,
                ));
            }
            stats.push(window_stats(&win));
            tracker.push(&win)?;
            if let Some(dir) = out.filter(|_| cfg.write_snapshots) {
                let s = win.centre();
                let mut planes = s.foliation.planes();
                planes.extend(s.ring.planes());
                let [rk, r1, r2, mp] = structure_fields(&win);
                for (name, data) in [("l_kappa_residual", rk), ("l_that1_residual", r1), ("l_that2_residual", r2), ("m_prime", mp)] {
                    planes.push(NamedPlane { name: name.into(), data });
                }
                write_planes(&dir.join(format!("window_t{:.4}.rwl", s.time())), &s.field, &planes)?;
            }
            next += 1;
            // Only snapshots of later windows are kept.
            let keep = wins.get(next).map_or(f64::INFINITY, |w| w.0[0]);
            buffer.retain(|(f, _)| f.time >= keep - 1e-12);
        }
    }

    let energy = tracker.into_report();
    let gronwall = fit_measured(&energy);
    Ok(RunResult {
        config: cfg.clone(),
        steps,
        seconds: clock.elapsed().as_secs_f64(),
        fan_l1_error: fan_error(cfg, &field)?,
        x2_variation: field.x2_variation(),
        mass_change: field.mass() - mass0,
        windows: stats,
        predicates: predicates.expect("at least one window"),
        energy,
        gronwall,
    })
}

/// Fit and check the refined Gronwall hypothesis on the measured order-1
/// norms and the special order-0 norm of `wbar`.
fn fit_measured(rep: &EnergyReport) -> Vec<GronwallFit> {
    let times = rep.times();
    let mut keys: Vec<(Invariant, Norm, usize)> = Invariant::ALL.iter().map(|&p| (p, Norm::Order, 1)).collect();
    keys.push((Invariant::Wbar, Norm::Ring, 0));
    let mut out = Vec::new();
    for (psi, norm, order) in keys {
        let grab = |f: fn(&crate::energy::EnergyRow) -> f64| -> Option<Vec<Vec<f64>>> {
            times.iter().map(|&t| rep.levels.iter().map(|&u| rep.find(psi, norm, order, t, u).map(f)).collect()).collect()
        };
        let (Some(e), Some(f)) = (grab(|r| r.energy()), grab(|r| r.flux())) else { continue };
        let res = fit_constants(&times, &rep.levels, &e, &f).and_then(|(inst, fit)| {
            let v = gronwall_verify(&inst);
            Ok((inst, fit, v))
        });
        out.push(match res {
            Ok((inst, fit, v)) => GronwallFit {
                psi,
                norm,
                order,
                fit,
                constants: [inst.a, inst.b, inst.c],
                error: v.as_ref().err().map(|e| e.to_string()),
                verdict: v.ok(),
            },
            Err(e) => GronwallFit { psi, norm, order, fit: [0.0; 3], constants: [0.0; 3], verdict: None, error: Some(e.to_string()) },
        });
    }
    out
}
