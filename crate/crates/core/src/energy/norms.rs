//! Energies on `Sigma_t^u` and fluxes through `C_u`.

use serde::{Deserialize, Serialize};

use super::quadrature::{band_integral, cumulative_trapezoid, level_line_integral};
use super::words::{apply_frame_derivative, FrameDerivativeOp};
use crate::error::{Error, Result};
use crate::gas::Invariant;
use crate::geometry::{x_ring, Window};

/// Pointwise integrands at the evaluation level of a window.
#[derive(Debug, Clone)]
pub struct Densities {
    /// `1/2 c^-1 kappa (c^-1 kappa (L f)^2 + mu (X f)^2)`.
    pub e_out: Vec<f64>,
    /// `1/2 ((Lbar f)^2 + kappa^2 (X f)^2)`.
    pub e_in: Vec<f64>,
    /// `c^-1 kappa (L f)^2`.
    pub f_out: Vec<f64>,
    /// `c kappa (X f)^2`.
    pub f_in: Vec<f64>,
}

pub fn densities(win: &Window, per: &[Vec<f64>]) -> Densities {
    let lf = win.l_first(per);
    let lbar = win.lbar_first(per);
    let s = win.centre();
    let xf = s.foliation.xhat_of(&per[win.at]);
    let (c, kap, mu) = (&s.prim[0], &s.foliation.kappa, &s.foliation.mu);
    let n = c.len();
    let mut d = Densities { e_out: vec![0.0; n], e_in: vec![0.0; n], f_out: vec![0.0; n], f_in: vec![0.0; n] };
    for k in (0..n).filter(|&k| win.mask[k]) {
        let (l2, x2) = (lf[k] * lf[k], xf[k] * xf[k]);
        d.e_out[k] = 0.5 / c[k] * kap[k] * (kap[k] / c[k] * l2 + mu[k] * x2);
        d.e_in[k] = 0.5 * (lbar[k] * lbar[k] + kap[k] * kap[k] * x2);
        d.f_out[k] = kap[k] / c[k] * l2;
        d.f_in[k] = c[k] * kap[k] * x2;
    }
    d
}

/// Integrands of the special order-0 norm of `wbar`: energy, flux.
pub fn ring_densities(win: &Window) -> (Vec<f64>, Vec<f64>) {
    let wb = win.map(|s| s.inv[0].clone());
    let lw = win.l_first(&wb);
    let s = win.centre();
    let xw = x_ring(&win.stencil(), &s.inv[0]);
    let (c, kap) = (&s.prim[0], &s.foliation.kappa);
    let n = c.len();
    let (mut e, mut f) = (vec![0.0; n], vec![0.0; n]);
    for k in (0..n).filter(|&k| win.mask[k]) {
        let (l2, x2) = (lw[k] * lw[k], xw[k] * xw[k]);
        e[k] = 0.5 * (kap[k] * kap[k] / (c[k] * c[k]) * l2 + kap[k] * kap[k] * x2);
        f[k] = kap[k] / c[k] * l2 + c[k] * kap[k] * x2;
    }
    (e, f)
}

fn integrate(win: &Window, density: &[f64], u_lo: f64, levels: &[f64]) -> Vec<f64> {
    let (v, bad) = band_integral(&win.centre().foliation, density, u_lo, levels);
    if bad > 0 {
        eprintln!("warning: {bad} band cells with kappa <= 0 skipped at t = {}", win.time());
    }
    v
}

/// Outgoing energy of `per` (values on each slice) over `{u_lo <= u <= u_max}`.
pub fn energy_outgoing(win: &Window, per: &[Vec<f64>], u_lo: f64, u_max: f64) -> f64 {
    integrate(win, &densities(win, per).e_out, u_lo, &[u_max])[0]
}

pub fn energy_incoming(win: &Window, per: &[Vec<f64>], u_lo: f64, u_max: f64) -> f64 {
    integrate(win, &densities(win, per).e_in, u_lo, &[u_max])[0]
}

/// Line integrals `(int c^-1 kappa (L f)^2 ds, int c kappa (X f)^2 ds)` on `{u = level}`.
pub fn flux_lines(win: &Window, d: &Densities, level: f64) -> Result<(f64, f64)> {
    let s = win.centre();
    let g = &s.field.grid;
    let u = &s.foliation.u;
    Ok((
        level_line_integral(g, u, &win.mask, &d.f_out, level, win.time())?,
        level_line_integral(g, u, &win.mask, &d.f_in, level, win.time())?,
    ))
}

/// Which family a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    /// `E_n`, `F_n` of an invariant.
    Order,
    /// The special order-0 norm of `wbar`.
    Ring,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub t: f64,
    pub u: f64,
    pub psi: Invariant,
    pub norm: Norm,
    pub order: usize,
    pub e: f64,
    pub ebar: f64,
    pub f: f64,
    pub fbar: f64,
}

impl EnergyRow {
    pub fn energy(&self) -> f64 {
        self.e + self.ebar
    }

    pub fn flux(&self) -> f64 {
        self.f + self.fbar
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub epsilon: f64,
    pub u_lo: f64,
    pub levels: Vec<f64>,
    pub rows: Vec<EnergyRow>,
}

impl EnergyReport {
    pub fn find(&self, psi: Invariant, norm: Norm, order: usize, t: f64, u: f64) -> Option<&EnergyRow> {
        self.rows.iter().find(|r| {
            r.psi == psi && r.norm == norm && r.order == order && (r.t - t).abs() < 1e-9 && (r.u - u).abs() < 1e-9
        })
    }

    pub fn times(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self.rows.iter().map(|r| r.t).collect();
        t.sort_by(f64::total_cmp);
        t.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        t
    }

    /// One row per `(t, u, psi, norm, order)`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "u", "psi", "norm", "order", "E", "Ebar", "F", "Fbar"])?;
        for r in &self.rows {
            let norm = match r.norm {
                Norm::Order => "order",
                Norm::Ring => "ring",
            };
            w.write_record([
                r.t.to_string(),
                r.u.to_string(),
                r.psi.name().to_string(),
                norm.to_string(),
                r.order.to_string(),
                format!("{:e}", r.e),
                format!("{:e}", r.ebar),
                format!("{:e}", r.f),
                format!("{:e}", r.fbar),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

/// Streams windows in increasing time and accumulates fluxes from the first
/// one on.
#[derive(Debug, Clone)]
pub struct EnergyTracker {
    u_lo: f64,
    levels: Vec<f64>,
    max_order: usize,
    times: Vec<f64>,
    /// Per (psi, norm, order) key: line integrals per time and level.
    lines: Vec<Vec<Vec<(f64, f64)>>>,
    report: EnergyReport,
}

fn keys(max_order: usize) -> Vec<(Invariant, Norm, usize)> {
    let mut k = vec![(Invariant::Wbar, Norm::Ring, 0)];
    for psi in Invariant::ALL {
        for n in 0..=max_order {
            k.push((psi, Norm::Order, n));
        }
    }
    k
}

impl EnergyTracker {
    pub fn new(epsilon: f64, u_lo: f64, levels: Vec<f64>, max_order: usize) -> Result<Self> {
        if max_order > super::ORDER_CAP {
            return Err(Error::Config(format!("energy order {max_order} exceeds the cap {}", super::ORDER_CAP)));
        }
        if levels.iter().any(|&l| l <= u_lo) || levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("energy levels must increase and lie above the band floor".into()));
        }
        let nkeys = keys(max_order).len();
        Ok(Self {
            u_lo,
            levels: levels.clone(),
            max_order,
            times: Vec::new(),
            lines: vec![Vec::new(); nkeys],
            report: EnergyReport { epsilon, u_lo, levels, rows: Vec::new() },
        })
    }

    pub fn push(&mut self, win: &Window) -> Result<()> {
        let t = win.time();
        if self.times.last().is_some_and(|&p| t <= p) {
            return Err(Error::Precondition("windows must be pushed in increasing time".into()));
        }
        self.times.push(t);
        for (slot, (psi, norm, order)) in keys(self.max_order).into_iter().enumerate() {
            // Energy density, flux line integrals per level.
            let (e_parts, lines): (Vec<(f64, f64)>, Vec<(f64, f64)>) = match norm {
                Norm::Ring => {
                    let (e, f) = ring_densities(win);
                    let ep = integrate(win, &e, self.u_lo, &self.levels).into_iter().map(|v| (v, 0.0)).collect();
                    let g = &win.centre().field.grid;
                    let mut ln = Vec::new();
                    for &l in &self.levels {
                        ln.push((level_line_integral(g, &win.centre().foliation.u, &win.mask, &f, l, t)?, 0.0));
                    }
                    (ep, ln)
                }
                Norm::Order => {
                    let mut ep = vec![(0.0, 0.0); self.levels.len()];
                    let mut ln = vec![(0.0, 0.0); self.levels.len()];
                    for op in FrameDerivativeOp::all_of_order(order)? {
                        let per = apply_frame_derivative(&op, win, psi);
                        let d = densities(win, &per);
                        let eo = integrate(win, &d.e_out, self.u_lo, &self.levels);
                        let ei = integrate(win, &d.e_in, self.u_lo, &self.levels);
                        for (m, &l) in self.levels.iter().enumerate() {
                            ep[m].0 += eo[m];
                            ep[m].1 += ei[m];
                            let (a, b) = flux_lines(win, &d, l)?;
                            ln[m].0 += a;
                            ln[m].1 += b;
                        }
                    }
                    (ep, ln)
                }
            };
            self.lines[slot].push(lines);
            let hist = &self.lines[slot];
            for (m, &l) in self.levels.iter().enumerate() {
                let fo: Vec<f64> = hist.iter().map(|v| v[m].0).collect();
                let fi: Vec<f64> = hist.iter().map(|v| v[m].1).collect();
                let f = *cumulative_trapezoid(&self.times, &fo).last().unwrap();
                let fbar = *cumulative_trapezoid(&self.times, &fi).last().unwrap();
                self.report.rows.push(EnergyRow { t, u: l, psi, norm, order, e: e_parts[m].0, ebar: e_parts[m].1, f, fbar });
            }
        }
        Ok(())
    }

    pub fn report(&self) -> &EnergyReport {
        &self.report
    }

    pub fn into_report(self) -> EnergyReport {
        self.report
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordEnergy {
    pub word: String,
    pub e: f64,
    pub ebar: f64,
}

/// Per-word energies of order `n` and their total `E_n`.
pub fn energy_order_n(win: &Window, psi: Invariant, n: usize, u_lo: f64, u_max: f64) -> Result<(Vec<WordEnergy>, f64)> {
    let mut words = Vec::new();
    let mut total = 0.0;
    for op in FrameDerivativeOp::all_of_order(n)? {
        let per = apply_frame_derivative(&op, win, psi);
        let e = energy_outgoing(win, &per, u_lo, u_max);
        let ebar = energy_incoming(win, &per, u_lo, u_max);
        total += e + ebar;
        words.push(WordEnergy { word: op.to_string(), e, ebar });
    }
    Ok((words, total))
}

/// `(E0ring, line integral of the ring flux)` of `wbar` at one time.
pub fn ring_energy_0_wbar(win: &Window, u_lo: f64, u_max: f64) -> Result<(f64, f64)> {
    let (e, f) = ring_densities(win);
    let s = win.centre();
    let line = level_line_integral(&s.field.grid, &s.foliation.u, &win.mask, &f, u_max, win.time())?;
    Ok((integrate(win, &e, u_lo, &[u_max])[0], line))
}
