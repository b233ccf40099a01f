//! Conservative update with Rusanov or HLL fluxes.
//!
//! Rows (fixed `x2`) are processed in parallel. Every cell update reads the
//! previous stage only, and reductions are summed row by row in a fixed
//! order, so results do not depend on the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FlowField;
use crate::error::{Error, Result};
use crate::gas::PolytropicGas;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flux {
    Rusanov,
    Hll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Euler,
    Ssprk2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reconstruction {
    /// Piecewise constant: the first-order scheme.
    Constant,
    /// Minmod-limited linear reconstruction of `(rho, v1, v2)`.
    Muscl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub cfl: f64,
    pub flux: Flux,
    pub integrator: Integrator,
    pub reconstruction: Reconstruction,
    pub snapshot_times: Vec<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.45,
            flux: Flux::Rusanov,
            integrator: Integrator::Ssprk2,
            reconstruction: Reconstruction::Constant,
            snapshot_times: Vec::new(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 0.9) {
            return Err(Error::Config(format!("cfl = {} outside (0, 0.9]", self.cfl)));
        }
        Ok(())
    }
}

/// Cell primitives `(rho, v1, v2, p, c)`.
type Prim = [f64; 5];

/// Ghost states in `x1`, two layers per side, one entry per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundary {
    left: Vec<Prim>,
    right: Vec<Prim>,
}

impl Boundary {
    /// Freeze the edge columns of `field` as far-field states.
    pub fn frozen_from(field: &FlowField) -> Self {
        let g = &field.grid;
        let eos = Eos::new(field.gas);
        let left = (0..g.n2).map(|j| eos.prim(field, g.idx(0, j))).collect();
        let right = (0..g.n2).map(|j| eos.prim(field, g.idx(g.n1 - 1, j))).collect();
        Self { left, right }
    }
}

#[derive(Clone, Copy)]
struct Eos {
    gamma: f64,
    k0: f64,
    square: bool,
}

impl Eos {
    fn new(gas: PolytropicGas) -> Self {
        Self { gamma: gas.gamma(), k0: gas.k0(), square: gas.gamma() == 2.0 }
    }

    #[inline]
    fn pressure(&self, r: f64) -> f64 {
        if self.square {
            self.k0 * r * r
        } else {
            self.k0 * r.powf(self.gamma)
        }
    }

    #[inline]
    fn from_rv(&self, r: f64, v1: f64, v2: f64) -> Prim {
        let p = self.pressure(r);
        [r, v1, v2, p, (self.gamma * p / r).sqrt()]
    }

    #[inline]
    fn prim(&self, f: &FlowField, k: usize) -> Prim {
        let r = f.rho[k];
        self.from_rv(r, f.m1[k] / r, f.m2[k] / r)
    }
}

pub struct Solver {
    gas: PolytropicGas,
    config: SolverConfig,
    boundary: Boundary,
}

/// Time derivative of the conserved planes plus the net mass inflow rate
/// through the `x1` boundaries.
struct Rhs {
    d: [Vec<f64>; 3],
    inflow: f64,
}

impl Solver {
    pub fn new(gas: PolytropicGas, config: SolverConfig, boundary: Boundary) -> Result<Self> {
        config.validate()?;
        Ok(Self { gas, config, boundary })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Largest stable step for `field`.
    pub fn stable_dt(&self, field: &FlowField) -> f64 {
        let s = field.max_signal_speed();
        self.config.cfl * field.grid.dx1().min(field.grid.dx2()) / s.max(f64::MIN_POSITIVE)
    }

    pub fn step(&self, field: &FlowField, dt: f64) -> Result<FlowField> {
        Ok(self.step_with_inflow(field, dt)?.0)
    }

    /// One step, also returning the mass that entered through the `x1`
    /// boundaries during it.
    pub fn step_with_inflow(&self, field: &FlowField, dt: f64) -> Result<(FlowField, f64)> {
        if dt == 0.0 {
            return Ok((field.clone(), 0.0));
        }
        if !(dt > 0.0) {
            return Err(Error::Precondition(format!("time step {dt} must be non-negative")));
        }
        let area_row = field.grid.dx2();
        match self.config.integrator {
            Integrator::Euler => {
                let r = self.rhs(field);
                let out = axpy(field, 1.0, field, dt, &r, field.time + dt)?;
                Ok((out, dt * r.inflow * area_row))
            }
            Integrator::Ssprk2 => {
                let r0 = self.rhs(field);
                let u1 = axpy(field, 1.0, field, dt, &r0, field.time + dt)?;
                let r1 = self.rhs(&u1);
                // u2 = (u + u1 + dt L(u1)) / 2
                let mut out = axpy(&u1, 1.0, &u1, dt, &r1, field.time + dt)?;
                for (o, a) in [(&mut out.rho, &field.rho), (&mut out.m1, &field.m1), (&mut out.m2, &field.m2)] {
                    o.par_iter_mut().zip(a.par_iter()).for_each(|(o, a)| *o = 0.5 * (a + *o));
                }
                check_positive(&out)?;
                Ok((out, 0.5 * dt * (r0.inflow + r1.inflow) * area_row))
            }
        }
    }

    /// Advance to exactly `t_end`, calling `observe(old, new)` after each step.
    pub fn advance(
        &self,
        mut field: FlowField,
        t_end: f64,
        mut observe: impl FnMut(&FlowField, &FlowField) -> Result<()>,
    ) -> Result<FlowField> {
        while field.time < t_end {
            let mut dt = self.stable_dt(&field);
            let remaining = t_end - field.time;
            if dt >= remaining {
                dt = remaining;
            } else if dt > 0.5 * remaining {
                // Split the tail evenly instead of leaving a sliver step.
                dt = 0.5 * remaining;
            }
            let next = self.step(&field, dt)?;
            let next = if dt == remaining { FlowField { time: t_end, ..next } } else { next };
            observe(&field, &next)?;
            field = next;
        }
        Ok(field)
    }

    /// Snapshots at the configured times. With `horizon` beyond the last
    /// snapshot, the state at the horizon is appended.
    pub fn run(&self, field: FlowField, horizon: Option<f64>) -> Result<Vec<FlowField>> {
        let times = &self.config.snapshot_times;
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition("snapshot times must increase".into()));
        }
        if times.first().is_some_and(|&t| t < field.time) {
            return Err(Error::Precondition("snapshot before the initial time".into()));
        }
        let mut out = Vec::with_capacity(times.len() + 1);
        let mut field = field;
        for &t in times {
            field = self.advance(field, t, |_, _| Ok(()))?;
            out.push(field.clone());
        }
        match horizon {
            Some(h) if out.last().map_or(true, |f| h > f.time) => {
                field = self.advance(field, h, |_, _| Ok(()))?;
                out.push(field);
            }
            _ if out.is_empty() => out.push(field),
            _ => {}
        }
        Ok(out)
    }

    fn rhs(&self, field: &FlowField) -> Rhs {
        let g = field.grid;
        let (n1, n2) = (g.n1, g.n2);
        let eos = Eos::new(self.gas);
        let muscl = self.config.reconstruction == Reconstruction::Muscl;
        let flux = self.config.flux;
        let prim: Vec<Prim> = (0..g.len()).into_par_iter().map(|k| eos.prim(field, k)).collect();

        // Fluxes through the x2 faces; face j sits between rows j-1 and j.
        let mut gflux = vec![[0.0; 3]; g.len()];
        gflux.par_chunks_mut(n1).enumerate().for_each(|(j, row)| {
            let r = |d: isize| ((j as isize + d).rem_euclid(n2 as isize)) as usize * n1;
            let (rm2, rm1, r0, rp1) = (r(-2), r(-1), r(0), r(1));
            for (i, out) in row.iter_mut().enumerate() {
                let (a, b) = if muscl {
                    face_states(&eos, &prim[rm2 + i], &prim[rm1 + i], &prim[r0 + i], &prim[rp1 + i])
                } else {
                    (prim[rm1 + i], prim[r0 + i])
                };
                let f = numerical_flux(flux, &swap(&a), &swap(&b));
                *out = [f[0], f[2], f[1]];
            }
        });

        let (inv1, inv2) = (1.0 / g.dx1(), 1.0 / g.dx2());
        let mut d = [vec![0.0; g.len()], vec![0.0; g.len()], vec![0.0; g.len()]];
        let [d0, d1, d2] = &mut d;
        let mut inflow_rows = vec![0.0; n2];
        d0.par_chunks_mut(n1)
            .zip(d1.par_chunks_mut(n1))
            .zip(d2.par_chunks_mut(n1))
            .zip(inflow_rows.par_iter_mut())
            .enumerate()
            .for_each(|(j, (((o0, o1), o2), inflow))| {
                let base = j * n1;
                let lb = &self.boundary.left[j];
                let rb = &self.boundary.right[j];
                let cell = |i: isize| -> &Prim {
                    if i < 0 {
                        lb
                    } else if i as usize >= n1 {
                        rb
                    } else {
                        &prim[base + i as usize]
                    }
                };
                let mut fx = Vec::with_capacity(n1 + 1);
                for i in 0..=n1 as isize {
                    let (a, b) = if muscl {
                        face_states(&eos, cell(i - 2), cell(i - 1), cell(i), cell(i + 1))
                    } else {
                        (*cell(i - 1), *cell(i))
                    };
                    fx.push(numerical_flux(flux, &a, &b));
                }
                let next_row = ((j + 1) % n2) * n1;
                for i in 0..n1 {
                    let (gl, gr) = (&gflux[base + i], &gflux[next_row + i]);
                    o0[i] = -(fx[i + 1][0] - fx[i][0]) * inv1 - (gr[0] - gl[0]) * inv2;
                    o1[i] = -(fx[i + 1][1] - fx[i][1]) * inv1 - (gr[1] - gl[1]) * inv2;
                    o2[i] = -(fx[i + 1][2] - fx[i][2]) * inv1 - (gr[2] - gl[2]) * inv2;
                }
                *inflow = fx[0][0] - fx[n1][0];
            });
        Rhs { d, inflow: inflow_rows.iter().sum() }
    }
}

#[inline]
fn swap(p: &Prim) -> Prim {
    [p[0], p[2], p[1], p[3], p[4]]
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Left and right states at the face between `b` and `c`.
#[inline]
fn face_states(eos: &Eos, a: &Prim, b: &Prim, c: &Prim, d: &Prim) -> (Prim, Prim) {
    let mut l = [0.0; 3];
    let mut r = [0.0; 3];
    for q in 0..3 {
        l[q] = b[q] + 0.5 * minmod(b[q] - a[q], c[q] - b[q]);
        r[q] = c[q] - 0.5 * minmod(c[q] - b[q], d[q] - c[q]);
    }
    if l[0] <= 0.0 || r[0] <= 0.0 {
        return (*b, *c);
    }
    (eos.from_rv(l[0], l[1], l[2]), eos.from_rv(r[0], r[1], r[2]))
}

#[inline]
fn physical_flux(p: &Prim) -> [f64; 3] {
    let m = p[0] * p[1];
    [m, m * p[1] + p[3], m * p[2]]
}

#[inline]
fn conserved(p: &Prim) -> [f64; 3] {
    [p[0], p[0] * p[1], p[0] * p[2]]
}

/// Numerical flux normal to a face whose normal velocity is component 1.
#[inline]
fn numerical_flux(kind: Flux, a: &Prim, b: &Prim) -> [f64; 3] {
    let (fa, fb) = (physical_flux(a), physical_flux(b));
    let (ua, ub) = (conserved(a), conserved(b));
    match kind {
        Flux::Rusanov => {
            let s = (a[1].abs() + a[4]).max(b[1].abs() + b[4]);
            std::array::from_fn(|q| 0.5 * (fa[q] + fb[q]) - 0.5 * s * (ub[q] - ua[q]))
        }
        Flux::Hll => {
            let sl = (a[1] - a[4]).min(b[1] - b[4]);
            let sr = (a[1] + a[4]).max(b[1] + b[4]);
            if sl >= 0.0 {
                fa
            } else if sr <= 0.0 {
                fb
            } else {
                std::array::from_fn(|q| (sr * fa[q] - sl * fb[q] + sl * sr * (ub[q] - ua[q])) / (sr - sl))
            }
        }
    }
}

/// `alpha * x + dt * rhs`, checking positivity of the density.
fn axpy(template: &FlowField, alpha: f64, x: &FlowField, dt: f64, r: &Rhs, time: f64) -> Result<FlowField> {
    let comb = |a: &[f64], d: &[f64]| -> Vec<f64> { a.par_iter().zip(d.par_iter()).map(|(a, d)| alpha * a + dt * d).collect() };
    let out = FlowField {
        time,
        grid: template.grid,
        gas: template.gas,
        rho: comb(&x.rho, &r.d[0]),
        m1: comb(&x.m1, &r.d[1]),
        m2: comb(&x.m2, &r.d[2]),
    };
    check_positive(&out)?;
    Ok(out)
}

fn check_positive(f: &FlowField) -> Result<()> {
    if let Some(k) = f.rho.iter().position(|r| !(*r > 0.0)) {
        return Err(Error::NegativeDensity { i: k % f.grid.n1, j: k / f.grid.n1, t: f.time, rho: f.rho[k] });
    }
    Ok(())
}
