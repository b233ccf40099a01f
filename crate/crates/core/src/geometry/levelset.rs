//! Transport of the acoustical function.
//!
//! `u_t + v . grad u - c |grad u| = 0` with a local Lax-Friedrichs
//! Hamiltonian, ENO2 one-sided gradients and SSP-RK2 in time. The velocity
//! and sound speed are interpolated linearly in time between two flow states.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::euler2d::FlowField;
use crate::grid::Grid;

const CFL: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet {
    pub grid: Grid,
    pub time: f64,
    pub u: Vec<f64>,
}

/// `(c, v1, v2)` planes.
type Planes = [Vec<f64>; 3];

impl LevelSet {
    pub fn new(grid: Grid, time: f64, u: Vec<f64>) -> Result<Self> {
        if u.len() != grid.len() {
            return Err(Error::GridMismatch(format!("u has {} values, grid has {}", u.len(), grid.len())));
        }
        Ok(Self { grid, time, u })
    }

    fn stable_dt(&self, p: &Planes) -> f64 {
        let (h1, h2) = (self.grid.dx1(), self.grid.dx2());
        let rate = (0..self.grid.len())
            .into_par_iter()
            .map(|k| (p[1][k].abs() + p[0][k]) / h1 + (p[2][k].abs() + p[0][k]) / h2)
            .reduce(|| 0.0, f64::max);
        if rate > 0.0 {
            CFL / rate
        } else {
            f64::INFINITY
        }
    }

    /// Move `u` from `old.time` to `new.time`, sub-stepping if the flow step
    /// exceeds the level-set CFL limit.
    pub fn advance(&mut self, old: &FlowField, new: &FlowField) -> Result<()> {
        self.grid.check_same(&old.grid)?;
        self.grid.check_same(&new.grid)?;
        if (old.time - self.time).abs() > 1e-12 * old.time.abs().max(1.0) {
            return Err(Error::Precondition(format!("level set at t = {} but flow step starts at {}", self.time, old.time)));
        }
        let span = new.time - old.time;
        if span <= 0.0 {
            return Ok(());
        }
        let (pa, pb) = (old.primitive_planes(), new.primitive_planes());
        let dt_max = self.stable_dt(&pa).min(self.stable_dt(&pb));
        let steps = (span / dt_max).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        for s in 0..steps {
            let (a, b) = (s as f64 / steps as f64, (s + 1) as f64 / steps as f64);
            let p0 = if s == 0 { None } else { Some(lerp(&pa, &pb, a)) };
            let p1 = if s + 1 == steps { None } else { Some(lerp(&pa, &pb, b)) };
            self.rk2(p0.as_ref().unwrap_or(&pa), p1.as_ref().unwrap_or(&pb), dt);
        }
        self.time = new.time;
        Ok(())
    }

    fn rk2(&mut self, p0: &Planes, p1: &Planes, dt: f64) {
        let h0 = hamiltonian(&self.grid, &self.u, p0);
        let u1: Vec<f64> = self.u.iter().zip(&h0).map(|(u, h)| u - dt * h).collect();
        let h1 = hamiltonian(&self.grid, &u1, p1);
        self.u.par_iter_mut().zip(u1.par_iter().zip(&h1)).for_each(|(u, (a, h))| {
            *u = 0.5 * *u + 0.5 * (a - dt * h);
        });
    }
}

fn lerp(a: &Planes, b: &Planes, s: f64) -> Planes {
    let mix = |x: &Vec<f64>, y: &Vec<f64>| x.iter().zip(y).map(|(p, q)| (1.0 - s) * p + s * q).collect();
    [mix(&a[0], &b[0]), mix(&a[1], &b[1]), mix(&a[2], &b[2])]
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// ENO2 backward and forward differences at the centre of a 5-point window.
#[inline]
fn eno(w: [f64; 5], h: f64) -> (f64, f64) {
    let d2 = |a: f64, b: f64, c: f64| (a - 2.0 * b + c) / (h * h);
    let (l, m, r) = (d2(w[0], w[1], w[2]), d2(w[1], w[2], w[3]), d2(w[2], w[3], w[4]));
    let minus = (w[2] - w[1]) / h + 0.5 * h * minmod(l, m);
    let plus = (w[3] - w[2]) / h - 0.5 * h * minmod(m, r);
    (minus, plus)
}

/// Numerical Hamiltonian at every cell.
fn hamiltonian(grid: &Grid, u: &[f64], p: &Planes) -> Vec<f64> {
    let (n1, n2) = (grid.n1, grid.n2);
    let (h1, h2) = (grid.dx1(), grid.dx2());
    let mut out = vec![0.0; u.len()];
    out.par_chunks_mut(n1).enumerate().for_each(|(j, row)| {
        let base = j * n1;
        // Linear extrapolation past the x1 edges.
        let ux = |i: isize| -> f64 {
            if i < 0 {
                let (a, b) = (u[base], u[base + 1]);
                a + i as f64 * (b - a)
            } else if i >= n1 as isize {
                let (a, b) = (u[base + n1 - 1], u[base + n1 - 2]);
                a + (i - n1 as isize + 1) as f64 * (a - b)
            } else {
                u[base + i as usize]
            }
        };
        let rowk = |d: isize| ((j as isize + d).rem_euclid(n2 as isize)) as usize * n1;
        let rows = [rowk(-2), rowk(-1), base, rowk(1), rowk(2)];
        for (i, o) in row.iter_mut().enumerate() {
            let k = base + i;
            let ii = i as isize;
            let (a1, b1) = eno([ux(ii - 2), ux(ii - 1), ux(ii), ux(ii + 1), ux(ii + 2)], h1);
            let (a2, b2) = eno(rows.map(|r| u[r + i]), h2);
            let (c, v1, v2) = (p[0][k], p[1][k], p[2][k]);
            let (q1, q2) = (0.5 * (a1 + b1), 0.5 * (a2 + b2));
            let h = v1 * q1 + v2 * q2 - c * q1.hypot(q2);
            *o = h - 0.5 * (v1.abs() + c) * (b1 - a1) - 0.5 * (v2.abs() + c) * (b2 - a2);
        }
    });
    out
}

/// `u` at every snapshot time, starting from `u_init` on the first snapshot.
pub fn evolve_u(snapshots: &[FlowField], u_init: Vec<f64>) -> Result<Vec<Vec<f64>>> {
    let first = snapshots.first().ok_or_else(|| Error::Precondition("no snapshots".into()))?;
    let mut ls = LevelSet::new(first.grid, first.time, u_init)?;
    let mut out = vec![ls.u.clone()];
    for pair in snapshots.windows(2) {
        ls.advance(&pair[0], &pair[1])?;
        out.push(ls.u.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::{PolytropicGas, PrimitiveState};

    #[test]
    fn planar_front_in_uniform_flow() {
        let gas = PolytropicGas::new(2.0, 0.5).unwrap();
        let grid = Grid::new(64, 16, -1.0, 1.0).unwrap();
        let a = FlowField::uniform(0.0, grid, gas, PrimitiveState::new(1.0, 0.0, 0.0));
        let b = FlowField { time: 0.3, ..a.clone() };
        let u0: Vec<f64> = (0..grid.len()).map(|k| -grid.x1(k % grid.n1)).collect();
        let u = evolve_u(&[a, b], u0).unwrap();
        for k in 0..grid.len() {
            let exact = -grid.x1(k % grid.n1) + 0.3;
            assert!((u[1][k] - exact).abs() < 1e-12, "k = {k}: {} vs {exact}", u[1][k]);
        }
    }
}
