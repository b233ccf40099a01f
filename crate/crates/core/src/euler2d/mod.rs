//! Finite-volume solver for 2D isentropic Euler on the periodic tube.

mod diagnostics;
mod init;
mod io;
mod solver;

pub use diagnostics::{transport_residual, vorticity};
pub use init::{initial_acoustical_function, init_perturbed_rarefaction, Envelope, FanData, Mode, ModeKind, PerturbationSpec};
pub use io::{read_planes, read_snapshot, write_planes, write_snapshot, NamedPlane};
pub use solver::{Boundary, Flux, Integrator, Reconstruction, Solver, SolverConfig};

use crate::gas::{PolytropicGas, PrimitiveState, RiemannInvariants};
use crate::grid::Grid;

/// Conserved variables `(rho, rho v1, rho v2)` on a grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    pub time: f64,
    pub grid: Grid,
    pub gas: PolytropicGas,
    pub rho: Vec<f64>,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
}

impl FlowField {
    pub fn from_primitive(time: f64, grid: Grid, gas: PolytropicGas, mut f: impl FnMut(f64, f64) -> PrimitiveState) -> Self {
        let n = grid.len();
        let (mut rho, mut m1, mut m2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for j in 0..grid.n2 {
            for i in 0..grid.n1 {
                let s = f(grid.x1(i), grid.x2(j));
                let k = grid.idx(i, j);
                let r = gas.density_unchecked(s.c);
                rho[k] = r;
                m1[k] = r * s.v1;
                m2[k] = r * s.v2;
            }
        }
        Self { time, grid, gas, rho, m1, m2 }
    }

    pub fn uniform(time: f64, grid: Grid, gas: PolytropicGas, s: PrimitiveState) -> Self {
        Self::from_primitive(time, grid, gas, |_, _| s)
    }

    #[inline]
    pub fn primitive_at(&self, k: usize) -> PrimitiveState {
        let r = self.rho[k];
        if r == 0.0 {
            return PrimitiveState::vacuum(0.0);
        }
        PrimitiveState::new(self.gas.sound_speed_unchecked(r), self.m1[k] / r, self.m2[k] / r)
    }

    pub fn primitive(&self, i: usize, j: usize) -> PrimitiveState {
        self.primitive_at(self.grid.idx(i, j))
    }

    /// Planes `(c, v1, v2)`.
    pub fn primitive_planes(&self) -> [Vec<f64>; 3] {
        let n = self.grid.len();
        let (mut c, mut v1, mut v2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for k in 0..n {
            let s = self.primitive_at(k);
            c[k] = s.c;
            v1[k] = s.v1;
            v2[k] = s.v2;
        }
        [c, v1, v2]
    }

    /// Planes `(wbar, w, psi2)`.
    pub fn invariant_planes(&self) -> [Vec<f64>; 3] {
        let n = self.grid.len();
        let (mut a, mut b, mut p) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for k in 0..n {
            let RiemannInvariants { wbar, w, psi2 } = self.gas.to_invariants(self.primitive_at(k));
            a[k] = wbar;
            b[k] = w;
            p[k] = psi2;
        }
        [a, b, p]
    }

    pub fn max_signal_speed(&self) -> f64 {
        (0..self.grid.len())
            .map(|k| {
                let s = self.primitive_at(k);
                s.speed() + s.c
            })
            .fold(0.0, f64::max)
    }

    /// Total mass, summed row by row in a fixed order.
    pub fn mass(&self) -> f64 {
        let n1 = self.grid.n1;
        let rows: Vec<f64> = self.rho.chunks(n1).map(|r| r.iter().sum()).collect();
        rows.iter().sum::<f64>() * self.grid.cell_area()
    }

    /// Largest deviation of any cell from the first row's value in its column.
    pub fn x2_variation(&self) -> f64 {
        let n1 = self.grid.n1;
        let mut worst = 0.0f64;
        for plane in [&self.rho, &self.m1, &self.m2] {
            let first = &plane[..n1];
            for row in plane.chunks(n1).skip(1) {
                for (a, b) in row.iter().zip(first) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        worst
    }
}

pub fn max_signal_speed(field: &FlowField) -> f64 {
    field.max_signal_speed()
}
