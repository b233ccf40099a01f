//! Finite differences on the cell-centred grid.
//!
//! With a mask, stencils only read masked-in cells: centred where both
//! neighbours are available, one-sided second order at mask edges, first
//! order as a last resort. Cells outside the mask get 0.

use rayon::prelude::*;

use crate::grid::Grid;

#[derive(Clone, Copy)]
pub struct Stencil<'a> {
    grid: &'a Grid,
    mask: Option<&'a [bool]>,
}

impl<'a> Stencil<'a> {
    pub fn new(grid: &'a Grid) -> Self {
        Self { grid, mask: None }
    }

    pub fn masked(grid: &'a Grid, mask: &'a [bool]) -> Self {
        debug_assert_eq!(mask.len(), grid.len());
        Self { grid, mask: Some(mask) }
    }

    pub fn grid(&self) -> &Grid {
        self.grid
    }

    #[inline]
    fn inside(&self, k: usize) -> bool {
        self.mask.map_or(true, |m| m[k])
    }

    /// `d/dx1`, one-sided at the `x1` domain edges.
    pub fn d1(&self, f: &[f64]) -> Vec<f64> {
        let n1 = self.grid.n1;
        let h = self.grid.dx1();
        let mut out = vec![0.0; f.len()];
        out.par_chunks_mut(n1).enumerate().for_each(|(j, row)| {
            let base = j * n1;
            let ok = |i: isize| i >= 0 && (i as usize) < n1 && self.inside(base + i as usize);
            let v = |i: isize| f[base + i as usize];
            for (i, o) in row.iter_mut().enumerate() {
                let i = i as isize;
                if !ok(i) {
                    continue;
                }
                *o = one_axis(ok, v, i, h);
            }
        });
        out
    }

    /// `d/dx2`, periodic.
    pub fn d2(&self, f: &[f64]) -> Vec<f64> {
        let (n1, n2) = (self.grid.n1, self.grid.n2);
        let h = self.grid.dx2();
        let mut out = vec![0.0; f.len()];
        out.par_chunks_mut(n1).enumerate().for_each(|(j, row)| {
            let wrap = |d: isize| ((j as isize + d).rem_euclid(n2 as isize)) as usize;
            for (i, o) in row.iter_mut().enumerate() {
                if !self.inside(j * n1 + i) {
                    continue;
                }
                let ok = |d: isize| self.inside(wrap(d) * n1 + i);
                let v = |d: isize| f[wrap(d) * n1 + i];
                *o = one_axis(ok, v, 0, h);
            }
        });
        out
    }

    pub fn grad(&self, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (self.d1(f), self.d2(f))
    }

    /// Directional derivative `a1 d1 f + a2 d2 f`.
    pub fn along(&self, a1: &[f64], a2: &[f64], f: &[f64]) -> Vec<f64> {
        let (g1, g2) = self.grad(f);
        g1.iter().zip(&g2).zip(a1.iter().zip(a2)).map(|((p, q), (a, b))| a * p + b * q).collect()
    }
}

#[inline]
fn one_axis(ok: impl Fn(isize) -> bool, v: impl Fn(isize) -> f64, i: isize, h: f64) -> f64 {
    if ok(i - 1) && ok(i + 1) {
        (v(i + 1) - v(i - 1)) / (2.0 * h)
    } else if ok(i + 1) && ok(i + 2) {
        (-3.0 * v(i) + 4.0 * v(i + 1) - v(i + 2)) / (2.0 * h)
    } else if ok(i - 1) && ok(i - 2) {
        (3.0 * v(i) - 4.0 * v(i - 1) + v(i - 2)) / (2.0 * h)
    } else if ok(i + 1) {
        (v(i + 1) - v(i)) / h
    } else if ok(i - 1) {
        (v(i) - v(i - 1)) / h
    } else {
        0.0
    }
}

/// Weights of the quadratic (or linear) Lagrange derivative at `times[at]`.
pub fn time_weights(times: &[f64], at: usize) -> Vec<f64> {
    match times.len() {
        2 => {
            let d = times[1] - times[0];
            vec![-1.0 / d, 1.0 / d]
        }
        3 => {
            let t = times[at];
            (0..3)
                .map(|k| {
                    let others: Vec<usize> = (0..3).filter(|&m| m != k).collect();
                    let (a, b) = (times[others[0]], times[others[1]]);
                    let denom = (times[k] - a) * (times[k] - b);
                    ((t - a) + (t - b)) / denom
                })
                .collect()
        }
        n => panic!("time stencil needs 2 or 3 levels, got {n}"),
    }
}

/// Pointwise time derivative of `fields` at `times[at]`.
pub fn time_derivative(times: &[f64], fields: &[&[f64]], at: usize) -> Vec<f64> {
    let w = time_weights(times, at);
    let n = fields[0].len();
    (0..n).map(|k| w.iter().zip(fields).map(|(wi, f)| wi * f[k]).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_quadratic_exact() {
        let g = Grid::new(16, 8, 0.0, 1.0).unwrap();
        let f: Vec<f64> = (0..g.len()).map(|k| {
            let x = g.x1(k % 16);
            x * x
        }).collect();
        let d = Stencil::new(&g).d1(&f);
        for k in 0..g.len() {
            assert!((d[k] - 2.0 * g.x1(k % 16)).abs() < 1e-12);
        }
    }

    #[test]
    fn mask_uses_one_sided() {
        let g = Grid::new(16, 8, 0.0, 1.0).unwrap();
        let mask: Vec<bool> = (0..g.len()).map(|k| k % 16 >= 4).collect();
        // A kink at the mask edge must not leak into the masked derivative.
        let f: Vec<f64> = (0..g.len()).map(|k| {
            let x = g.x1(k % 16);
            if k % 16 >= 4 { 3.0 * x } else { 100.0 }
        }).collect();
        let d = Stencil::masked(&g, &mask).d1(&f);
        for k in 0..g.len() {
            if mask[k] {
                assert!((d[k] - 3.0).abs() < 1e-12);
            } else {
                assert_eq!(d[k], 0.0);
            }
        }
    }

    #[test]
    fn time_weights_quadratic() {
        let ts = [1.0, 1.5, 2.5];
        for at in 0..3 {
            let w = time_weights(&ts, at);
            let d: f64 = w.iter().zip(ts).map(|(w, t)| w * t * t).sum();
            assert!((d - 2.0 * ts[at]).abs() < 1e-12);
        }
    }
}
