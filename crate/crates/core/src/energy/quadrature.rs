//! Integrals over `{u_lo <= u <= u_max}` and along level curves of `u`.

use crate::error::{Error, Result};
use crate::geometry::Foliation;
use crate::grid::Grid;
use crate::stencil::Stencil;

/// Fraction of a cell where the linearised `u` lies below `level`.
///
/// Over the cell `u - u_c = a s + b r` with `s, r` uniform on `[-1/2, 1/2]`,
/// so this is the distribution function of a sum of two uniform variables.
pub fn fraction_below(u_c: f64, a: f64, b: f64, level: f64) -> f64 {
    let (big, small) = if a.abs() >= b.abs() { (a.abs(), b.abs()) } else { (b.abs(), a.abs()) };
    let z = level - u_c;
    if big == 0.0 {
        return if z >= 0.0 { 1.0 } else { 0.0 };
    }
    let s = z + 0.5 * (big + small);
    if s <= 0.0 {
        0.0
    } else if s >= big + small {
        1.0
    } else if small == 0.0 {
        s / big
    } else if s <= small {
        s * s / (2.0 * big * small)
    } else if s <= big {
        (s - 0.5 * small) / big
    } else {
        let r = big + small - s;
        1.0 - r * r / (2.0 * big * small)
    }
}

/// `int density / kappa dx` over `{u_lo <= u <= level}` inside the band,
/// for each level. Also returns the number of band cells skipped for
/// `kappa <= 0`.
pub fn band_integral(fol: &Foliation, density: &[f64], u_lo: f64, levels: &[f64]) -> (Vec<f64>, usize) {
    let g = &fol.grid;
    let st = Stencil::masked(g, &fol.mask);
    let (g1, g2) = st.grad(&fol.u);
    let (h1, h2) = (g.dx1(), g.dx2());
    let mut bad = 0;
    let mut rows = vec![vec![0.0; levels.len()]; g.n2];
    for (j, acc) in rows.iter_mut().enumerate() {
        for i in 0..g.n1 {
            let k = g.idx(i, j);
            if !fol.mask[k] {
                continue;
            }
            if !(fol.kappa[k] > 0.0) {
                bad += 1;
                continue;
            }
            let (a, b) = (g1[k] * h1, g2[k] * h2);
            let below_lo = fraction_below(fol.u[k], a, b, u_lo);
            let w = density[k] / fol.kappa[k];
            for (m, &l) in levels.iter().enumerate() {
                let frac = fraction_below(fol.u[k], a, b, l) - below_lo;
                if frac > 0.0 {
                    acc[m] += w * frac;
                }
            }
        }
    }
    let area = g.cell_area();
    let out = (0..levels.len()).map(|m| rows.iter().map(|r| r[m]).sum::<f64>() * area).collect();
    (out, bad)
}

/// Line integral of `f ds` along `{u = level}` by marching squares on the
/// cell-centre lattice, `x2` periodic. Values outside `mask` are replaced by
/// the in-mask endpoint of the edge, or 0 if neither endpoint is in it.
pub fn level_line_integral(grid: &Grid, u: &[f64], mask: &[bool], f: &[f64], level: f64, time: f64) -> Result<f64> {
    let (n1, n2) = (grid.n1, grid.n2);
    let s = |k: usize| u[k] - level;
    let first: Vec<f64> = (0..n2).map(|j| s(grid.idx(0, j))).collect();
    let last: Vec<f64> = (0..n2).map(|j| s(grid.idx(n1 - 1, j))).collect();
    let one_side = |v: &[f64]| v.iter().all(|x| *x > 0.0) || v.iter().all(|x| *x < 0.0);
    if !one_side(&first) || !one_side(&last) || first[0].signum() == last[0].signum() {
        return Err(Error::ContourLeavesGrid { level, t: time });
    }
    let (h1, h2) = (grid.dx1(), grid.dx2());
    // Crossing on the edge from node p to node q: position offset and value.
    let cross = |p: usize, q: usize| -> Option<(f64, f64)> {
        let (a, b) = (s(p), s(q));
        if (a >= 0.0) == (b >= 0.0) {
            return None;
        }
        let th = a / (a - b);
        let val = match (mask[p], mask[q]) {
            (true, true) => (1.0 - th) * f[p] + th * f[q],
            (true, false) => f[p],
            (false, true) => f[q],
            (false, false) => 0.0,
        };
        Some((th, val))
    };
    let rows: Vec<f64> = (0..n2)
        .map(|j| {
            let jn = (j + 1) % n2;
            let mut acc = 0.0;
            for i in 0..n1 - 1 {
                let (a, b, c, d) = (grid.idx(i, j), grid.idx(i + 1, j), grid.idx(i + 1, jn), grid.idx(i, jn));
                // Edges in cyclic order with the local coordinates of their crossings.
                let pts: [Option<(f64, f64, f64)>; 4] = [
                    cross(a, b).map(|(t, v)| (t * h1, 0.0, v)),
                    cross(b, c).map(|(t, v)| (h1, t * h2, v)),
                    cross(d, c).map(|(t, v)| (t * h1, h2, v)),
                    cross(a, d).map(|(t, v)| (0.0, t * h2, v)),
                ];
                let seg = |p: (f64, f64, f64), q: (f64, f64, f64)| (p.0 - q.0).hypot(p.1 - q.1) * 0.5 * (p.2 + q.2);
                let hit: Vec<(f64, f64, f64)> = pts.iter().flatten().copied().collect();
                match hit.len() {
                    2 => acc += seg(hit[0], hit[1]),
                    4 => {
                        let centre = 0.25 * (s(a) + s(b) + s(c) + s(d));
                        let [p0, p1, p2, p3] = [hit[0], hit[1], hit[2], hit[3]];
                        if (centre >= 0.0) == (s(a) >= 0.0) {
                            acc += seg(p0, p1) + seg(p2, p3);
                        } else {
                            acc += seg(p3, p0) + seg(p1, p2);
                        }
                    }
                    _ => {}
                }
            }
            acc
        })
        .collect();
    Ok(rows.iter().sum())
}

/// Cumulative trapezoid integral, starting at 0.
pub fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    for k in 0..x.len() {
        if k > 0 {
            acc += 0.5 * (x[k] - x[k - 1]) * (y[k] + y[k - 1]);
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_is_monotone_and_exact_for_slabs() {
        assert_eq!(fraction_below(0.0, 1.0, 0.0, 0.25), 0.75);
        assert_eq!(fraction_below(0.0, 0.0, 0.0, 0.0), 1.0);
        let mut last = 0.0;
        for k in 0..=200 {
            let l = -1.0 + k as f64 / 100.0;
            let f = fraction_below(0.1, 0.7, -0.4, l);
            assert!(f >= last - 1e-15);
            last = f;
        }
        assert!((fraction_below(0.1, 0.7, -0.4, 0.1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fraction_matches_sampling() {
        let (uc, a, b) = (0.2, 0.6, 0.25);
        for l in [-0.1, 0.05, 0.2, 0.4, 0.55] {
            let n = 400;
            let mut hits = 0;
            for p in 0..n {
                for q in 0..n {
                    let s = (p as f64 + 0.5) / n as f64 - 0.5;
                    let r = (q as f64 + 0.5) / n as f64 - 0.5;
                    if uc + a * s + b * r <= l {
                        hits += 1;
                    }
                }
            }
            let mc = hits as f64 / (n * n) as f64;
            assert!((mc - fraction_below(uc, a, b, l)).abs() < 5e-3, "level {l}");
        }
    }
}
