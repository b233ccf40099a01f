//! Refined Gronwall inequality on a `(t, u)` lattice.
//!
//! Hypothesis: `E + F <= A t^2 + B int_0^u F du' + C int_delta^t E / t' dt'`
//! with `exp(B u*) C <= 1`. Conclusion: `E + F <= 3 A exp(B u) t^2`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GronwallInstance {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// Increasing times, the first being `delta`.
    pub t: Vec<f64>,
    /// Increasing levels, the first being the lower edge.
    pub u: Vec<f64>,
    /// `e[i][j]` at `(t[i], u[j])`.
    #[serde(rename = "E")]
    pub e: Vec<Vec<f64>>,
    #[serde(rename = "F")]
    pub f: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// Largest `(E + F) / (3 A exp(B u) t^2)`.
    pub max_ratio: f64,
    pub slack: f64,
    pub pass: bool,
}

impl GronwallInstance {
    fn check_shape(&self) -> Result<()> {
        let (nt, nu) = (self.t.len(), self.u.len());
        if nt < 2 || nu < 2 {
            return Err(Error::Precondition("lattice needs at least two times and two levels".into()));
        }
        if self.t.windows(2).any(|w| w[1] <= w[0]) || self.u.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition("lattice coordinates must increase".into()));
        }
        if !(self.t[0] > 0.0) {
            return Err(Error::Precondition("times must be positive".into()));
        }
        let ok = |m: &Vec<Vec<f64>>| m.len() == nt && m.iter().all(|r| r.len() == nu && r.iter().all(|x| x.is_finite() && *x >= 0.0));
        if !ok(&self.e) || !ok(&self.f) {
            return Err(Error::Precondition("E and F must be non-negative and match the lattice".into()));
        }
        if !(self.a > 0.0 && self.b >= 0.0 && self.c >= 0.0) {
            return Err(Error::Precondition("A must be positive and B, C non-negative".into()));
        }
        Ok(())
    }

    /// Relative quadrature allowance `1 + O(h)`.
    pub fn slack(&self) -> f64 {
        let span = |x: &[f64]| x.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max) / (x[x.len() - 1] - x[0]);
        span(&self.t).max(span(&self.u))
    }

    /// `int_0^u F` and `int_delta^t E / t'` by the trapezoid rule.
    pub fn integrals(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let (nt, nu) = (self.t.len(), self.u.len());
        let mut iu = vec![vec![0.0; nu]; nt];
        let mut it = vec![vec![0.0; nu]; nt];
        for i in 0..nt {
            for j in 1..nu {
                iu[i][j] = iu[i][j - 1] + 0.5 * (self.u[j] - self.u[j - 1]) * (self.f[i][j] + self.f[i][j - 1]);
            }
        }
        for j in 0..nu {
            for i in 1..nt {
                let g = |k: usize| self.e[k][j] / self.t[k];
                it[i][j] = it[i - 1][j] + 0.5 * (self.t[i] - self.t[i - 1]) * (g(i) + g(i - 1));
            }
        }
        (iu, it)
    }

    /// Right-hand side of the hypothesis on the lattice.
    pub fn bound(&self) -> Vec<Vec<f64>> {
        let (iu, it) = self.integrals();
        (0..self.t.len())
            .map(|i| (0..self.u.len()).map(|j| self.a * self.t[i].powi(2) + self.b * iu[i][j] + self.c * it[i][j]).collect())
            .collect()
    }
}

pub fn gronwall_verify(inst: &GronwallInstance) -> Result<Verdict> {
    inst.check_shape()?;
    let u_star = inst.u[inst.u.len() - 1] - inst.u[0];
    if (inst.b * u_star).exp() * inst.c > 1.0 {
        return Err(Error::Precondition(format!("exp(B u*) C = {} exceeds 1", (inst.b * u_star).exp() * inst.c)));
    }
    let slack = inst.slack();
    let rhs = inst.bound();
    for (i, row) in rhs.iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            let lhs = inst.e[i][j] + inst.f[i][j];
            if lhs > (1.0 + slack) * r {
                return Err(Error::Hypothesis { t: inst.t[i], u: inst.u[j], lhs, rhs: *r });
            }
        }
    }
    let mut max_ratio: f64 = 0.0;
    for i in 0..inst.t.len() {
        for j in 0..inst.u.len() {
            let cap = 3.0 * inst.a * (inst.b * (inst.u[j] - inst.u[0])).exp() * inst.t[i].powi(2);
            max_ratio = max_ratio.max((inst.e[i][j] + inst.f[i][j]) / cap);
        }
    }
    Ok(Verdict { max_ratio, slack, pass: max_ratio <= 1.0 + slack })
}

/// A random instance saturating the hypothesis.
///
/// With `F = a(u) t^2`, `0 <= a <= A`, the equality in `t` is the linear
/// ODE `t Y' = g(u) t^2 + C Y` for `Y = int E / t'`, `Y(delta) = 0`, whose
/// solution gives `E = t Y'` in closed form.
pub fn synthetic_instance(rng: &mut impl Rng) -> GronwallInstance {
    let a = 10f64.powf(rng.gen_range(-1.0..1.0));
    let b: f64 = rng.gen_range(0.0..2.0);
    let u_star: f64 = rng.gen_range(0.5..3.0);
    let c = rng.gen_range(0.0..1.0) * (-b * u_star).exp();
    let delta: f64 = rng.gen_range(0.01..0.2);
    let (nt, nu) = (rng.gen_range(20..60), rng.gen_range(10..40));
    let (s, k, phase) = (rng.gen_range(0.0..1.0), rng.gen_range(0.5..4.0), rng.gen_range(0.0..std::f64::consts::TAU));
    // a(u) = A s (1 + sin(k u + phase)) / 2 and its integral from 0.
    let prof = |u: f64| a * s * 0.5 * (1.0 + (k * u + phase).sin());
    let prof_int = |u: f64| a * s * 0.5 * (u - ((k * u + phase).cos() - phase.cos()) / k);
    let t: Vec<f64> = (0..nt).map(|i| delta + (1.0 - delta) * i as f64 / (nt - 1) as f64).collect();
    let u: Vec<f64> = (0..nu).map(|j| u_star * j as f64 / (nu - 1) as f64).collect();
    let mut e = vec![vec![0.0; nu]; nt];
    let mut f = vec![vec![0.0; nu]; nt];
    for (j, &uj) in u.iter().enumerate() {
        let g = a + b * prof_int(uj) - prof(uj);
        let kk = g / (2.0 - c);
        let d = -kk * delta.powf(2.0 - c);
        for (i, &ti) in t.iter().enumerate() {
            e[i][j] = (2.0 * kk * ti * ti + c * d * ti.powf(c)).max(0.0);
            f[i][j] = prof(uj) * ti * ti;
        }
    }
    GronwallInstance { a, b, c, t, u, e, f }
}

/// Inflate `E` at one interior lattice point by powers of 10 until the
/// hypothesis fails there by a factor of two.
pub fn mutate(inst: &GronwallInstance, rng: &mut impl Rng) -> GronwallInstance {
    let mut m = inst.clone();
    let i = rng.gen_range(1..m.t.len() - 1);
    let j = rng.gen_range(1..m.u.len() - 1);
    if m.e[i][j] <= 0.0 {
        m.e[i][j] = m.a * m.t[i] * m.t[i];
    }
    loop {
        m.e[i][j] *= 10.0;
        let lhs = m.e[i][j] + m.f[i][j];
        if lhs > 2.0 * m.bound()[i][j] {
            return m;
        }
    }
}

/// Least-squares `(A, B, C) >= 0` for `E + F ~ A t^2 + B int F + C int E / t`,
/// then `C` capped by `exp(-B u*)` and `A` raised until the hypothesis holds.
pub fn fit_constants(t: &[f64], u: &[f64], e: &[Vec<f64>], f: &[Vec<f64>]) -> Result<(GronwallInstance, [f64; 3])> {
    let mut inst = GronwallInstance { a: 1.0, b: 0.0, c: 0.0, t: t.to_vec(), u: u.to_vec(), e: e.to_vec(), f: f.to_vec() };
    inst.check_shape()?;
    let (iu, it) = inst.integrals();
    let mut rows = Vec::new();
    for i in 0..t.len() {
        for j in 0..u.len() {
            rows.push(([t[i] * t[i], iu[i][j], it[i][j]], e[i][j] + f[i][j]));
        }
    }
    let fit = nnls3(&rows);
    let u_star = u[u.len() - 1] - u[0];
    inst.b = fit[1];
    inst.c = fit[2].min((-fit[1] * u_star).exp());
    let mut need: f64 = 0.0;
    for i in 0..t.len() {
        for j in 0..u.len() {
            let rest = inst.b * iu[i][j] + inst.c * it[i][j];
            need = need.max((e[i][j] + f[i][j] - rest) / (t[i] * t[i]));
        }
    }
    inst.a = fit[0].max(need).max(f64::MIN_POSITIVE);
    Ok((inst, fit))
}

/// Non-negative least squares in three unknowns by enumerating active sets.
fn nnls3(rows: &[([f64; 3], f64)]) -> [f64; 3] {
    let mut best = ([0.0; 3], f64::INFINITY);
    for set in 1u32..8 {
        let idx: Vec<usize> = (0..3).filter(|k| set >> k & 1 == 1).collect();
        let n = idx.len();
        let mut m = vec![vec![0.0; n + 1]; n];
        for (x, y) in rows {
            for (p, &a) in idx.iter().enumerate() {
                for (q, &b) in idx.iter().enumerate() {
                    m[p][q] += x[a] * x[b];
                }
                m[p][n] += x[a] * y;
            }
        }
        let Some(sol) = solve(m) else { continue };
        if sol.iter().any(|v| *v < 0.0) {
            continue;
        }
        let mut coef = [0.0; 3];
        for (p, &a) in idx.iter().enumerate() {
            coef[a] = sol[p];
        }
        let res: f64 = rows.iter().map(|(x, y)| (x[0] * coef[0] + x[1] * coef[1] + x[2] * coef[2] - y).powi(2)).sum();
        if res < best.1 {
            best = (coef, res);
        }
    }
    best.0
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..n {
            let k = m[r][col] / m[col][col];
            for c in col..=n {
                m[r][c] -= k * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    Some(x)
}
