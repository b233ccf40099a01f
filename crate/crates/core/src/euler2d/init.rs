//! Perturbed centered-rarefaction data on the slice `t = delta`.
//!
//! Each `x2` column carries its own 1D fan whose right state has sound
//! speed `c0 + eps * sum A cos(k2 x2 + phase)`. Inside such a fan `v1 + c`
//! is exactly `x1 / delta`, so the data start with `X(v1 + c) = 0` in the
//! band. The `x2`-dependence of `v1` is balanced by a `v2` that keeps the
//! field irrotational. Potential modes add `grad phi` on top.

use serde::{Deserialize, Serialize};

use super::FlowField;
use crate::error::{Error, Result};
use crate::gas::{PolytropicGas, PrimitiveState};
use crate::grid::Grid;
use crate::riemann::centered_fan;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanData {
    pub v0: f64,
    pub c0: f64,
    /// Width in `u` of the fan before it is glued to a constant left state.
    pub u_left: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    /// Modulates the right-state sound speed of the per-column fan.
    Front,
    /// Adds `grad phi` with `phi = A E(x1) cos(k1 x1) cos(k2 x2 + phase)`.
    Potential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub kind: ModeKind,
    pub k1: f64,
    pub k2: i32,
    pub amplitude: f64,
    pub phase: f64,
}

/// Smooth flat-top window: 1 on `[lo, hi]`, 0 outside `[lo - ramp, hi + ramp]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub lo: f64,
    pub hi: f64,
    pub ramp: f64,
}

impl Envelope {
    /// Value and first derivative.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let (a, da) = smooth_step((x - (self.lo - self.ramp)) / self.ramp);
        let (b, db) = smooth_step(((self.hi + self.ramp) - x) / self.ramp);
        (a * b, (da * b - a * db) / self.ramp)
    }
}

/// C-infinity step from 0 at `s <= 0` to 1 at `s >= 1`, with derivative.
fn smooth_step(s: f64) -> (f64, f64) {
    if s <= 0.0 {
        return (0.0, 0.0);
    }
    if s >= 1.0 {
        return (1.0, 0.0);
    }
    let f = |x: f64| (-1.0 / x).exp();
    let df = |x: f64| (-1.0 / x).exp() / (x * x);
    let (p, q) = (f(s), f(1.0 - s));
    let d = p + q;
    (p / d, (df(s) * q + p * df(1.0 - s)) / (d * d))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub epsilon: f64,
    pub modes: Vec<Mode>,
    pub envelope: Envelope,
}

impl PerturbationSpec {
    pub fn none() -> Self {
        Self { epsilon: 0.0, modes: Vec::new(), envelope: Envelope { lo: -0.5, hi: 2.0, ramp: 0.5 } }
    }

    /// Right-state sound speed of the column at `x2`, and its `x2`-derivative.
    pub fn front(&self, c0: f64, x2: f64) -> (f64, f64) {
        let (mut c, mut dc) = (c0, 0.0);
        for m in self.modes.iter().filter(|m| m.kind == ModeKind::Front) {
            let arg = m.k2 as f64 * x2 + m.phase;
            c += self.epsilon * m.amplitude * arg.cos();
            dc -= self.epsilon * m.amplitude * m.k2 as f64 * arg.sin();
        }
        (c, dc)
    }

    /// The potential perturbation `phi` at a point.
    pub fn potential(&self, x1: f64, x2: f64) -> f64 {
        let (e, _) = self.envelope.eval(x1);
        self.modes
            .iter()
            .filter(|m| m.kind == ModeKind::Potential)
            .map(|m| self.epsilon * m.amplitude * e * (m.k1 * x1).cos() * (m.k2 as f64 * x2 + m.phase).cos())
            .sum()
    }

    /// `grad phi` evaluated analytically.
    pub fn potential_velocity(&self, x1: f64, x2: f64) -> (f64, f64) {
        let (e, de) = self.envelope.eval(x1);
        let (mut a, mut b) = (0.0, 0.0);
        for m in self.modes.iter().filter(|m| m.kind == ModeKind::Potential) {
            let s = self.epsilon * m.amplitude;
            let (p, dp) = ((m.k1 * x1).cos(), -m.k1 * (m.k1 * x1).sin());
            let arg = m.k2 as f64 * x2 + m.phase;
            a += s * (de * p + e * dp) * arg.cos();
            b -= s * e * p * m.k2 as f64 * arg.sin();
        }
        (a, b)
    }
}

/// Flow on `t = delta`.
pub fn init_perturbed_rarefaction(
    gas: PolytropicGas,
    grid: Grid,
    delta: f64,
    fan: FanData,
    spec: &PerturbationSpec,
) -> Result<FlowField> {
    if !(delta > 0.0) {
        return Err(Error::Config(format!("delta = {delta} must be positive")));
    }
    if spec.epsilon < 0.0 {
        return Err(Error::Config(format!("epsilon = {} must be non-negative", spec.epsilon)));
    }
    if !(fan.u_left > 0.0 && fan.u_left < gas.vacuum_width(fan.c0)) {
        return Err(Error::Config(format!("fan width u_left = {} must lie in (0, vacuum width)", fan.u_left)));
    }
    let margin = 2.0 * grid.dx1();
    let head = delta * (fan.v0 + fan.c0 + spec.epsilon * spec.modes.iter().map(|m| m.amplitude.abs()).sum::<f64>());
    let tail = delta * (fan.v0 + fan.c0 - fan.u_left - spec.epsilon * 10.0);
    if tail < grid.x1_min + margin || head > grid.x1_max - margin {
        return Err(Error::Config(format!(
            "fan [{tail}, {head}] at t = {delta} does not fit inside [{}, {}]",
            grid.x1_min, grid.x1_max
        )));
    }
    let g = gas.gamma();
    let mut bad = None;
    let field = FlowField::from_primitive(delta, grid, gas, |x1, x2| {
        let (c_r, dc_r) = spec.front(fan.c0, x2);
        if c_r <= 0.0 {
            bad = Some(x2);
        }
        let column = centered_fan(gas, fan.v0, c_r.max(f64::MIN_POSITIVE)).expect("positive sound speed");
        let u = (column.head() - x1 / delta).clamp(0.0, fan.u_left);
        let s = column.at_slope(column.slope_at(u));
        let v2 = 2.0 / (g + 1.0) * dc_r * delta * u;
        let (p1, p2) = spec.potential_velocity(x1, x2);
        PrimitiveState::new(s.c, s.v + p1, v2 + p2)
    });
    if let Some(x2) = bad {
        return Err(Error::Config(format!("perturbed right state reaches vacuum at x2 = {x2}")));
    }
    if let Some(k) = field.rho.iter().position(|r| !(*r > 0.0)) {
        return Err(Error::Config(format!("initial data reach vacuum at cell {k}")));
    }
    if spec.epsilon > 0.05 {
        eprintln!("warning: epsilon = {} is outside the small-perturbation regime", spec.epsilon);
    }
    Ok(field)
}

/// `u` on `t = delta`: the distance in slope from the fan head of each
/// column, extended linearly beyond the fan.
pub fn initial_acoustical_function(grid: &Grid, delta: f64, fan: FanData, spec: &PerturbationSpec) -> Vec<f64> {
    let mut u = vec![0.0; grid.len()];
    for j in 0..grid.n2 {
        let (c_r, _) = spec.front(fan.c0, grid.x2(j));
        for i in 0..grid.n1 {
            u[grid.idx(i, j)] = fan.v0 + c_r - grid.x1(i) / delta;
        }
    }
    u
}
