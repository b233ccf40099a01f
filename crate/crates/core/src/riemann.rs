//! Exact Riemann solver for the 1D isentropic polytropic gas.
//!
//! Wave curves are parametrized by the middle sound speed, on which both
//! curves are monotone. Self-similar states are evaluated in `xi = x / t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{PolytropicGas, PrimitiveState};

/// Strength below which a wave is reported as a degenerate rarefaction.
pub const ZERO_STRENGTH: f64 = 1e-12;
const ROOT_TOL: f64 = 1e-13;
const MAX_ITER: usize = 200;

/// A 1D state: velocity and sound speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State1D {
    pub v: f64,
    pub c: f64,
}

impl State1D {
    pub fn new(v: f64, c: f64) -> Self {
        Self { v, c }
    }

    fn primitive(self) -> PrimitiveState {
        PrimitiveState::new(self.c, self.v, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannProblem1D {
    pub gas: PolytropicGas,
    pub left: State1D,
    pub right: State1D,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WaveDescriptor {
    Shock { speed: f64, strength: f64 },
    /// `head` is the edge facing the undisturbed state.
    Rarefaction { head: f64, tail: f64, strength: f64 },
}

impl WaveDescriptor {
    pub fn is_shock(&self) -> bool {
        matches!(self, WaveDescriptor::Shock { .. })
    }

    pub fn strength(&self) -> f64 {
        match *self {
            WaveDescriptor::Shock { strength, .. } | WaveDescriptor::Rarefaction { strength, .. } => strength,
        }
    }

    /// Smallest and largest speed occupied by the wave.
    pub fn span(&self) -> (f64, f64) {
        match *self {
            WaveDescriptor::Shock { speed, .. } => (speed, speed),
            WaveDescriptor::Rarefaction { head, tail, .. } => (head.min(tail), head.max(tail)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Middle {
    State { v: f64, c: f64 },
    Vacuum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveFan {
    pub gas: PolytropicGas,
    pub left: State1D,
    pub right: State1D,
    pub wave1: WaveDescriptor,
    pub wave2: WaveDescriptor,
    pub middle: Middle,
}

/// The forward centered rarefaction fan ending on the right state `(v0, c0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenteredFan {
    pub gas: PolytropicGas,
    pub v0: f64,
    pub c0: f64,
}

pub fn centered_fan(gas: PolytropicGas, v0: f64, c0: f64) -> Result<CenteredFan> {
    if !(c0 > 0.0) {
        return Err(Error::Domain(format!("fan needs c0 > 0, got {c0}")));
    }
    Ok(CenteredFan { gas, v0, c0 })
}

impl CenteredFan {
    /// Head slope `v0 + c0`.
    pub fn head(&self) -> f64 {
        self.v0 + self.c0
    }

    /// Slope at which the fan reaches vacuum.
    pub fn vacuum_slope(&self) -> f64 {
        self.v0 - 2.0 * self.c0 / (self.gas.gamma() - 1.0)
    }

    /// The constant `a` in `v = 2/(g+1) xi + a`.
    pub fn offset(&self) -> f64 {
        let g = self.gas.gamma();
        (g - 1.0) / (g + 1.0) * self.v0 - 2.0 / (g + 1.0) * self.c0
    }

    pub fn state(&self, x: f64, t: f64) -> Result<State1D> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("fan evaluated at t = {t}")));
        }
        Ok(self.at_slope(x / t))
    }

    pub fn at_slope(&self, xi: f64) -> State1D {
        let g = self.gas.gamma();
        if xi >= self.head() {
            return State1D::new(self.v0, self.c0);
        }
        let vac = self.vacuum_slope();
        if xi <= vac {
            return State1D::new(vac, 0.0);
        }
        let a = self.offset();
        State1D::new(2.0 / (g + 1.0) * xi + a, (g - 1.0) / (g + 1.0) * xi - a)
    }

    /// Slope of the fan ray `u` units behind the head.
    pub fn slope_at(&self, u: f64) -> f64 {
        self.head() - u
    }
}

/// 1D geometric quantities inside a centered forward fan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricProfile1D {
    /// Distance in slope from the fan head, `(v0 + c0) - x/t`.
    pub u: f64,
    pub kappa: f64,
    pub mu: f64,
    pub u0: f64,
    pub um1: f64,
    pub um2: f64,
}

pub fn geometric_profile(gas: PolytropicGas, v0: f64, c0: f64, t: f64, x: f64) -> Result<GeometricProfile1D> {
    let fan = centered_fan(gas, v0, c0)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("profile evaluated at t = {t}")));
    }
    let xi = x / t;
    if xi > fan.head() || xi <= fan.vacuum_slope() {
        return Err(Error::Domain(format!("x/t = {xi} outside the fan")));
    }
    let s = fan.at_slope(xi);
    let inv = gas.to_invariants(s.primitive());
    Ok(GeometricProfile1D {
        u: fan.head() - xi,
        kappa: t,
        mu: s.c * t,
        u0: inv.wbar,
        um1: -inv.psi2,
        um2: inv.w,
    })
}

/// `(v_l - v_r)^2 - (nu_r - nu_l)(p(nu_l) - p(nu_r))` with `nu = 1/rho`.
pub fn shock_jump_residual(gas: PolytropicGas, left: State1D, right: State1D) -> f64 {
    let (rl, rr) = (gas.density_unchecked(left.c), gas.density_unchecked(right.c));
    let dv = left.v - right.v;
    dv * dv - (1.0 / rr - 1.0 / rl) * (gas.pressure(rl) - gas.pressure(rr))
}

/// Lax entropy test for a discontinuity of the given family (1 or 2).
pub fn lax_admissible(gas: PolytropicGas, left: State1D, right: State1D, family: u8) -> Result<bool> {
    if family != 1 && family != 2 {
        return Err(Error::Precondition(format!("family must be 1 or 2, got {family}")));
    }
    if left.c <= 0.0 || right.c <= 0.0 {
        return Err(Error::Precondition("vacuum state in jump test".into()));
    }
    if left == right {
        return Ok(false);
    }
    let (rl, rr) = (gas.density_unchecked(left.c), gas.density_unchecked(right.c));
    let res = shock_jump_residual(gas, left, right);
    let scale = (left.v - right.v).powi(2) + ((1.0 / rr - 1.0 / rl) * (gas.pressure(rl) - gas.pressure(rr))).abs();
    if rl == rr || res.abs() > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!("states are not a jump pair (residual {res:e})")));
    }
    let s = (rr * right.v - rl * left.v) / (rr - rl);
    let lam = |st: State1D| if family == 1 { st.v - st.c } else { st.v + st.c };
    Ok(lam(left) > s && s > lam(right))
}

/// Velocity on the 1-wave curve through `left` at middle sound speed `cm`,
/// with its derivative in `cm`.
fn curve1(gas: &PolytropicGas, left: State1D, cm: f64) -> (f64, f64) {
    let g = gas.gamma();
    if cm <= left.c {
        (left.v + 2.0 * (left.c - cm) / (g - 1.0), -2.0 / (g - 1.0))
    } else {
        let (h, dh) = hugoniot(gas, left.c, cm);
        (left.v - h, -dh)
    }
}

fn curve2(gas: &PolytropicGas, right: State1D, cm: f64) -> (f64, f64) {
    let g = gas.gamma();
    if cm <= right.c {
        (right.v - 2.0 * (right.c - cm) / (g - 1.0), 2.0 / (g - 1.0))
    } else {
        let (h, dh) = hugoniot(gas, right.c, cm);
        (right.v + h, dh)
    }
}

/// `sqrt((nu_a - nu_m)(p_m - p_a))` for `cm > ca`, and its `cm`-derivative.
fn hugoniot(gas: &PolytropicGas, ca: f64, cm: f64) -> (f64, f64) {
    let g = gas.gamma();
    let (ra, rm) = (gas.density_unchecked(ca), gas.density_unchecked(cm));
    let (pa, pm) = (gas.pressure(ra), gas.pressure(rm));
    let q = (1.0 / ra - 1.0 / rm) * (pm - pa);
    let h = q.max(0.0).sqrt();
    let dq_drho = (pm - pa) / (rm * rm) + (1.0 / ra - 1.0 / rm) * cm * cm;
    let drho_dc = 2.0 * rm / ((g - 1.0) * cm);
    let dh = if h > 0.0 { 0.5 * dq_drho * drho_dc / h } else { f64::INFINITY };
    (h, dh)
}

pub fn solve_riemann(problem: RiemannProblem1D) -> Result<WaveFan> {
    let RiemannProblem1D { gas, left, right } = problem;
    if !(left.c > 0.0 && right.c > 0.0) {
        return Err(Error::Precondition("Riemann data must be non-vacuum".into()));
    }
    let g = gas.gamma();
    let wbar_l = 0.5 * (2.0 * left.c / (g - 1.0) + left.v);
    let w_r = 0.5 * (2.0 * right.c / (g - 1.0) - right.v);

    if wbar_l + w_r < 0.0 {
        let wave1 = WaveDescriptor::Rarefaction {
            head: left.v - left.c,
            tail: left.v + 2.0 * left.c / (g - 1.0),
            strength: left.c,
        };
        let wave2 = WaveDescriptor::Rarefaction {
            head: right.v + right.c,
            tail: right.v - 2.0 * right.c / (g - 1.0),
            strength: right.c,
        };
        return Ok(WaveFan { gas, left, right, wave1, wave2, middle: Middle::Vacuum });
    }

    let f = |cm: f64| {
        let (v1, d1) = curve1(&gas, left, cm);
        let (v2, d2) = curve2(&gas, right, cm);
        (v1 - v2, d1 - d2)
    };

    // f is strictly decreasing with f(0) = 2 (wbar_l + w_r) >= 0.
    let mut lo = 0.0;
    let mut hi = left.c.max(right.c);
    let mut grow = 0;
    while f(hi).0 > 0.0 {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::Numerical("could not bracket the middle state".into()));
        }
    }
    let scale = left.v.abs() + right.v.abs() + left.c + right.c;
    let mut cm = 0.5 * (lo + hi);
    let mut converged = f(0.0).0 == 0.0;
    if converged {
        cm = 0.0;
    }
    let mut iter = 0;
    while !converged {
        iter += 1;
        if iter > MAX_ITER {
            return Err(Error::Numerical(format!(
                "middle state did not converge: bracket [{lo:e}, {hi:e}], left {left:?}, right {right:?}"
            )));
        }
        let (fv, df) = f(cm);
        if fv.abs() <= ROOT_TOL * scale * 1e-2 {
            break;
        }
        if fv > 0.0 {
            lo = cm;
        } else {
            hi = cm;
        }
        let newton = cm - fv / df;
        let next = if df.is_finite() && df < 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let step = (next - cm).abs();
        cm = next;
        converged = (hi - lo) <= ROOT_TOL * cm.max(f64::MIN_POSITIVE) || step <= 1e-3 * ROOT_TOL * cm;
    }

    let vm = 0.5 * (curve1(&gas, left, cm).0 + curve2(&gas, right, cm).0);
    let mid = State1D::new(vm, cm);
    let wave1 = classify(&gas, left, mid, 1);
    let wave2 = classify(&gas, mid, right, 2);
    Ok(WaveFan { gas, left, right, wave1, wave2, middle: Middle::State { v: vm, c: cm } })
}

fn classify(gas: &PolytropicGas, a: State1D, b: State1D, family: u8) -> WaveDescriptor {
    let strength = (a.c - b.c).abs() / a.c.max(b.c);
    // Compressive: sound speed increases towards the wave's upstream side.
    let compressive = if family == 1 { b.c > a.c } else { a.c > b.c };
    if compressive && strength > ZERO_STRENGTH {
        let (ra, rb) = (gas.density_unchecked(a.c), gas.density_unchecked(b.c));
        WaveDescriptor::Shock { speed: (rb * b.v - ra * a.v) / (rb - ra), strength }
    } else if family == 1 {
        let strength = if compressive { 0.0 } else { strength };
        let head = a.v - a.c;
        let tail = if strength == 0.0 { head } else { b.v - b.c };
        WaveDescriptor::Rarefaction { head, tail, strength }
    } else {
        let strength = if compressive { 0.0 } else { strength };
        let head = b.v + b.c;
        let tail = if strength == 0.0 { head } else { a.v + a.c };
        WaveDescriptor::Rarefaction { head, tail, strength }
    }
}

impl WaveFan {
    pub fn middle_state(&self) -> Option<State1D> {
        match self.middle {
            Middle::State { v, c } => Some(State1D::new(v, c)),
            Middle::Vacuum => None,
        }
    }

    /// Piecewise self-similar state at `xi = x / t`.
    pub fn evaluate(&self, xi: f64) -> State1D {
        let g = self.gas.gamma();
        let (l, r) = (self.left, self.right);
        match self.wave1 {
            WaveDescriptor::Shock { speed, .. } => {
                if xi < speed {
                    return l;
                }
            }
            WaveDescriptor::Rarefaction { head, tail, .. } => {
                if xi < head {
                    return l;
                }
                if xi <= tail && tail > head {
                    let k = l.v + 2.0 * l.c / (g - 1.0);
                    let c = ((g - 1.0) * (k - xi) / (g + 1.0)).max(0.0);
                    return State1D::new(xi + c, c);
                }
            }
        }
        match self.wave2 {
            WaveDescriptor::Shock { speed, .. } if xi >= speed => r,
            WaveDescriptor::Rarefaction { head, .. } if xi > head => r,
            WaveDescriptor::Rarefaction { tail, .. } if xi >= tail => {
                let j = r.v - 2.0 * r.c / (g - 1.0);
                let c = ((g - 1.0) * (xi - j) / (g + 1.0)).max(0.0);
                State1D::new(xi - c, c)
            }
            _ => match self.middle {
                Middle::State { v, c } => State1D::new(v, c),
                Middle::Vacuum => State1D::new(xi, 0.0),
            },
        }
    }
}

pub fn evaluate_fan(fan: &WaveFan, xi: f64) -> State1D {
    fan.evaluate(xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2() -> PolytropicGas {
        PolytropicGas::new(2.0, 0.5).unwrap()
    }

    #[test]
    fn fan_examples() {
        let fan = centered_fan(g2(), 0.0, 1.0).unwrap();
        assert_eq!(fan.at_slope(1.0), State1D::new(0.0, 1.0));
        let s = fan.at_slope(0.0);
        assert!((s.v + 2.0 / 3.0).abs() < 1e-15 && (s.c - 2.0 / 3.0).abs() < 1e-15);
        for k in 0..50 {
            let s = fan.at_slope(-1.9 + 2.9 * k as f64 / 49.0);
            assert!((0.5 * (2.0 * s.c - s.v) - 1.0).abs() < 1e-14);
        }
        assert!(fan.state(0.0, 0.0).is_err());
        assert_eq!(fan.at_slope(-3.0).c, 0.0);
    }

    #[test]
    fn identical_states_give_zero_waves() {
        let s = State1D::new(0.3, 1.2);
        let fan = solve_riemann(RiemannProblem1D { gas: g2(), left: s, right: s }).unwrap();
        assert!(!fan.wave1.is_shock() && !fan.wave2.is_shock());
        assert!(fan.wave1.strength() <= ZERO_STRENGTH && fan.wave2.strength() <= ZERO_STRENGTH);
        let m = fan.middle_state().unwrap();
        assert!((m.v - s.v).abs() < 1e-13 && (m.c - s.c).abs() < 1e-13);
    }

    #[test]
    fn pure_forward_fan_recovered() {
        let gas = g2();
        let cf = centered_fan(gas, 0.0, 1.0).unwrap();
        let left = cf.at_slope(0.0);
        let fan = solve_riemann(RiemannProblem1D { gas, left, right: State1D::new(0.0, 1.0) }).unwrap();
        match fan.wave2 {
            WaveDescriptor::Rarefaction { head, tail, .. } => {
                assert!((head - 1.0).abs() < 1e-12);
                assert!(tail.abs() < 1e-12);
            }
            _ => panic!("expected a rarefaction"),
        }
        assert!(fan.wave1.strength() <= ZERO_STRENGTH);
        let s = fan.evaluate(0.5);
        let e = cf.at_slope(0.5);
        assert!((s.v - e.v).abs() < 1e-14 && (s.c - e.c).abs() < 1e-14);
    }

    #[test]
    fn divergent_data_is_vacuum() {
        let fan = solve_riemann(RiemannProblem1D {
            gas: g2(),
            left: State1D::new(-5.0, 1.0),
            right: State1D::new(5.0, 1.0),
        })
        .unwrap();
        assert_eq!(fan.middle, Middle::Vacuum);
        assert_eq!(fan.evaluate(0.0).c, 0.0);
        assert_eq!(fan.evaluate(-100.0), fan.left);
        assert_eq!(fan.evaluate(100.0), fan.right);
    }

    #[test]
    fn jump_residual_and_lax() {
        let gas = g2();
        let a = State1D::new(0.0, 1.0);
        assert_eq!(shock_jump_residual(gas, a, a), 0.0);
        assert!(!lax_admissible(gas, a, a, 2).unwrap());
        // 2-shock: right state at rest, left compressed and moving right.
        let cm = 1.3;
        let (h, _) = hugoniot(&gas, 1.0, cm);
        let left = State1D::new(h, cm);
        assert!(shock_jump_residual(gas, left, a).abs() < 1e-12);
        assert!(lax_admissible(gas, left, a, 2).unwrap());
        let rev = State1D::new(-left.v, left.c);
        assert!(!lax_admissible(gas, a, rev, 2).unwrap());
        assert!(shock_jump_residual(gas, a, State1D::new(0.7, 0.4)).abs() > 1e-3);
        assert!(lax_admissible(gas, a, State1D::new(0.7, 0.4), 1).is_err());
    }

    #[test]
    fn geometric_profile_examples() {
        let gas = g2();
        let p = geometric_profile(gas, 0.0, 1.0, 2.0, 0.0).unwrap();
        assert!((p.mu - 4.0 / 3.0).abs() < 1e-14);
        assert_eq!(p.um1, 0.0);
        assert_eq!(p.kappa, 2.0);
        assert!(geometric_profile(gas, 0.0, 1.0, 1.0, 2.0).is_err());
    }
}
