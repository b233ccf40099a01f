//! Polytropic equation of state and Riemann invariants.
//!
//! States are carried as `(c, v1, v2)`. Density is derived on demand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `p = k0 * rho^gamma` with `1 < gamma < 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolytropicGas {
    gamma: f64,
    k0: f64,
}

impl PolytropicGas {
    pub fn new(gamma: f64, k0: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma < 3.0) {
            return Err(Error::Domain(format!("gamma = {gamma} outside (1, 3)")));
        }
        if !(k0 > 0.0 && k0.is_finite()) {
            return Err(Error::Domain(format!("k0 = {k0} must be positive")));
        }
        Ok(Self { gamma, k0 })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn sound_speed(&self, rho: f64) -> Result<f64> {
        if rho < 0.0 || rho.is_nan() {
            return Err(Error::Domain(format!("negative density {rho}")));
        }
        Ok(self.sound_speed_unchecked(rho))
    }

    #[inline]
    pub(crate) fn sound_speed_unchecked(&self, rho: f64) -> f64 {
        if rho == 0.0 {
            return 0.0;
        }
        (self.k0 * self.gamma * rho.powf(self.gamma - 1.0)).sqrt()
    }

    /// Inverse of [`sound_speed`](Self::sound_speed).
    pub fn density(&self, c: f64) -> Result<f64> {
        if c < 0.0 || c.is_nan() {
            return Err(Error::Domain(format!("negative sound speed {c}")));
        }
        Ok(self.density_unchecked(c))
    }

    #[inline]
    pub(crate) fn density_unchecked(&self, c: f64) -> f64 {
        if c == 0.0 {
            return 0.0;
        }
        (c * c / (self.k0 * self.gamma)).powf(1.0 / (self.gamma - 1.0))
    }

    #[inline]
    pub fn pressure(&self, rho: f64) -> f64 {
        self.k0 * rho.powf(self.gamma)
    }

    pub fn enthalpy(&self, c: f64) -> f64 {
        c * c / (self.gamma - 1.0)
    }

    pub fn to_invariants(&self, s: PrimitiveState) -> RiemannInvariants {
        let a = s.c / (self.gamma - 1.0);
        RiemannInvariants {
            wbar: 0.5 * (2.0 * a + s.v1),
            w: 0.5 * (2.0 * a - s.v1),
            psi2: -s.v2,
        }
    }

    pub fn from_invariants(&self, inv: RiemannInvariants) -> Result<PrimitiveState> {
        let sum = inv.wbar + inv.w;
        if sum < 0.0 || sum.is_nan() {
            return Err(Error::Domain(format!("wbar + w = {sum} is negative")));
        }
        Ok(PrimitiveState {
            c: 0.5 * (self.gamma - 1.0) * sum,
            v1: inv.wbar - inv.w,
            v2: -inv.psi2,
        })
    }

    /// `v1 + c` written in the invariants.
    pub fn fast_speed(&self, inv: RiemannInvariants) -> f64 {
        0.5 * (self.gamma + 1.0) * inv.wbar + 0.5 * (self.gamma - 3.0) * inv.w
    }

    /// Width in `u` (slope units) from the head of the forward fan through
    /// a state with sound speed `c0` to its vacuum front.
    pub fn vacuum_width(&self, c0: f64) -> f64 {
        (self.gamma + 1.0) / (self.gamma - 1.0) * c0
    }

    /// Half the vacuum width: the default band of tracked fronts.
    pub fn data_width(&self, c0: f64) -> f64 {
        0.5 * self.vacuum_width(c0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveState {
    pub c: f64,
    pub v1: f64,
    pub v2: f64,
}

impl PrimitiveState {
    pub fn new(c: f64, v1: f64, v2: f64) -> Self {
        Self { c, v1, v2 }
    }

    pub fn vacuum(v1: f64) -> Self {
        Self { c: 0.0, v1, v2: 0.0 }
    }

    pub fn is_vacuum(&self) -> bool {
        self.c == 0.0
    }

    pub fn speed(&self) -> f64 {
        self.v1.hypot(self.v2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannInvariants {
    pub wbar: f64,
    pub w: f64,
    pub psi2: f64,
}

/// Selector for one of the three transported quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Invariant {
    Wbar,
    W,
    Psi2,
}

impl Invariant {
    pub const ALL: [Invariant; 3] = [Invariant::Wbar, Invariant::W, Invariant::Psi2];

    pub fn name(&self) -> &'static str {
        match self {
            Invariant::Wbar => "wbar",
            Invariant::W => "w",
            Invariant::Psi2 => "psi2",
        }
    }

    #[inline]
    pub fn pick(&self, inv: &RiemannInvariants) -> f64 {
        match self {
            Invariant::Wbar => inv.wbar,
            Invariant::W => inv.w,
            Invariant::Psi2 => inv.psi2,
        }
    }
}

impl std::str::FromStr for Invariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wbar" => Ok(Invariant::Wbar),
            "w" => Ok(Invariant::W),
            "psi2" => Ok(Invariant::Psi2),
            _ => Err(Error::Config(format!("unknown invariant '{s}'"))),
        }
    }
}

/// Diagonal variables `(U0, U-1, U-2)` of the symmetric system relative to
/// the unit normal `that`.
pub fn diagonal_variables(that: [f64; 2], inv: RiemannInvariants) -> [f64; 3] {
    let [t1, t2] = that;
    let (wb, w, p2) = (inv.wbar, inv.w, inv.psi2);
    let u0 = 0.5 * (1.0 - t1) * wb + 0.5 * (1.0 + t1) * w + 0.5 * t2 * p2;
    let um1 = t2 * (wb - w) + t1 * p2;
    let um2 = 0.5 * (1.0 + t1) * wb + 0.5 * (1.0 - t1) * w - 0.5 * t2 * p2;
    [u0, um1, um2]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2() -> PolytropicGas {
        PolytropicGas::new(2.0, 0.5).unwrap()
    }

    #[test]
    fn sound_speed_examples() {
        assert_eq!(g2().sound_speed(0.0).unwrap(), 0.0);
        assert!((g2().sound_speed(1.0).unwrap() - 1.0).abs() < 1e-15);
        let g = PolytropicGas::new(1.5, 2.0 / 3.0).unwrap();
        assert!((g.sound_speed(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(g2().sound_speed(-1.0).is_err());
    }

    #[test]
    fn enthalpy_examples() {
        assert_eq!(g2().enthalpy(1.0), 1.0);
        assert_eq!(g2().enthalpy(0.0), 0.0);
        let g3 = PolytropicGas { gamma: 3.0, k0: 1.0 };
        assert_eq!(g3.enthalpy(2.0), 2.0);
    }

    #[test]
    fn invariant_examples() {
        let g = g2();
        let i = g.to_invariants(PrimitiveState::new(1.0, 0.0, 0.0));
        assert_eq!((i.wbar, i.w, i.psi2), (1.0, 1.0, 0.0));
        let i = g.to_invariants(PrimitiveState::new(0.0, 0.0, 0.0));
        assert_eq!((i.wbar, i.w, i.psi2), (0.0, 0.0, 0.0));
        let i = g.to_invariants(PrimitiveState::new(1.0, 1.0, 0.0));
        assert_eq!((i.wbar, i.w, i.psi2), (1.5, 0.5, 0.0));
        let s = g.from_invariants(i).unwrap();
        assert_eq!((s.c, s.v1, s.v2), (1.0, 1.0, 0.0));
        assert!(g.from_invariants(RiemannInvariants { wbar: 0.0, w: 0.0, psi2: 0.0 }).unwrap().is_vacuum());
        assert!(g.from_invariants(RiemannInvariants { wbar: -1.0, w: 0.5, psi2: 0.0 }).is_err());
    }

    #[test]
    fn gamma_range_rejected() {
        assert!(PolytropicGas::new(3.0, 1.0).is_err());
        assert!(PolytropicGas::new(1.0, 1.0).is_err());
        assert!(PolytropicGas::new(2.0, 0.0).is_err());
    }

    #[test]
    fn data_width_default() {
        assert_eq!(g2().vacuum_width(1.0), 3.0);
        assert_eq!(g2().data_width(1.0), 1.5);
    }

    #[test]
    fn planar_normal_reduces_to_invariants() {
        let inv = RiemannInvariants { wbar: 0.7, w: 1.1, psi2: 0.0 };
        let u = diagonal_variables([-1.0, 0.0], inv);
        assert_eq!(u, [0.7, 0.0, 1.1]);
    }

    #[test]
    fn diagonal_variables_invert_through_eigenvectors() {
        let th = 0.3f64;
        let (t1, t2) = (th.cos(), th.sin());
        let inv = RiemannInvariants { wbar: 0.9, w: 1.3, psi2: -0.2 };
        let [u0, um1, um2] = diagonal_variables([t1, t2], inv);
        let wb = 0.5 * (1.0 - t1) * u0 + 0.5 * t2 * um1 + 0.5 * (1.0 + t1) * um2;
        let w = 0.5 * (1.0 - t1) * um2 + 0.5 * (1.0 + t1) * u0 - 0.5 * t2 * um1;
        let p2 = t1 * um1 + t2 * u0 - t2 * um2;
        assert!((wb - inv.wbar).abs() < 1e-14);
        assert!((w - inv.w).abs() < 1e-14);
        assert!((p2 - inv.psi2).abs() < 1e-14);
    }
}
