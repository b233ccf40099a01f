//! Size conditions on the data slice `t = delta`.

use serde::{Deserialize, Serialize};

use crate::gas::{Invariant, PolytropicGas};
use crate::geometry::Window;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub name: String,
    /// Measured sup norm.
    pub value: f64,
    /// The size the norm is compared against, e.g. `eps delta`.
    pub scale: f64,
    /// Largest accepted `value / scale`.
    pub cap: f64,
    /// Absolute allowance for discretisation error.
    pub floor: f64,
    pub pass: bool,
}

impl Predicate {
    fn new(name: &str, value: f64, scale: f64, cap: f64, floor: f64) -> Self {
        Self { name: name.into(), value, scale, cap, floor, pass: value <= cap * scale + floor }
    }

    /// Measured constant `value / scale`.
    pub fn constant(&self) -> f64 {
        self.value / self.scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateReport {
    pub u_star: f64,
    pub predicates: Vec<Predicate>,
}

impl PredicateReport {
    pub fn all_pass(&self) -> bool {
        self.predicates.iter().all(|p| p.pass)
    }
}

/// `u* = (gamma + 1) / (2 (gamma - 1)) c0`.
pub fn u_star(gas: &PolytropicGas, c0: f64) -> f64 {
    gas.data_width(c0)
}

/// Evaluates the pointwise data conditions on the window's evaluation level,
/// which should be the slice `t = delta`.
pub fn check_data_predicates(win: &Window, c0: f64, epsilon: f64, delta: f64, cap: f64, floor: f64) -> PredicateReport {
    let s = win.centre();
    let gas = s.field.gas;
    let g = gas.gamma();
    let f = &s.foliation;
    let sup = |v: &[f64]| win.band_max_abs(v);

    let mut lx: f64 = 0.0;
    for psi in Invariant::ALL {
        let per = win.map(|s| s.inv[psi as usize].clone());
        let l = sup(&win.l_first(&per));
        let x = sup(&f.xhat_of(&s.inv[psi as usize]));
        lx = lx.max(l + x);
    }
    let tw = sup(&f.t_of(&s.inv[1]));
    let tp = sup(&f.t_of(&s.inv[2]));
    let twb: Vec<f64> = f.t_of(&s.inv[0]).iter().map(|v| v + 2.0 / (g + 1.0)).collect();
    let tsum = tw + tp + sup(&twb);
    let kap: Vec<f64> = f.kappa.iter().map(|k| k / delta - 1.0).collect();
    let k_t2 = sup(&kap) + sup(&f.that2);
    let t1: Vec<f64> = f.that1.iter().map(|t| t + 1.0).collect();

    let predicates = vec![
        Predicate::new("L psi + X psi", lx, epsilon, cap, floor),
        Predicate::new("T w + T psi2 + |T wbar + 2/(gamma+1)|", tsum, epsilon * delta, cap, floor),
        Predicate::new("kappa/delta - 1 + That2", k_t2, epsilon * delta, cap, floor),
        Predicate::new("That1 + 1", sup(&t1), epsilon * epsilon * delta * delta, cap, floor),
    ];
    PredicateReport { u_star: u_star(&gas, c0), predicates }
}
