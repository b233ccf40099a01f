//! Oracles shared by the integration tests and the acceptance suite.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rarewave::energy::{gronwall_verify, mutate, synthetic_instance};
use rarewave::gas::PolytropicGas;
use rarewave::riemann::{centered_fan, lax_admissible, shock_jump_residual, solve_riemann, Middle, RiemannProblem1D, State1D, WaveDescriptor};
use rarewave::Error;

pub fn gas2() -> PolytropicGas {
    PolytropicGas::new(2.0, 0.5).unwrap()
}

#[derive(Debug, Default)]
pub struct FanOracle {
    /// Largest deviation from the closed-form `(v, c)` of the fan.
    pub formula: f64,
    /// Largest deviation of `w` from its value on the right state.
    pub w_spread: f64,
}

/// Samples `n` points inside the fan of `(v0, c0) = (0, 1)`, `gamma = 2`.
pub fn fan_oracle(n: usize, seed: u64) -> FanOracle {
    let gas = gas2();
    let (g, v0, c0) = (2.0, 0.0, 1.0);
    let fan = centered_fan(gas, v0, c0).unwrap();
    let shift = (g - 1.0) / (g + 1.0) * v0 - 2.0 / (g + 1.0) * c0;
    let w0 = 0.5 * (2.0 * c0 / (g - 1.0) - v0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = FanOracle::default();
    for _ in 0..n {
        let t: f64 = rng.gen_range(0.01..10.0);
        let xi: f64 = rng.gen_range(fan.vacuum_slope()..fan.head());
        let s = fan.state(xi * t, t).unwrap();
        let xt = xi * t / t;
        let v = 2.0 / (g + 1.0) * xt + shift;
        let c = (g - 1.0) / (g + 1.0) * xt - shift;
        out.formula = out.formula.max((s.v - v).abs()).max((s.c - c).abs());
        out.w_spread = out.w_spread.max((0.5 * (2.0 * s.c / (g - 1.0) - s.v) - w0).abs());
    }
    out
}

#[derive(Debug, Default)]
pub struct RiemannRoundTrip {
    pub problems: usize,
    pub shocks: usize,
    pub rarefactions: usize,
    pub vacuums: usize,
    pub max_jump_residual: f64,
    pub lax_failures: usize,
    pub max_edge_gap: f64,
    pub vacuum_mismatches: usize,
    pub errors: usize,
}

fn random_state(rng: &mut impl Rng) -> State1D {
    State1D::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.2..2.0))
}

/// Gap across the edge `xi` of a wave fan.
fn edge_gap(fan: &rarewave::riemann::WaveFan, xi: f64) -> f64 {
    let h = 1e-13 * (1.0 + xi.abs());
    let (a, b) = (fan.evaluate(xi - h), fan.evaluate(xi + h));
    (a.v - b.v).abs().max((a.c - b.c).abs())
}

/// `n` random problems with random `gamma` in `[1.2, 2.8]`.
pub fn riemann_round_trip(n: usize, seed: u64) -> RiemannRoundTrip {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = RiemannRoundTrip::default();
    for _ in 0..n {
        let gas = PolytropicGas::new(rng.gen_range(1.2..2.8), rng.gen_range(0.2..2.0)).unwrap();
        let g = gas.gamma();
        let (left, right) = (random_state(&mut rng), random_state(&mut rng));
        out.problems += 1;
        let Ok(fan) = solve_riemann(RiemannProblem1D { gas, left, right }) else {
            out.errors += 1;
            continue;
        };
        // Vacuum iff wbar_left + w_right < 0, the two invariants carried into the middle.
        let analytic = (left.c / (g - 1.0) + 0.5 * left.v) + (right.c / (g - 1.0) - 0.5 * right.v) < 0.0;
        if analytic != (fan.middle == Middle::Vacuum) {
            out.vacuum_mismatches += 1;
        }
        let middle = match fan.middle {
            Middle::State { v, c } => Some(State1D::new(v, c)),
            Middle::Vacuum => {
                out.vacuums += 1;
                None
            }
        };
        for (family, wave, a, b) in [(1u8, fan.wave1, Some(left), middle), (2, fan.wave2, middle, Some(right))] {
            match wave {
                WaveDescriptor::Shock { .. } => {
                    out.shocks += 1;
                    let (a, b) = (a.unwrap(), b.unwrap());
                    out.max_jump_residual = out.max_jump_residual.max(shock_jump_residual(gas, a, b).abs());
                    if !lax_admissible(gas, a, b, family).unwrap_or(false) {
                        out.lax_failures += 1;
                    }
                }
                WaveDescriptor::Rarefaction { head, tail, .. } => {
                    out.rarefactions += 1;
                    out.max_edge_gap = out.max_edge_gap.max(edge_gap(&fan, head)).max(edge_gap(&fan, tail));
                }
            }
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct GronwallOracle {
    pub constructed: usize,
    pub constructed_failures: usize,
    pub max_ratio: f64,
    pub mutated: usize,
    /// Mutated instances not flagged at the hypothesis stage.
    pub missed: usize,
}

pub fn gronwall_oracle(constructed: usize, mutated: usize, seed: u64) -> GronwallOracle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = GronwallOracle::default();
    let mut pool = Vec::new();
    for _ in 0..constructed {
        let inst = synthetic_instance(&mut rng);
        out.constructed += 1;
        match gronwall_verify(&inst) {
            Ok(v) if v.pass && v.max_ratio <= 1.0 => out.max_ratio = out.max_ratio.max(v.max_ratio),
            _ => out.constructed_failures += 1,
        }
        pool.push(inst);
    }
    for inst in pool.iter().take(mutated) {
        out.mutated += 1;
        let m = mutate(inst, &mut rng);
        if !matches!(gronwall_verify(&m), Err(Error::Hypothesis { .. })) {
            out.missed += 1;
        }
    }
    out
}
