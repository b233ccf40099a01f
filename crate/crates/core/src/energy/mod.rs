//! Energies, fluxes, data predicates and the refined Gronwall check.

mod gronwall;
mod norms;
mod predicates;
mod quadrature;
mod words;

pub use gronwall::{fit_constants, gronwall_verify, mutate, synthetic_instance, GronwallInstance, Verdict};
pub use norms::{
    densities, energy_incoming, energy_order_n, energy_outgoing, flux_lines, ring_densities, ring_energy_0_wbar, Densities, EnergyReport,
    EnergyRow, EnergyTracker, Norm, WordEnergy,
};
pub use predicates::{check_data_predicates, u_star, Predicate, PredicateReport};
pub use quadrature::{band_integral, cumulative_trapezoid, fraction_below, level_line_integral};
pub use words::{apply_frame_derivative, FrameDerivativeOp, FrameVector, ORDER_CAP};
