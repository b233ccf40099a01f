mod common;

use common::*;

#[test]
fn fan_matches_closed_form() {
    let r = fan_oracle(1000, 7);
    assert!(r.formula <= 1e-14, "{r:?}");
    assert!(r.w_spread <= 1e-12, "{r:?}");
}

#[test]
fn riemann_round_trip_holds() {
    let r = riemann_round_trip(1000, 11);
    assert_eq!(r.errors, 0, "{r:?}");
    assert!(r.max_jump_residual <= 1e-10 && r.lax_failures == 0, "{r:?}");
    assert!(r.max_edge_gap <= 1e-10, "{r:?}");
    assert_eq!(r.vacuum_mismatches, 0, "{r:?}");
    assert!(r.shocks > 50 && r.rarefactions > 50 && r.vacuums > 10, "sample lacks variety: {r:?}");
}

#[test]
fn gronwall_constructed_and_mutated() {
    let r = gronwall_oracle(1000, 100, 3);
    assert_eq!(r.constructed_failures, 0, "{r:?}");
    assert!(r.max_ratio <= 1.0, "{r:?}");
    assert_eq!(r.missed, 0, "{r:?}");
}
