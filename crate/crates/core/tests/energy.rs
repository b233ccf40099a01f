//! Energies and data predicates on the unperturbed fan, where every
//! quantity has a closed form.

use rarewave::energy::{
    apply_frame_derivative, check_data_predicates, energy_incoming, energy_order_n, energy_outgoing, fit_constants, gronwall_verify,
    u_star, FrameDerivativeOp, FrameVector, GronwallInstance,
};
use rarewave::euler2d::FlowField;
use rarewave::gas::{Invariant, PolytropicGas, PrimitiveState};
use rarewave::geometry::{Band, Window};
use rarewave::riemann::centered_fan;
use rarewave::{Error, Grid};

fn gas2() -> PolytropicGas {
    PolytropicGas::new(2.0, 0.5).unwrap()
}

/// Window around `t` on the 1D fan of `(v0, c0) = (0, 1)`.
fn fan_window(t: f64) -> Window {
    let grid = Grid::new(256, 8, -2.2 * t, 1.5 * t).unwrap();
    let fan = centered_fan(gas2(), 0.0, 1.0).unwrap();
    let h = 0.5 * grid.dx1();
    let (fs, us): (Vec<FlowField>, Vec<Vec<f64>>) = [t - h, t, t + h]
        .iter()
        .map(|&s| {
            let f = FlowField::from_primitive(s, grid, gas2(), |x1, _| {
                let st = fan.at_slope((x1 / s).clamp(fan.vacuum_slope() + 0.3, fan.head()));
                PrimitiveState::new(st.c, st.v, 0.0)
            });
            let u = (0..grid.len()).map(|k| fan.head() - grid.x1(k % grid.n1) / s).collect();
            (f, u)
        })
        .unzip();
    Window::new(&fs, &us, 1, Band { u_lo: 0.2, u_hi: 2.0 }).unwrap()
}

#[test]
fn constant_function_has_no_energy() {
    let win = fan_window(1.0);
    let per = vec![vec![0.7; win.mask.len()]; 3];
    let (e, ebar) = (energy_outgoing(&win, &per, 0.3, 1.5), energy_incoming(&win, &per, 0.3, 1.5));
    assert!(e < 1e-24 && ebar < 1e-24, "{e:e} {ebar:e}");
}

#[test]
fn fan_frame_derivatives() {
    let win = fan_window(1.0);
    let s = win.centre();
    let twb = s.foliation.t_of(&s.inv[0]);
    let mut n = 0;
    for k in (0..twb.len()).filter(|&k| win.mask[k]) {
        assert!((twb[k] + 2.0 / 3.0).abs() < 1e-10, "T wbar = {}", twb[k]);
        n += 1;
    }
    assert!(n > 100);

    // w is constant across the fan. wbar is transported along L and
    // constant along X, so only the incoming energy sees it.
    let w = win.map(|s| s.inv[1].clone());
    let wb = win.map(|s| s.inv[0].clone());
    let (ew, ewb) = (energy_outgoing(&win, &w, 0.3, 1.5), energy_incoming(&win, &wb, 0.3, 1.5));
    assert!(energy_outgoing(&win, &wb, 0.3, 1.5) < 1e-6 * ewb);
    assert!(ew < 1e-20 && ewb > 1e-3, "E(w) = {ew:e}, E(wbar) = {ewb:e}");
}

#[test]
fn words_with_x_vanish_on_planar_data() {
    let win = fan_window(1.0);
    for op in FrameDerivativeOp::all_of_order(2).unwrap() {
        if op.word().contains(&FrameVector::X) {
            let per = apply_frame_derivative(&op, &win, Invariant::Wbar);
            assert_eq!(energy_outgoing(&win, &per, 0.3, 1.5), 0.0, "{op}");
            assert_eq!(energy_incoming(&win, &per, 0.3, 1.5), 0.0, "{op}");
        }
    }
    let tt = apply_frame_derivative(&FrameDerivativeOp::new(vec![FrameVector::T]).unwrap(), &win, Invariant::Wbar);
    let s = tt[win.at].iter().zip(&win.mask).filter(|(_, m)| **m).map(|(v, _)| (v + 2.0 / 3.0).abs()).fold(0.0, f64::max);
    assert!(s < 1e-10, "Tring wbar deviates by {s:e}");
    assert!(FrameDerivativeOp::new(vec![FrameVector::X; 4]).is_err());
}

#[test]
fn order_zero_energy_is_the_sum_of_both_parts() {
    let win = fan_window(1.0);
    for psi in [Invariant::Wbar, Invariant::W] {
        let per = win.map(|s| s.inv[psi as usize].clone());
        let (words, total) = energy_order_n(&win, psi, 0, 0.3, 1.5).unwrap();
        assert_eq!(words.len(), 1);
        let sum = energy_outgoing(&win, &per, 0.3, 1.5) + energy_incoming(&win, &per, 0.3, 1.5);
        assert!((total - sum).abs() <= 1e-14 * sum.max(1e-300));
    }
    let (words, _) = energy_order_n(&win, Invariant::Wbar, 2, 0.3, 1.5).unwrap();
    assert_eq!(words.len(), 4);
}

#[test]
fn data_predicates_on_the_fan() {
    assert!((u_star(&gas2(), 1.0) - 1.5).abs() < 1e-15);
    let delta = 0.5;
    let win = fan_window(delta);
    let rep = check_data_predicates(&win, 1.0, 0.01, delta, 10.0, 0.1);
    assert_eq!(rep.predicates.len(), 4);
    assert!(rep.all_pass(), "{rep:?}");
    // The unperturbed data have flat fronts: T and kappa terms vanish.
    assert!(rep.predicates[2].value < 1e-8, "{:?}", rep.predicates[2]);
    assert!(rep.predicates[3].value < 1e-12, "{:?}", rep.predicates[3]);
}

fn lattice(e: f64, f: f64) -> GronwallInstance {
    let t = vec![0.1, 0.2, 0.4, 0.8];
    let u = vec![0.5, 1.0, 1.5];
    GronwallInstance { a: 1.0, b: 0.1, c: 0.5, e: vec![vec![e; 3]; 4], f: vec![vec![f; 3]; 4], t, u }
}

#[test]
fn zero_energies_give_zero_ratio() {
    let v = gronwall_verify(&lattice(0.0, 0.0)).unwrap();
    assert_eq!(v.max_ratio, 0.0);
    assert!(v.pass);
}

#[test]
fn gronwall_rejections() {
    // Large constant energies violate the hypothesis at the first time.
    assert!(matches!(gronwall_verify(&lattice(1.0, 1.0)), Err(Error::Hypothesis { .. })));
    let mut bad = lattice(0.0, 0.0);
    bad.c = 2.0;
    assert!(matches!(gronwall_verify(&bad), Err(Error::Precondition(_))));
    let mut neg = lattice(0.0, 0.0);
    neg.e[1][1] = -1.0;
    assert!(gronwall_verify(&neg).is_err());
}

#[test]
fn fitted_constants_satisfy_their_hypothesis() {
    let t: Vec<f64> = (0..8).map(|i| 0.1 * 1.3f64.powi(i)).collect();
    let u = vec![0.5, 0.8, 1.1, 1.4];
    let e: Vec<Vec<f64>> = t.iter().map(|t| u.iter().map(|u| 0.3 * t * t * (1.0 + 0.2 * u)).collect()).collect();
    let f: Vec<Vec<f64>> = t.iter().map(|t| u.iter().map(|_| 0.1 * t * t).collect()).collect();
    let (inst, _) = fit_constants(&t, &u, &e, &f).unwrap();
    let v = gronwall_verify(&inst).unwrap();
    assert!(v.pass, "{v:?}");
}
