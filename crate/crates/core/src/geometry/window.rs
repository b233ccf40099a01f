//! Two or three consecutive snapshots analysed on a common band mask.
//!
//! Derivatives along `L` and `Lring` combine a Lagrange time derivative over
//! the snapshot levels with centred spatial differences at the evaluation
//! level, so each is first-order consistent with the transport it measures.

use serde::{Deserialize, Serialize};

use super::frame::{frame_fields, Band, Foliation};
use super::second::{second_frame, t_ring, x_ring, SecondFrame};
use crate::error::{Error, Result};
use crate::euler2d::FlowField;
use crate::stencil::{time_weights, Stencil};

/// Everything derived from one snapshot.
#[derive(Debug, Clone)]
pub struct Slice {
    pub field: FlowField,
    /// `(c, v1, v2)`.
    pub prim: [Vec<f64>; 3],
    /// `(wbar, w, psi2)`.
    pub inv: [Vec<f64>; 3],
    pub foliation: Foliation,
    pub ring: SecondFrame,
}

impl Slice {
    pub fn time(&self) -> f64 {
        self.field.time
    }
}

#[derive(Debug, Clone)]
pub struct Window {
    pub slices: Vec<Slice>,
    /// Index of the evaluation level.
    pub at: usize,
    pub mask: Vec<bool>,
}

impl Window {
    /// Slices for `fields` with their `u`; the mask is the band at level `at`.
    pub fn new(fields: &[FlowField], us: &[Vec<f64>], at: usize, band: Band) -> Result<Self> {
        if !(2..=3).contains(&fields.len()) || fields.len() != us.len() || at >= fields.len() {
            return Err(Error::Precondition("a window needs 2 or 3 aligned snapshots".into()));
        }
        for f in &fields[1..] {
            fields[0].grid.check_same(&f.grid)?;
        }
        if fields.windows(2).any(|w| w[1].time <= w[0].time) {
            return Err(Error::Precondition("window times must increase".into()));
        }
        let mask = band.mask(&us[at]);
        let slices = fields
            .iter()
            .zip(us)
            .map(|(f, u)| {
                Ok(Slice {
                    prim: f.primitive_planes(),
                    inv: f.invariant_planes(),
                    foliation: frame_fields(f, u, &mask)?,
                    ring: second_frame(f, Some(&mask)),
                    field: f.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { slices, at, mask })
    }

    pub fn centre(&self) -> &Slice {
        &self.slices[self.at]
    }

    pub fn time(&self) -> f64 {
        self.centre().time()
    }

    pub fn stencil(&self) -> Stencil<'_> {
        Stencil::masked(&self.centre().field.grid, &self.mask)
    }

    /// Apply `f` to every slice.
    pub fn map(&self, f: impl Fn(&Slice) -> Vec<f64>) -> Vec<Vec<f64>> {
        self.slices.iter().map(f).collect()
    }

    fn transport(&self, per: &[Vec<f64>], a1: &[f64], a2: &[f64]) -> Vec<f64> {
        let times: Vec<f64> = self.slices.iter().map(Slice::time).collect();
        let w = time_weights(&times, self.at);
        let (g1, g2) = self.stencil().grad(&per[self.at]);
        (0..g1.len())
            .map(|k| {
                if !self.mask[k] {
                    return 0.0;
                }
                let dt: f64 = w.iter().zip(per).map(|(w, f)| w * f[k]).sum();
                dt + a1[k] * g1[k] + a2[k] * g2[k]
            })
            .collect()
    }

    /// `L f = d_t f + (v - c That) . grad f` at the evaluation level.
    pub fn l_first(&self, per: &[Vec<f64>]) -> Vec<f64> {
        let s = self.centre();
        let [c, v1, v2] = &s.prim;
        let f = &s.foliation;
        let a1: Vec<f64> = (0..c.len()).map(|k| v1[k] - c[k] * f.that1[k]).collect();
        let a2: Vec<f64> = (0..c.len()).map(|k| v2[k] - c[k] * f.that2[k]).collect();
        self.transport(per, &a1, &a2)
    }

    /// `Lring f = d_t f + (v1 + c) d1 f + v2 d2 f`.
    pub fn l_ring(&self, per: &[Vec<f64>]) -> Vec<f64> {
        let [c, v1, v2] = &self.centre().prim;
        let a1: Vec<f64> = v1.iter().zip(c).map(|(v, c)| v + c).collect();
        self.transport(per, &a1, v2)
    }

    /// `Lbar f = c^-1 kappa L f + 2 kappa That . grad f`.
    pub fn lbar_first(&self, per: &[Vec<f64>]) -> Vec<f64> {
        let lf = self.l_first(per);
        let s = self.centre();
        let tf = s.foliation.t_of(&per[self.at]);
        (0..lf.len()).map(|k| s.prim[0][k].recip() * s.foliation.kappa[k] * lf[k] + 2.0 * tf[k]).collect()
    }

    /// Maximum of `|f|` over the band.
    pub fn band_max_abs(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.mask).filter(|(_, m)| **m).fold(0.0, |a, (x, _)| a.max(x.abs()))
    }

    /// `(min, max)` of `f` over the band.
    pub fn band_range(&self, f: &[f64]) -> (f64, f64) {
        f.iter()
            .zip(&self.mask)
            .filter(|(_, m)| **m)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (x, _)| (lo.min(*x), hi.max(*x)))
    }
}

/// `yring Tring wbar - [Lring Xring wbar - 1/2 Xring(c Xring psi2) + chiring Xring wbar]`.
pub fn commutation_residual_y(win: &Window) -> Vec<f64> {
    let st = win.stencil();
    let xw = win.map(|s| x_ring(&st, &s.inv[0]));
    let lxw = win.l_ring(&xw);
    let s = win.centre();
    let t = s.time();
    let c = &s.prim[0];
    let twb = t_ring(&st, t, &s.inv[0]);
    let cxp: Vec<f64> = x_ring(&st, &s.inv[2]).iter().zip(c).map(|(d, c)| c * d).collect();
    let xcxp = x_ring(&st, &cxp);
    let r = &s.ring;
    (0..c.len())
        .map(|k| {
            if !win.mask[k] {
                return 0.0;
            }
            r.yring[k] * twb[k] - (lxw[k] - 0.5 * xcxp[k] + r.chiring[k] * xw[win.at][k])
        })
        .collect()
}

/// `zring Tring wbar - [Lring Tring wbar - Tring Lring wbar + etaring Xring wbar]`.
pub fn commutation_residual_z(win: &Window) -> Vec<f64> {
    let st = win.stencil();
    let tw = win.map(|s| t_ring(&st, s.time(), &s.inv[0]));
    let ltw = win.l_ring(&tw);
    let wb: Vec<Vec<f64>> = win.map(|s| s.inv[0].clone());
    let lw = win.l_ring(&wb);
    let s = win.centre();
    let tlw = t_ring(&st, s.time(), &lw);
    let xw = x_ring(&st, &s.inv[0]);
    let r = &s.ring;
    (0..xw.len())
        .map(|k| {
            if !win.mask[k] {
                return 0.0;
            }
            r.zring[k] * tw[win.at][k] - (ltw[k] - tlw[k] + r.etaring[k] * xw[k])
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub time: f64,
    /// Max of `|L kappa - m' - e' kappa|`.
    pub l_kappa: f64,
    /// Max of `|L That^k - (That^j X psi_j + X c) X^k|` over `k`.
    pub l_that: f64,
    pub m_prime_range: (f64, f64),
}

/// Structure-equation residual fields `(L kappa, L That^1, L That^2)` and `m'`.
pub fn structure_fields(win: &Window) -> [Vec<f64>; 4] {
    let gamma = win.centre().field.gas.gamma();
    let kap = win.map(|s| s.foliation.kappa.clone());
    let th1 = win.map(|s| s.foliation.that1.clone());
    let th2 = win.map(|s| s.foliation.that2.clone());
    let v1 = win.map(|s| s.prim[1].clone());
    let v2 = win.map(|s| s.prim[2].clone());
    let (lk, lt1, lt2, lv1, lv2) = (win.l_first(&kap), win.l_first(&th1), win.l_first(&th2), win.l_first(&v1), win.l_first(&v2));
    let s = win.centre();
    let f = &s.foliation;
    let [c, p1, p2] = &s.prim;
    let tc = f.t_of(c);
    let (xv1, xv2, xc) = (f.xhat_of(p1), f.xhat_of(p2), f.xhat_of(c));
    let n = c.len();
    let (mut rk, mut r1, mut r2, mut mp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for k in (0..n).filter(|&k| win.mask[k]) {
        let m = -(gamma + 1.0) / (gamma - 1.0) * tc[k];
        // psi_i = -v^i.
        let e = -(f.that1[k] * lv1[k] + f.that2[k] * lv2[k]) / c[k];
        rk[k] = lk[k] - m - e * f.kappa[k];
        let tor = -(f.that1[k] * xv1[k] + f.that2[k] * xv2[k]) + xc[k];
        r1[k] = lt1[k] - tor * f.xhat1[k];
        r2[k] = lt2[k] - tor * f.xhat2[k];
        mp[k] = m;
    }
    [rk, r1, r2, mp]
}

pub fn structure_residuals(win: &Window) -> StructureReport {
    let [rk, r1, r2, mp] = structure_fields(win);
    StructureReport {
        time: win.time(),
        l_kappa: win.band_max_abs(&rk),
        l_that: win.band_max_abs(&r1).max(win.band_max_abs(&r2)),
        m_prime_range: win.band_range(&mp),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub time: f64,
    pub l_mu: (f64, f64),
    pub t_wbar: (f64, f64),
    pub lbar_wbar: (f64, f64),
}

/// Ranges of `L mu`, `Tring wbar` and `Lbar_ring wbar = 2 Tring wbar + c^-1 t Lring wbar` over the band.
pub fn sign_monitors(win: &Window) -> SignReport {
    let st = win.stencil();
    let mu = win.map(|s| s.foliation.mu.clone());
    let lmu = win.l_first(&mu);
    let wb = win.map(|s| s.inv[0].clone());
    let lw = win.l_ring(&wb);
    let s = win.centre();
    let t = s.time();
    let tw = t_ring(&st, t, &s.inv[0]);
    let lbar: Vec<f64> = (0..tw.len()).map(|k| 2.0 * tw[k] + t / s.prim[0][k] * lw[k]).collect();
    SignReport { time: t, l_mu: win.band_range(&lmu), t_wbar: win.band_range(&tw), lbar_wbar: win.band_range(&lbar) }
}
