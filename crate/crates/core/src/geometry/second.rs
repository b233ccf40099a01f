//! Second null frame `Lring = d_t + (v1 + c) d1 + v2 d2`, `Tring = -t d1`,
//! `Xring = d2`, with `kappa_ring = t`.

use serde::{Deserialize, Serialize};

use crate::euler2d::{FlowField, NamedPlane};
use crate::stencil::Stencil;

#[derive(Debug, Clone, PartialEq)]
pub struct SecondFrame {
    pub time: f64,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub yring: Vec<f64>,
    pub zring: Vec<f64>,
    pub chiring: Vec<f64>,
    pub etaring: Vec<f64>,
}

impl SecondFrame {
    pub fn kapparing(&self) -> f64 {
        self.time
    }

    pub fn planes(&self) -> Vec<NamedPlane> {
        [
            ("y", &self.y),
            ("z", &self.z),
            ("yring", &self.yring),
            ("zring", &self.zring),
            ("chiring", &self.chiring),
            ("etaring", &self.etaring),
        ]
        .into_iter()
        .map(|(n, d)| NamedPlane { name: n.to_string(), data: d.clone() })
        .collect()
    }
}

/// `Tring f = -t d1 f`.
pub fn t_ring(st: &Stencil, t: f64, f: &[f64]) -> Vec<f64> {
    st.d1(f).into_iter().map(|d| -t * d).collect()
}

/// `Xring f = d2 f`.
pub fn x_ring(st: &Stencil, f: &[f64]) -> Vec<f64> {
    st.d2(f)
}

/// `y, z, chiring, etaring` of one snapshot; with a mask, differences stay
/// inside it and cells outside are 0.
pub fn second_frame(field: &FlowField, mask: Option<&[bool]>) -> SecondFrame {
    let st = match mask {
        Some(m) => Stencil::masked(&field.grid, m),
        None => Stencil::new(&field.grid),
    };
    let t = field.time;
    let [c, v1, v2] = field.primitive_planes();
    let fast: Vec<f64> = v1.iter().zip(&c).map(|(v, c)| v + c).collect();
    let (d1f, y) = st.grad(&fast);
    let (d1v2, chiring) = st.grad(&v2);
    let inside = |k: usize| mask.map_or(true, |m| m[k]);
    let z: Vec<f64> = (0..c.len()).map(|k| if inside(k) { 1.0 - t * d1f[k] } else { 0.0 }).collect();
    let etaring: Vec<f64> = d1v2.iter().map(|d| -t * d).collect();
    SecondFrame {
        time: t,
        yring: y.iter().map(|y| y / t).collect(),
        zring: z.iter().map(|z| z / t).collect(),
        y,
        z,
        chiring,
        etaring,
    }
}

/// Which commutator a deformation tensor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Commutator {
    X,
    T,
}

/// Components of the deformation tensor of one commutator in the frame
/// `(Lring, Lbar_ring, Xring)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Deformation {
    pub pi_ll: f64,
    pub pi_lblb: f64,
    pub pi_llb: f64,
    pub pi_lx: f64,
    pub pi_lbx: f64,
    pub pi_xx: f64,
}

impl Deformation {
    /// Table entries from pointwise values: `rate` is `y` for `X` and `z`
    /// for `T`, `zc` is the commutator applied to `c`, `twist` is `chiring`
    /// for `X` and `etaring` for `T`.
    pub fn from_values(c: f64, t: f64, rate: f64, zc: f64, twist: f64) -> Self {
        Self {
            pi_ll: -2.0 * c * rate,
            pi_lblb: 2.0 * t * t / c * (rate - 2.0 * zc),
            pi_llb: -2.0 * t * zc,
            pi_lx: -twist,
            pi_lbx: -t / c * twist,
            pi_xx: 0.0,
        }
    }
}

/// Field version: one plane per component.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationComponents {
    pub commutator: Commutator,
    pub pi_ll: Vec<f64>,
    pub pi_lblb: Vec<f64>,
    pub pi_llb: Vec<f64>,
    pub pi_lx: Vec<f64>,
    pub pi_lbx: Vec<f64>,
    pub pi_xx: Vec<f64>,
}

/// Deformation tensors of `Xring` and `Tring`, in that order.
pub fn deformation_components(frame: &SecondFrame, field: &FlowField, mask: Option<&[bool]>) -> [DeformationComponents; 2] {
    let st = match mask {
        Some(m) => Stencil::masked(&field.grid, m),
        None => Stencil::new(&field.grid),
    };
    let t = frame.time;
    let [c, ..] = field.primitive_planes();
    let xc = x_ring(&st, &c);
    let tc = t_ring(&st, t, &c);
    let build = |which: Commutator, rate: &[f64], zc: &[f64], twist: &[f64]| {
        let rows: Vec<Deformation> = (0..c.len()).map(|k| Deformation::from_values(c[k], t, rate[k], zc[k], twist[k])).collect();
        let col = |f: fn(&Deformation) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
        DeformationComponents {
            commutator: which,
            pi_ll: col(|d| d.pi_ll),
            pi_lblb: col(|d| d.pi_lblb),
            pi_llb: col(|d| d.pi_llb),
            pi_lx: col(|d| d.pi_lx),
            pi_lbx: col(|d| d.pi_lbx),
            pi_xx: col(|d| d.pi_xx),
        }
    };
    [
        build(Commutator::X, &frame.y, &xc, &frame.chiring),
        build(Commutator::T, &frame.z, &tc, &frame.etaring),
    ]
}
