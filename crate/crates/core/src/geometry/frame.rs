//! First frame `(L, T, X)` adapted to the level sets of `u`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler2d::{FlowField, NamedPlane};
use crate::grid::Grid;
use crate::stencil::Stencil;

/// Smallest `|grad u|` accepted inside the band.
pub const MIN_GRADIENT: f64 = 1e-8;

/// The tracked region `u_lo <= u <= u_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub u_lo: f64,
    pub u_hi: f64,
}

impl Band {
    pub fn mask(&self, u: &[f64]) -> Vec<bool> {
        u.iter().map(|&x| x >= self.u_lo && x <= self.u_hi).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Foliation {
    pub time: f64,
    pub grid: Grid,
    pub u: Vec<f64>,
    pub mask: Vec<bool>,
    pub kappa: Vec<f64>,
    pub mu: Vec<f64>,
    pub that1: Vec<f64>,
    pub that2: Vec<f64>,
    pub xhat1: Vec<f64>,
    pub xhat2: Vec<f64>,
    pub chi: Vec<f64>,
    pub zeta: Vec<f64>,
    pub eta: Vec<f64>,
}

impl Foliation {
    /// Frame vector `X` applied to `f`, restricted to the band.
    pub fn xhat_of(&self, f: &[f64]) -> Vec<f64> {
        Stencil::masked(&self.grid, &self.mask).along(&self.xhat1, &self.xhat2, f)
    }

    /// `T f = kappa That . grad f` in the band.
    pub fn t_of(&self, f: &[f64]) -> Vec<f64> {
        let d = Stencil::masked(&self.grid, &self.mask).along(&self.that1, &self.that2, f);
        d.iter().zip(&self.kappa).map(|(d, k)| d * k).collect()
    }

    pub fn planes(&self) -> Vec<NamedPlane> {
        let mask: Vec<f64> = self.mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        [
            ("u", &self.u),
            ("mask", &mask),
            ("kappa", &self.kappa),
            ("mu", &self.mu),
            ("that1", &self.that1),
            ("that2", &self.that2),
            ("xhat1", &self.xhat1),
            ("xhat2", &self.xhat2),
            ("chi", &self.chi),
            ("zeta", &self.zeta),
            ("eta", &self.eta),
        ]
        .into_iter()
        .map(|(n, d)| NamedPlane { name: n.to_string(), data: d.clone() })
        .collect()
    }
}

/// Frame quantities of `field` for the acoustical function `u`.
///
/// Inside `mask` derivatives use only masked-in cells, so kinks outside the
/// band do not leak in. Outside it `grad u` is taken with plain centred
/// differences and the torsion fields are 0.
pub fn frame_fields(field: &FlowField, u: &[f64], mask: &[bool]) -> Result<Foliation> {
    let grid = field.grid;
    if u.len() != grid.len() || mask.len() != grid.len() {
        return Err(Error::GridMismatch("u or mask does not match the grid".into()));
    }
    let inner = Stencil::masked(&grid, mask);
    let outer = Stencil::new(&grid);
    let (a1, a2) = inner.grad(u);
    let (b1, b2) = outer.grad(u);
    let n = grid.len();
    let mut kappa = vec![0.0; n];
    let (mut t1, mut t2) = (vec![-1.0; n], vec![0.0; n]);
    for k in 0..n {
        let (g1, g2) = if mask[k] { (a1[k], a2[k]) } else { (b1[k], b2[k]) };
        let g = g1.hypot(g2);
        if g < MIN_GRADIENT {
            if mask[k] {
                return Err(Error::DegenerateFoliation { i: k % grid.n1, j: k / grid.n1, grad: g });
            }
            continue;
        }
        kappa[k] = 1.0 / g;
        t1[k] = g1 / g;
        t2[k] = g2 / g;
    }
    let [c, v1, v2] = field.primitive_planes();
    let mu: Vec<f64> = c.iter().zip(&kappa).map(|(c, k)| c * k).collect();
    let (x1, x2) = (t2.clone(), t1.iter().map(|t| -t).collect::<Vec<_>>());

    let along = |f: &[f64]| inner.along(&x1, &x2, f);
    let (xv1, xv2, xc, xk) = (along(&v1), along(&v2), along(&c), along(&kappa));
    let (xx1, xx2) = (along(&x1), along(&x2));
    let (mut chi, mut zeta, mut eta) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for k in (0..n).filter(|&k| mask[k]) {
        // psi_i = -v^i.
        let tx_psi = -(t1[k] * xv1[k] + t2[k] * xv2[k]);
        chi[k] = x1[k] * xv1[k] + x2[k] * xv2[k] - c[k] * x2[k] * xx1[k] + c[k] * x1[k] * xx2[k];
        zeta[k] = -kappa[k] * (tx_psi + xc[k]);
        eta[k] = -kappa[k] * tx_psi + c[k] * xk[k];
    }
    Ok(Foliation {
        time: field.time,
        grid,
        u: u.to_vec(),
        mask: mask.to_vec(),
        kappa,
        mu,
        that1: t1,
        that2: t2,
        xhat1: x1,
        xhat2: x2,
        chi,
        zeta,
        eta,
    })
}
