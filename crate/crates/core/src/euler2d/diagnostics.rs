use super::FlowField;
use crate::error::{Error, Result};
use crate::gas::Invariant;
use crate::stencil::{time_derivative, Stencil};

/// Centred curl `d1 v2 - d2 v1`.
pub fn vorticity(field: &FlowField) -> Vec<f64> {
    let [_, v1, v2] = field.primitive_planes();
    let st = Stencil::new(&field.grid);
    let a = st.d1(&v2);
    let b = st.d2(&v1);
    a.iter().zip(&b).map(|(a, b)| a - b).collect()
}

/// Residual of the transport equation of `which` along
/// `L = d_t + (v1 + c) d1 + v2 d2`:
///
/// - `wbar`: `L wbar - c/2 d2 psi2`
/// - `w`:    `L w - 2c d1 w - c/2 d2 psi2`
/// - `psi2`: `L psi2 - c d1 psi2 - c d2 (w + wbar)`
///
/// With two snapshots the residual is centred between them; with three or
/// more it is evaluated at the second.
pub fn transport_residual(snaps: &[FlowField], which: Invariant) -> Result<Vec<f64>> {
    if snaps.len() < 2 {
        return Err(Error::Precondition("transport residual needs two snapshots".into()));
    }
    for s in &snaps[1..] {
        snaps[0].grid.check_same(&s.grid)?;
    }
    let window = &snaps[..snaps.len().min(3)];
    let times: Vec<f64> = window.iter().map(|s| s.time).collect();
    let inv: Vec<[Vec<f64>; 3]> = window.iter().map(FlowField::invariant_planes).collect();
    let prim: Vec<[Vec<f64>; 3]> = window.iter().map(FlowField::primitive_planes).collect();
    let q = which as usize;
    let series: Vec<&[f64]> = inv.iter().map(|p| p[q].as_slice()).collect();

    // Spatial terms at the evaluation level(s).
    let spatial = |k: usize| -> Vec<f64> {
        let st = Stencil::new(&window[k].grid);
        let [c, v1, v2] = &prim[k];
        let [wb, w, p2] = &inv[k];
        let (d1f, d2f) = st.grad(&inv[k][q]);
        let d2p = st.d2(p2);
        let extra: Vec<f64> = match which {
            Invariant::Wbar => c.iter().zip(&d2p).map(|(c, d)| -0.5 * c * d).collect(),
            Invariant::W => (0..c.len()).map(|n| -2.0 * c[n] * d1f[n] - 0.5 * c[n] * d2p[n]).collect(),
            Invariant::Psi2 => {
                let s: Vec<f64> = w.iter().zip(wb).map(|(a, b)| a + b).collect();
                let d2s = st.d2(&s);
                (0..c.len()).map(|n| -c[n] * d1f[n] - c[n] * d2s[n]).collect()
            }
        };
        (0..c.len()).map(|n| (v1[n] + c[n]) * d1f[n] + v2[n] * d2f[n] + extra[n]).collect()
    };

    if window.len() == 2 {
        let dt = time_derivative(&times, &series, 0);
        let (a, b) = (spatial(0), spatial(1));
        Ok((0..dt.len()).map(|n| dt[n] + 0.5 * (a[n] + b[n])).collect())
    } else {
        let dt = time_derivative(&times, &series, 1);
        let s = spatial(1);
        Ok(dt.iter().zip(&s).map(|(a, b)| a + b).collect())
    }
}
