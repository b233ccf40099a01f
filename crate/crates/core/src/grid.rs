use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cell-centred grid on `[x1_min, x1_max] x [0, 2 pi)`, periodic in `x2`.
///
/// Planes are stored row-major with `x2` rows: `idx(i, j) = j * n1 + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n1: usize,
    pub n2: usize,
    pub x1_min: f64,
    pub x1_max: f64,
}

impl Grid {
    pub fn new(n1: usize, n2: usize, x1_min: f64, x1_max: f64) -> Result<Self> {
        if n1 < 8 || n2 < 8 {
            return Err(Error::Config(format!("grid {n1}x{n2} below the 8x8 minimum")));
        }
        if !(x1_max > x1_min) || !x1_min.is_finite() || !x1_max.is_finite() {
            return Err(Error::Config(format!("empty x1 range [{x1_min}, {x1_max}]")));
        }
        Ok(Self { n1, n2, x1_min, x1_max })
    }

    #[inline]
    pub fn dx1(&self) -> f64 {
        (self.x1_max - self.x1_min) / self.n1 as f64
    }

    #[inline]
    pub fn dx2(&self) -> f64 {
        std::f64::consts::TAU / self.n2 as f64
    }

    #[inline]
    pub fn x1(&self, i: usize) -> f64 {
        self.x1_min + (i as f64 + 0.5) * self.dx1()
    }

    #[inline]
    pub fn x2(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dx2()
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n1 + i
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.dx1() * self.dx2()
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}
