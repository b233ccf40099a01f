use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::Invariant;
use crate::geometry::{t_ring, x_ring, Window};
use crate::stencil::Stencil;

/// Highest word length handled.
pub const ORDER_CAP: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameVector {
    /// `Xring = d2`.
    X,
    /// `Tring = -t d1`.
    T,
}

/// A word in `{Xring, Tring}`; letters are applied left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FrameDerivativeOp {
    word: Vec<FrameVector>,
}

impl FrameDerivativeOp {
    pub fn new(word: Vec<FrameVector>) -> Result<Self> {
        if word.len() > ORDER_CAP {
            return Err(Error::Config(format!("word of order {} exceeds the cap {ORDER_CAP}", word.len())));
        }
        Ok(Self { word })
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn order(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[FrameVector] {
        &self.word
    }

    /// All `2^n` words of length `n`.
    pub fn all_of_order(n: usize) -> Result<Vec<Self>> {
        if n > ORDER_CAP {
            return Err(Error::Config(format!("order {n} exceeds the cap {ORDER_CAP}")));
        }
        Ok((0..1usize << n)
            .map(|bits| Self {
                word: (0..n).map(|b| if bits >> b & 1 == 1 { FrameVector::T } else { FrameVector::X }).collect(),
            })
            .collect())
    }

    pub fn apply(&self, st: &Stencil, t: f64, f: &[f64]) -> Vec<f64> {
        let mut g = f.to_vec();
        for v in &self.word {
            g = match v {
                FrameVector::X => x_ring(st, &g),
                FrameVector::T => t_ring(st, t, &g),
            };
        }
        g
    }
}

impl fmt::Display for FrameDerivativeOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        for v in &self.word {
            f.write_str(match v {
                FrameVector::X => "X",
                FrameVector::T => "T",
            })?;
        }
        Ok(())
    }
}

/// `op(psi)` on every slice of the window.
pub fn apply_frame_derivative(op: &FrameDerivativeOp, win: &Window, psi: Invariant) -> Vec<Vec<f64>> {
    let st = win.stencil();
    win.map(|s| op.apply(&st, s.time(), &s.inv[psi as usize]))
}
