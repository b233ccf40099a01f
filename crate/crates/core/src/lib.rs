//! Numerical laboratory for 2D isentropic Euler rarefaction waves.
//!
//! The crate is layered bottom-up: [`gas`] and [`riemann`] are exact 1D
//! oracles, [`euler2d`] is the finite-volume solver, [`geometry`] rebuilds
//! the characteristic foliation from snapshots, [`energy`] evaluates the
//! weighted energies, and [`harness`] drives runs and studies.

pub mod energy;
pub mod error;
pub mod euler2d;
pub mod gas;
pub mod geometry;
pub mod grid;
pub mod harness;
pub mod riemann;
pub mod stencil;

pub use error::{Error, Result};
pub use grid::Grid;
