//! Acoustical geometry reconstructed from flow snapshots.

mod frame;
mod levelset;
mod second;
mod window;

pub use frame::{frame_fields, Band, Foliation, MIN_GRADIENT};
pub use levelset::{evolve_u, LevelSet};
pub use second::{deformation_components, second_frame, t_ring, x_ring, Commutator, Deformation, DeformationComponents, SecondFrame};
pub use window::{
    commutation_residual_y, commutation_residual_z, sign_monitors, structure_fields, structure_residuals, SignReport, Slice,
    StructureReport, Window,
};
