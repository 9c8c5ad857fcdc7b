//! Fan-beam tomography toolkit: analytic disk phantoms, simulated film
//! sinograms, principal-value reconstruction, and numerical checks of the
//! inversion formulas.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod image;
pub mod io;
pub mod phantom;
pub mod recon;
pub mod validate;

pub use error::{Error, Result};
pub use forward::{
    log_transform, project_fan, project_parallel, rebin_to_parallel, FanLogSinogram, FanSinogram,
    ParallelSinogram,
};
pub use geometry::{FanGeometry, LineCoords, RayCoords};
pub use image::Image;
pub use phantom::{Disk, Phantom};
pub use recon::{
    reconstruct_fan, reconstruct_parallel, ReconConfig, ReconDiagnostics, Reconstruction,
};
