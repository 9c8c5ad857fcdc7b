//! Direct analytic inversion of sinograms.
//!
//! Both reconstructors evaluate, per pixel, an outer periodic trapezoid over
//! the line angle `sigma` of an inner principal-value integral of the
//! derivative of the log data (see [`pv`]):
//!
//! * parallel data: `F = -1/(4 pi^2) int dsigma PV int dPhi/deta deta / (eta - p)`
//! * fan data:      `F = +1/(4 pi^2) int dsigma PV int d/dalpha ln I(alpha, alpha + sigma) dalpha / (D sin alpha - p)`
//!
//! with `p = x sin(sigma) + y cos(sigma)`. Pixels at or beyond the support
//! radius are left at zero.

mod fan;
mod metrics;
mod parallel;
pub mod pv;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::DEFAULT_INTENSITY_FLOOR;
use crate::image::Image;

pub use fan::reconstruct_fan;
pub use metrics::{evaluate_metrics, Metrics};
pub use parallel::reconstruct_parallel;
pub use pv::{pv_inner_integral, PoleLocation, PvOptions, PvValue, UniformAxis};

/// Reconstruction settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconConfig {
    /// Output raster is `grid_n x grid_n`.
    pub grid_n: usize,
    /// Pole window half-width in inner-axis units (`eta` for parallel data,
    /// radians of `alpha` for fan data). `None` means one inner grid step.
    pub epsilon: Option<f64>,
    /// Replace the excluded window by `2 eps` times the derivative of the
    /// numerator at the pole.
    pub pole_correction: bool,
    /// Divide that window term by `D cos(alpha_i)` in fan mode.
    pub jacobian_correction: bool,
    /// Clamp for intensities before the logarithm (fan data only).
    pub intensity_floor: Option<f64>,
}

impl Default for ReconConfig {
    fn default() -> Self {
        ReconConfig {
            grid_n: 101,
            epsilon: None,
            pole_correction: true,
            jacobian_correction: false,
            intensity_floor: Some(DEFAULT_INTENSITY_FLOOR),
        }
    }
}

impl ReconConfig {
    pub fn with_grid(grid_n: usize) -> Self {
        ReconConfig {
            grid_n,
            ..ReconConfig::default()
        }
    }

    /// Checks the config against an inner axis step and resolves epsilon.
    pub fn pv_options(&self, inner_step: f64) -> Result<PvOptions> {
        if self.grid_n < 2 {
            return Err(Error::invalid(
                "recon config",
                format!("grid_n = {} must be >= 2", self.grid_n),
            ));
        }
        let epsilon = self.epsilon.unwrap_or(inner_step);
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(
                "recon config",
                format!("epsilon = {epsilon} must be > 0"),
            ));
        }
        if epsilon < 0.5 * inner_step {
            return Err(Error::invalid(
                "recon config",
                format!("epsilon = {epsilon} is below half the inner grid step {inner_step}"),
            ));
        }
        Ok(PvOptions {
            epsilon,
            pole_correction: self.pole_correction,
            jacobian_correction: self.jacobian_correction,
        })
    }
}

/// Counts of inner integrals whose pole window could not be placed fully
/// inside the sampled axis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ReconDiagnostics {
    /// Window clipped by an axis end: one-sided, no window term.
    pub clipped_poles: usize,
    /// Pole beyond the axis: plain quadrature.
    pub outside_poles: usize,
    /// Intensities raised to the floor before the logarithm.
    pub clamped_intensities: usize,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub image: Image,
    pub diagnostics: ReconDiagnostics,
}

#[derive(Default, Clone, Copy)]
struct PixelResult {
    value: f64,
    clipped: usize,
    outside: usize,
}

impl PixelResult {
    fn tally(&mut self, location: PoleLocation) {
        match location {
            PoleLocation::Interior => {}
            PoleLocation::Clipped => self.clipped += 1,
            PoleLocation::Outside => self.outside += 1,
        }
    }
}

/// Runs `pixel(x, y)` over the pixels strictly inside the support and
/// assembles the image. Order of evaluation does not affect the result.
fn assemble(
    grid_n: usize,
    radius: f64,
    clamped: usize,
    pixel: impl Fn(f64, f64) -> PixelResult + Sync,
) -> Result<Reconstruction> {
    let h = 2.0 * radius / grid_n as f64;
    let run = |idx: usize| {
        let (row, col) = (idx / grid_n, idx % grid_n);
        let x = -radius + (col as f64 + 0.5) * h;
        let y = radius - (row as f64 + 0.5) * h;
        if x.hypot(y) >= radius {
            PixelResult::default()
        } else {
            pixel(x, y)
        }
    };
    #[cfg(feature = "parallel")]
    let results: Vec<PixelResult> = {
        use rayon::prelude::*;
        (0..grid_n * grid_n).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<PixelResult> = (0..grid_n * grid_n).map(run).collect();

    let mut diagnostics = ReconDiagnostics {
        clamped_intensities: clamped,
        ..Default::default()
    };
    let values = results
        .iter()
        .map(|r| {
            diagnostics.clipped_poles += r.clipped;
            diagnostics.outside_poles += r.outside;
            r.value
        })
        .collect();
    let image = Image::from_values(grid_n, radius, values)?;
    if !image.all_finite() {
        return Err(Error::Internal(
            "non-finite value in reconstructed image".into(),
        ));
    }
    Ok(Reconstruction { image, diagnostics })
}
