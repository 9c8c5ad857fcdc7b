use std::f64::consts::PI;

use super::pv::{central_difference, PvIntegrand, UniformAxis};
use super::{assemble, PixelResult, ReconConfig, Reconstruction};
use crate::error::Result;
use crate::forward::{log_transform, FanSinogram};

/// Inverts fan-beam intensities directly, without rebinning.
///
/// For each line angle `sigma` (one per view) the log intensity is gathered
/// along `tau = alpha + sigma`, wrapping `tau` periodically, and
/// differentiated in `alpha`. The pole of pixel `(x, y)` sits at
/// `alpha_i = arcsin((x sin(sigma) + y cos(sigma)) / D)`, inside the fan
/// for every pixel within the support.
pub fn reconstruct_fan(sino: &FanSinogram, cfg: &ReconConfig) -> Result<Reconstruction> {
    let g = *sino.geometry();
    let logs = log_transform(sino, cfg.intensity_floor)?;
    let axis = UniformAxis::new(-g.alpha_max(), g.alpha_step(), g.n_alpha());
    let opts = cfg.pv_options(axis.step)?;
    let d = g.source_distance();
    let n_sigma = g.n_tau();
    let sigma_step = g.tau_step();

    let alphas: Vec<f64> = (0..axis.len).map(|k| axis.at(k)).collect();
    let derivatives: Vec<Vec<f64>> = (0..n_sigma)
        .map(|j| {
            let sigma = j as f64 * sigma_step;
            // ln I = ln(K / L^2) - Phi; the constant drops out of the derivative
            let log_intensity: Vec<f64> = alphas
                .iter()
                .map(|&a| -logs.interpolate(a, a + sigma))
                .collect();
            central_difference(&log_intensity, axis.step)
        })
        .collect();
    let integrands: Vec<PvIntegrand> = derivatives
        .iter()
        .map(|n| PvIntegrand::new(n, axis))
        .collect();
    let trig: Vec<(f64, f64)> = (0..n_sigma)
        .map(|j| (j as f64 * sigma_step).sin_cos())
        .collect();
    let ray_offsets: Vec<f64> = alphas.iter().map(|a| d * a.sin()).collect();

    // +1/(4 pi^2) times the periodic trapezoid weight 2 pi / n_sigma
    let scale = 1.0 / (2.0 * PI * n_sigma as f64);

    assemble(cfg.grid_n, g.support_radius(), logs.clamped(), |x, y| {
        let mut acc = PixelResult::default();
        let mut sum = 0.0;
        for (integrand, &(s, c)) in integrands.iter().zip(&trig) {
            let p = x * s + y * c;
            let pole = (p / d).asin();
            let v = integrand.evaluate(pole, |k| ray_offsets[k] - p, |a| d * a.sin() - p, &opts);
            acc.tally(v.pole);
            sum += v.value;
        }
        acc.value = scale * sum;
        acc
    })
}
