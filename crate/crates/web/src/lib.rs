//! Browser bindings. The page passes the phantom as JSON and gets flat
//! row-major `Float64Array`s back.
//!
//! Scanner: source at `D` from the centre, support radius 1, `K = L = 1`,
//! so the log data is the line integral itself.

use fanbeam::{
    log_transform, project_fan, rebin_to_parallel, reconstruct_fan, reconstruct_parallel,
    FanGeometry, FanSinogram, Phantom, ReconConfig,
};
use wasm_bindgen::prelude::*;

const SUPPORT: f64 = 1.0;

fn phantom_from_json(json: &str) -> Result<Phantom, String> {
    serde_json::from_str(json).map_err(|e| format!("phantom: {e}"))
}

fn simulate_inner(
    phantom_json: &str,
    d: f64,
    n_alpha: usize,
    n_tau: usize,
) -> Result<FanSinogram, String> {
    let phantom = phantom_from_json(phantom_json)?;
    let geometry =
        FanGeometry::new(d, 1.0, SUPPORT, 1.0, n_alpha, n_tau).map_err(|e| e.to_string())?;
    project_fan(&phantom, &geometry).map_err(|e| e.to_string())
}

/// Options of [`reconstruct`], in the order the page collects them.
#[derive(Debug, Clone, Copy)]
pub struct DemoRecon {
    pub rebin: bool,
    pub grid: usize,
    pub epsilon_cells: f64,
    pub pole_correction: bool,
    pub jacobian_correction: bool,
}

pub fn reconstruct_inner(
    phantom_json: &str,
    d: f64,
    n_alpha: usize,
    n_tau: usize,
    opts: DemoRecon,
) -> Result<Vec<f64>, String> {
    let sino = simulate_inner(phantom_json, d, n_alpha, n_tau)?;
    let g = *sino.geometry();
    let mut cfg = ReconConfig {
        pole_correction: opts.pole_correction,
        jacobian_correction: opts.jacobian_correction,
        ..ReconConfig::with_grid(opts.grid)
    };
    let rec = if opts.rebin {
        let (par, _) = rebin_to_parallel(&sino, 2 * n_alpha - 1, n_tau, cfg.intensity_floor)
            .map_err(|e| e.to_string())?;
        cfg.epsilon = Some(opts.epsilon_cells * par.eta_step());
        reconstruct_parallel(&par, &cfg)
    } else {
        cfg.epsilon = Some(opts.epsilon_cells * g.alpha_step());
        reconstruct_fan(&sino, &cfg)
    };
    rec.map(|r| r.image.into_values())
        .map_err(|e| e.to_string())
}

/// Log data `ln(K/L^2) - ln I`, `n_tau` rows of `n_alpha`.
#[wasm_bindgen]
pub fn simulate(
    phantom_json: &str,
    d: f64,
    n_alpha: usize,
    n_tau: usize,
) -> Result<Vec<f64>, JsError> {
    let sino = simulate_inner(phantom_json, d, n_alpha, n_tau).map_err(|e| JsError::new(&e))?;
    let logs = log_transform(&sino, None).map_err(|e| JsError::new(&e.to_string()))?;
    Ok(logs.values().to_vec())
}

/// Reconstruction on a `grid x grid` raster. `epsilon_cells` is the pole
/// window half-width in inner grid steps (at least 0.5).
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn reconstruct(
    phantom_json: &str,
    d: f64,
    n_alpha: usize,
    n_tau: usize,
    rebin: bool,
    grid: usize,
    epsilon_cells: f64,
    pole_correction: bool,
    jacobian_correction: bool,
) -> Result<Vec<f64>, JsError> {
    let opts = DemoRecon {
        rebin,
        grid,
        epsilon_cells,
        pole_correction,
        jacobian_correction,
    };
    reconstruct_inner(phantom_json, d, n_alpha, n_tau, opts).map_err(|e| JsError::new(&e))
}

/// The phantom's attenuation on the same raster as [`reconstruct`].
#[wasm_bindgen]
pub fn truth(phantom_json: &str, grid: usize) -> Result<Vec<f64>, JsError> {
    truth_inner(phantom_json, grid).map_err(|e| JsError::new(&e))
}

fn truth_inner(phantom_json: &str, grid: usize) -> Result<Vec<f64>, String> {
    let phantom = phantom_from_json(phantom_json)?;
    phantom
        .raster(grid)
        .map(|img| img.into_values())
        .map_err(|e| e.to_string())
}
