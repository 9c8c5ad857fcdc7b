use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::Image;

/// Error summary of a reconstruction against a reference raster.
///
/// "Interior" is the disk `r < interior_fraction * R`. The leakage is the
/// largest `|img|` outside that disk where the reference is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse_interior: f64,
    pub max_abs_interior: f64,
    pub mean_interior: f64,
    pub exterior_leakage: f64,
    pub interior_pixels: usize,
}

pub fn evaluate_metrics(img: &Image, reference: &Image, interior_fraction: f64) -> Result<Metrics> {
    if img.n() != reference.n() || img.radius() != reference.radius() {
        return Err(Error::Usage(format!(
            "image is {n}x{n} over R = {r}, reference is {m}x{m} over R = {s}",
            n = img.n(),
            r = img.radius(),
            m = reference.n(),
            s = reference.radius()
        )));
    }
    let cutoff = interior_fraction * img.radius();
    let mut sq = 0.0;
    let mut max_abs: f64 = 0.0;
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut leakage: f64 = 0.0;
    for ((x, y, v), &r) in img.pixels().zip(reference.values()) {
        if x.hypot(y) < cutoff {
            let e = v - r;
            sq += e * e;
            max_abs = max_abs.max(e.abs());
            sum += v;
            count += 1;
        } else if r == 0.0 {
            leakage = leakage.max(v.abs());
        }
    }
    let denom = count.max(1) as f64;
    Ok(Metrics {
        rmse_interior: (sq / denom).sqrt(),
        max_abs_interior: max_abs,
        mean_interior: sum / denom,
        exterior_leakage: leakage,
        interior_pixels: count,
    })
}
