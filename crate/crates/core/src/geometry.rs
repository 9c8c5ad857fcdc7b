//! Scanning geometry of the rotating-object fan-beam scanner.
//!
//! A point source sits at distance `D` from the rotation axis. The object,
//! confined to a cylinder of radius `R`, turns by the view angle `tau`; a
//! cylindrical film of radius `L` centred on the source records the
//! transmitted fan. A ray is labelled by its fan angle `alpha` (measured
//! from the central ray through the axis) and the view `tau`.
//!
//! Every ray is also a straight line `x sin(sigma) + y cos(sigma) = eta` in
//! the object frame, with `sigma = tau - alpha` and `eta = D sin(alpha)`.
//!
//! Handedness: the object-frame ray parameterisation
//!
//! ```text
//! x =  x' cos(tau) + (D + x') tan(alpha) sin(tau)
//! y = -x' sin(tau) + (D + x') tan(alpha) cos(tau)
//! ```
//!
//! and the image-frame rotation `x' = x cos(tau) - y sin(tau)`,
//! `y' = x sin(tau) + y cos(tau)` are used exactly as written; no mirror
//! convention is imposed beyond what these formulas imply. The round-trip
//! and reconstruction tests pin down that the pieces compose consistently.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wraps an angle into `[0, 2pi)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(TAU);
    // rem_euclid can return exactly TAU for tiny negative inputs
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Signed difference `a - b` reduced into `(-pi, pi]`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    if d > std::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

/// Scanner geometry and sampling counts.
///
/// Serialized as `{ "D", "L", "R", "K", "n_alpha", "n_tau" }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFanGeometry", into = "RawFanGeometry")]
pub struct FanGeometry {
    source_distance: f64,
    film_radius: f64,
    support_radius: f64,
    intensity: f64,
    n_alpha: usize,
    n_tau: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFanGeometry {
    #[serde(rename = "D")]
    d: f64,
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "R")]
    r: f64,
    #[serde(rename = "K")]
    k: f64,
    n_alpha: usize,
    n_tau: usize,
}

impl TryFrom<RawFanGeometry> for FanGeometry {
    type Error = Error;

    fn try_from(raw: RawFanGeometry) -> Result<Self> {
        FanGeometry::new(raw.d, raw.l, raw.r, raw.k, raw.n_alpha, raw.n_tau)
    }
}

impl From<FanGeometry> for RawFanGeometry {
    fn from(g: FanGeometry) -> Self {
        RawFanGeometry {
            d: g.source_distance,
            l: g.film_radius,
            r: g.support_radius,
            k: g.intensity,
            n_alpha: g.n_alpha,
            n_tau: g.n_tau,
        }
    }
}

impl FanGeometry {
    /// `d`: source to rotation axis, `l`: film radius, `r`: support radius,
    /// `k`: source intensity constant.
    pub fn new(d: f64, l: f64, r: f64, k: f64, n_alpha: usize, n_tau: usize) -> Result<Self> {
        let all_finite = [d, l, r, k].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::invalid("geometry", "D, L, R and K must be finite"));
        }
        if !(r > 0.0) {
            return Err(Error::invalid(
                "geometry",
                format!("support radius R = {r} must be > 0"),
            ));
        }
        if !(d > r) {
            return Err(Error::invalid(
                "geometry",
                format!("source inside support: D = {d} must exceed R = {r}"),
            ));
        }
        if !(l > 0.0) {
            return Err(Error::invalid(
                "geometry",
                format!("film radius L = {l} must be > 0"),
            ));
        }
        if !(k > 0.0) {
            return Err(Error::invalid(
                "geometry",
                format!("intensity K = {k} must be > 0"),
            ));
        }
        if n_alpha < 3 {
            return Err(Error::invalid(
                "geometry",
                format!("n_alpha = {n_alpha} must be >= 3"),
            ));
        }
        if n_tau < 4 {
            return Err(Error::invalid(
                "geometry",
                format!("n_tau = {n_tau} must be >= 4"),
            ));
        }
        Ok(FanGeometry {
            source_distance: d,
            film_radius: l,
            support_radius: r,
            intensity: k,
            n_alpha,
            n_tau,
        })
    }

    /// Same scanner with different sampling counts.
    pub fn with_counts(&self, n_alpha: usize, n_tau: usize) -> Result<Self> {
        FanGeometry::new(
            self.source_distance,
            self.film_radius,
            self.support_radius,
            self.intensity,
            n_alpha,
            n_tau,
        )
    }

    pub fn source_distance(&self) -> f64 {
        self.source_distance
    }

    pub fn film_radius(&self) -> f64 {
        self.film_radius
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_tau(&self) -> usize {
        self.n_tau
    }

    /// Unattenuated film intensity `K / L^2`.
    pub fn vacuum_intensity(&self) -> f64 {
        self.intensity / (self.film_radius * self.film_radius)
    }

    /// Half-opening of the fan that covers the support, `arcsin(R / D)`.
    pub fn alpha_max(&self) -> f64 {
        (self.support_radius / self.source_distance).asin()
    }

    pub fn alpha_step(&self) -> f64 {
        2.0 * self.alpha_max() / (self.n_alpha - 1) as f64
    }

    /// Fan angle of detector sample `k`; uniform over `[-alpha_max, alpha_max]`.
    pub fn alpha(&self, k: usize) -> f64 {
        -self.alpha_max() + k as f64 * self.alpha_step()
    }

    pub fn tau_step(&self) -> f64 {
        TAU / self.n_tau as f64
    }

    /// View angle of view `j`; uniform over `[0, 2pi)`.
    pub fn tau(&self, j: usize) -> f64 {
        j as f64 * self.tau_step()
    }
}

/// Fan-beam ray label: fan angle and view angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayCoords {
    pub alpha: f64,
    pub tau: f64,
}

impl RayCoords {
    /// `tau` is wrapped into `[0, 2pi)`.
    pub fn new(alpha: f64, tau: f64) -> Self {
        RayCoords {
            alpha,
            tau: normalize_angle(tau),
        }
    }
}

/// Straight line `x sin(sigma) + y cos(sigma) = eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineCoords {
    pub eta: f64,
    pub sigma: f64,
}

impl LineCoords {
    /// `sigma` is wrapped into `[0, 2pi)`.
    pub fn new(eta: f64, sigma: f64) -> Self {
        LineCoords {
            eta,
            sigma: normalize_angle(sigma),
        }
    }

    /// Signed offset of `(x, y)` from this line along its normal.
    pub fn offset_of(&self, x: f64, y: f64) -> f64 {
        x * self.sigma.sin() + y * self.sigma.cos() - self.eta
    }
}

pub fn fan_to_line(ray: RayCoords, source_distance: f64) -> LineCoords {
    LineCoords::new(source_distance * ray.alpha.sin(), ray.tau - ray.alpha)
}

/// Inverse of [`fan_to_line`]. Fails when `|eta| >= D`: no ray from the
/// source lies on such a line.
pub fn line_to_fan(line: LineCoords, source_distance: f64) -> Result<RayCoords> {
    if !(line.eta.abs() < source_distance) {
        return Err(Error::Domain(format!(
            "line offset |eta| = {} is not below the source distance D = {}",
            line.eta.abs(),
            source_distance
        )));
    }
    let alpha = (line.eta / source_distance).asin();
    Ok(RayCoords::new(alpha, line.sigma + alpha))
}

/// Ray parameters `x'_1 <= x'_2` where the ray with fan angle `alpha`
/// enters and leaves the support cylinder, or `None` when it misses.
pub fn ray_entry_exit(alpha: f64, geom: &FanGeometry) -> Option<(f64, f64)> {
    let d = geom.source_distance;
    let r = geom.support_radius;
    let t2 = alpha.tan().powi(2);
    let disc = r * r + (r * r - d * d) * t2;
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let scale = 1.0 + t2;
    Some(((-d * t2 - root) / scale, (-d * t2 + root) / scale))
}

/// Object-frame point at parameter `x'` along the ray `(alpha, tau)`.
pub fn ray_point(alpha: f64, tau: f64, x_prime: f64, source_distance: f64) -> (f64, f64) {
    let lateral = (source_distance + x_prime) * alpha.tan();
    let (s, c) = tau.sin_cos();
    (x_prime * c + lateral * s, -x_prime * s + lateral * c)
}

/// Rigid rotation of `(x, y)` by the view angle.
pub fn rotate_to_object_frame(x: f64, y: f64, tau: f64) -> (f64, f64) {
    let (s, c) = tau.sin_cos();
    (x * c - y * s, x * s + y * c)
}
