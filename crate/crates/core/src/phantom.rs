//! Analytic attenuation phantoms built from additive disks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LineCoords;
use crate::image::Image;

/// Resolution of the raster used to check that the summed attenuation
/// never goes negative.
const NONNEGATIVITY_RASTER: usize = 64;

/// Disk of constant attenuation `mu` added to everything beneath it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disk {
    pub cx: f64,
    pub cy: f64,
    pub a: f64,
    pub mu: f64,
}

impl Disk {
    pub fn new(cx: f64, cy: f64, a: f64, mu: f64) -> Self {
        Disk { cx, cy, a, mu }
    }

    /// Boundary points count as inside.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - self.cx, y - self.cy);
        dx * dx + dy * dy <= self.a * self.a
    }

    /// `mu` times the chord this disk cuts from `line`.
    pub fn line_integral(&self, line: &LineCoords) -> f64 {
        let d = line.offset_of(self.cx, self.cy);
        let half_sq = self.a * self.a - d * d;
        if half_sq > 0.0 {
            2.0 * self.mu * half_sq.sqrt()
        } else {
            0.0
        }
    }
}

/// Attenuation field `F(x, y)`: sum of disks, zero outside the support radius.
///
/// JSON form: `{ "R": number, "disks": [ { "cx", "cy", "a", "mu" } ] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPhantom", into = "RawPhantom")]
pub struct Phantom {
    radius: f64,
    disks: Vec<Disk>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhantom {
    #[serde(rename = "R")]
    radius: f64,
    #[serde(default)]
    disks: Vec<Disk>,
}

impl TryFrom<RawPhantom> for Phantom {
    type Error = Error;

    fn try_from(raw: RawPhantom) -> Result<Self> {
        Phantom::new(raw.radius, raw.disks)
    }
}

impl From<Phantom> for RawPhantom {
    fn from(p: Phantom) -> Self {
        RawPhantom {
            radius: p.radius,
            disks: p.disks,
        }
    }
}

impl Phantom {
    pub fn new(radius: f64, disks: Vec<Disk>) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(
                "phantom",
                format!("support radius R = {radius} must be > 0"),
            ));
        }
        for (i, d) in disks.iter().enumerate() {
            if ![d.cx, d.cy, d.a, d.mu].iter().all(|v| v.is_finite()) {
                return Err(Error::invalid(
                    "phantom",
                    format!("disk {i} has non-finite parameters"),
                ));
            }
            if !(d.a > 0.0) {
                return Err(Error::invalid(
                    "phantom",
                    format!("disk {i}: radius a = {} must be > 0", d.a),
                ));
            }
            let reach = d.cx.hypot(d.cy) + d.a;
            if reach > radius {
                return Err(Error::invalid(
                    "phantom",
                    format!(
                        "support containment violated: disk {i} reaches |center| + a = {reach} > R = {radius}"
                    ),
                ));
            }
        }
        let phantom = Phantom { radius, disks };
        phantom.check_nonnegative()?;
        Ok(phantom)
    }

    /// Phantom with no disks: zero attenuation everywhere.
    pub fn vacuum(radius: f64) -> Result<Self> {
        Phantom::new(radius, Vec::new())
    }

    fn check_nonnegative(&self) -> Result<()> {
        if self.disks.iter().all(|d| d.mu >= 0.0) {
            return Ok(());
        }
        let h = 2.0 * self.radius / NONNEGATIVITY_RASTER as f64;
        let grid = (0..NONNEGATIVITY_RASTER * NONNEGATIVITY_RASTER).map(|idx| {
            let (row, col) = (idx / NONNEGATIVITY_RASTER, idx % NONNEGATIVITY_RASTER);
            (
                -self.radius + (col as f64 + 0.5) * h,
                self.radius - (row as f64 + 0.5) * h,
            )
        });
        let centers = self.disks.iter().map(|d| (d.cx, d.cy));
        for (x, y) in centers.chain(grid) {
            let value = self.attenuation_at(x, y);
            if value < 0.0 {
                return Err(Error::invalid(
                    "phantom",
                    format!("nonnegative attenuation violated: F({x}, {y}) = {value}"),
                ));
            }
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    /// Rigid rotation of every disk centre by `angle` about the origin.
    pub fn rotated(&self, angle: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        let disks = self
            .disks
            .iter()
            .map(|d| Disk::new(d.cx * c - d.cy * s, d.cx * s + d.cy * c, d.a, d.mu))
            .collect();
        Phantom::new(self.radius, disks)
    }

    pub fn attenuation_at(&self, x: f64, y: f64) -> f64 {
        if x.hypot(y) > self.radius {
            return 0.0;
        }
        self.disks
            .iter()
            .filter(|d| d.contains(x, y))
            .map(|d| d.mu)
            .sum()
    }

    /// Exact integral of `F` along `line`.
    pub fn line_integral(&self, line: &LineCoords) -> f64 {
        if line.eta.abs() >= self.radius {
            return 0.0;
        }
        self.disks.iter().map(|d| d.line_integral(line)).sum()
    }

    /// Pixel-centre sampling over `[-R, R]^2`.
    pub fn raster(&self, n: usize) -> Result<Image> {
        Image::from_fn(n, self.radius, |x, y| self.attenuation_at(x, y))
    }
}
