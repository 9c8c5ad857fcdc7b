//! Forward model: fan-beam intensity sinograms, the log transform back to
//! line integrals, direct parallel projection and fan-to-parallel rebinning.
//!
//! Notation: `I(alpha, tau)` is the recorded film intensity and
//! `Phi(eta, sigma)` the line integral of the attenuation `F(x, y)`.
//! The film response is the identity; a darkening curve would slot in
//! between [`project_fan`] and [`log_transform`].

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{fan_to_line, line_to_fan, FanGeometry, LineCoords, RayCoords};
use crate::phantom::Phantom;

/// Default lower clamp applied to intensities before taking the logarithm.
pub const DEFAULT_INTENSITY_FLOOR: f64 = 1e-300;

fn fill_grid(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Vec<f64> {
    let mut values = vec![0.0; rows * cols];
    let cell = |(idx, v): (usize, &mut f64)| *v = f(idx / cols, idx % cols);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        values.par_iter_mut().enumerate().for_each(cell);
    }
    #[cfg(not(feature = "parallel"))]
    values.iter_mut().enumerate().for_each(cell);
    values
}

/// Recorded intensities `I(alpha, tau)`: one row per view `tau`, one
/// column per fan angle `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct FanSinogram {
    geometry: FanGeometry,
    values: Vec<f64>,
}

impl FanSinogram {
    pub fn from_values(geometry: FanGeometry, values: Vec<f64>) -> Result<Self> {
        let expected = geometry.n_tau() * geometry.n_alpha();
        if values.len() != expected {
            return Err(Error::invalid(
                "fan sinogram",
                format!("{} values, geometry needs {expected}", values.len()),
            ));
        }
        Ok(FanSinogram { geometry, values })
    }

    pub fn geometry(&self) -> &FanGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, view: usize, detector: usize) -> f64 {
        self.values[view * self.geometry.n_alpha() + detector]
    }
}

/// Line integrals on the fan grid, `Phi` indexed by `(alpha, tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FanLogSinogram {
    geometry: FanGeometry,
    values: Vec<f64>,
    clamped: usize,
}

impl FanLogSinogram {
    pub fn geometry(&self) -> &FanGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, view: usize, detector: usize) -> f64 {
        self.values[view * self.geometry.n_alpha() + detector]
    }

    /// How many intensities were raised to the floor before the logarithm.
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    /// Bilinear interpolation at `(alpha, tau)`; `alpha` is clamped to the
    /// fan, `tau` wraps periodically.
    pub fn interpolate(&self, alpha: f64, tau: f64) -> f64 {
        let g = &self.geometry;
        let (na, nt) = (g.n_alpha(), g.n_tau());
        let a = ((alpha + g.alpha_max()) / g.alpha_step()).clamp(0.0, (na - 1) as f64);
        let k0 = (a.floor() as usize).min(na - 2);
        let wa = a - k0 as f64;

        let t = (tau / g.tau_step()).rem_euclid(nt as f64);
        let j0 = (t.floor() as usize).min(nt - 1);
        let wt = t - j0 as f64;
        let j1 = (j0 + 1) % nt;

        let row = |j: usize| (1.0 - wa) * self.get(j, k0) + wa * self.get(j, k0 + 1);
        (1.0 - wt) * row(j0) + wt * row(j1)
    }
}

/// Line integrals `Phi(eta, sigma)`: one row per normal angle `sigma`
/// (uniform over `[0, 2pi)`), one column per offset `eta` (uniform over
/// `[-R, R]`, both ends included).
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelSinogram {
    radius: f64,
    n_eta: usize,
    n_sigma: usize,
    values: Vec<f64>,
}

impl ParallelSinogram {
    pub fn from_values(
        radius: f64,
        n_eta: usize,
        n_sigma: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(
                "parallel sinogram",
                format!("radius R = {radius} must be > 0"),
            ));
        }
        if n_eta < 4 || n_sigma < 4 {
            return Err(Error::invalid(
                "parallel sinogram",
                format!("grid {n_eta} x {n_sigma}: both counts must be >= 4"),
            ));
        }
        if values.len() != n_eta * n_sigma {
            return Err(Error::invalid(
                "parallel sinogram",
                format!("{} values for a {n_sigma} x {n_eta} grid", values.len()),
            ));
        }
        Ok(ParallelSinogram {
            radius,
            n_eta,
            n_sigma,
            values,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn n_eta(&self) -> usize {
        self.n_eta
    }

    pub fn n_sigma(&self) -> usize {
        self.n_sigma
    }

    pub fn eta_step(&self) -> f64 {
        2.0 * self.radius / (self.n_eta - 1) as f64
    }

    pub fn eta(&self, k: usize) -> f64 {
        -self.radius + k as f64 * self.eta_step()
    }

    pub fn sigma_step(&self) -> f64 {
        TAU / self.n_sigma as f64
    }

    pub fn sigma(&self, j: usize) -> f64 {
        j as f64 * self.sigma_step()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.n_eta..(j + 1) * self.n_eta]
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.n_eta + k]
    }

    /// `Phi` along `eta` at an arbitrary `sigma`, linear in `sigma` with
    /// periodic wrap.
    pub fn profile_at(&self, sigma: f64) -> Vec<f64> {
        let t = (sigma / self.sigma_step()).rem_euclid(self.n_sigma as f64);
        let j0 = (t.floor() as usize).min(self.n_sigma - 1);
        let w = t - j0 as f64;
        let j1 = (j0 + 1) % self.n_sigma;
        self.row(j0)
            .iter()
            .zip(self.row(j1))
            .map(|(a, b)| (1.0 - w) * a + w * b)
            .collect()
    }
}

/// Simulated film record: `I = (K / L^2) exp(-integral of F along the ray)`.
///
/// The arc-length factor `sqrt(1 + tan^2 alpha)` times the integral over the
/// ray parameter `x'` is the plain line integral, so the exponent is taken
/// from the phantom's exact chord sums on the ray's line.
pub fn project_fan(phantom: &Phantom, geometry: &FanGeometry) -> Result<FanSinogram> {
    if phantom.radius() > geometry.support_radius() {
        return Err(Error::Usage(format!(
            "phantom support R = {} exceeds the scanner support R = {}",
            phantom.radius(),
            geometry.support_radius()
        )));
    }
    let g = *geometry;
    let scale = g.vacuum_intensity();
    let values = fill_grid(g.n_tau(), g.n_alpha(), |j, k| {
        let line = fan_to_line(RayCoords::new(g.alpha(k), g.tau(j)), g.source_distance());
        scale * (-phantom.line_integral(&line)).exp()
    });
    FanSinogram::from_values(g, values)
}

/// `Phi = ln(K / L^2) - ln I` on the fan grid.
///
/// With `floor = Some(f)` intensities below `f` are raised to `f` and
/// counted; with `None` any nonpositive intensity is a data error.
pub fn log_transform(sinogram: &FanSinogram, floor: Option<f64>) -> Result<FanLogSinogram> {
    let g = sinogram.geometry;
    let ln_vacuum = g.vacuum_intensity().ln();
    let mut clamped = 0;
    let mut values = Vec::with_capacity(sinogram.values.len());
    for (idx, &intensity) in sinogram.values.iter().enumerate() {
        let used = match floor {
            Some(f) if !(intensity >= f) => {
                clamped += 1;
                f
            }
            None if !(intensity > 0.0) => {
                return Err(Error::Data(format!(
                    "nonpositive intensity {intensity} at view {}, detector {}",
                    idx / g.n_alpha(),
                    idx % g.n_alpha()
                )));
            }
            _ => intensity,
        };
        values.push(ln_vacuum - used.ln());
    }
    Ok(FanLogSinogram {
        geometry: g,
        values,
        clamped,
    })
}

/// Exact line integrals of the phantom on a uniform `(eta, sigma)` grid.
pub fn project_parallel(
    phantom: &Phantom,
    n_eta: usize,
    n_sigma: usize,
) -> Result<ParallelSinogram> {
    project_parallel_with_radius(phantom, phantom.radius(), n_eta, n_sigma)
}

/// As [`project_parallel`] but on an `eta` range `[-radius, radius]` that may
/// be wider than the phantom's own support.
pub fn project_parallel_with_radius(
    phantom: &Phantom,
    radius: f64,
    n_eta: usize,
    n_sigma: usize,
) -> Result<ParallelSinogram> {
    let mut sino =
        ParallelSinogram::from_values(radius, n_eta, n_sigma, vec![0.0; n_eta * n_sigma])?;
    let grid = sino.clone();
    sino.values = fill_grid(n_sigma, n_eta, |j, k| {
        phantom.line_integral(&LineCoords::new(grid.eta(k), grid.sigma(j)))
    });
    Ok(sino)
}

/// Resamples fan data onto a parallel grid over the scanner support.
///
/// Each `(eta, sigma)` node maps to the ray `alpha = arcsin(eta / D)`,
/// `tau = sigma + alpha`; the log-domain fan data is interpolated
/// bilinearly there. Offsets beyond the support give zero.
pub fn rebin_to_parallel(
    sinogram: &FanSinogram,
    n_eta: usize,
    n_sigma: usize,
    floor: Option<f64>,
) -> Result<(ParallelSinogram, usize)> {
    let logs = log_transform(sinogram, floor)?;
    let g = sinogram.geometry;
    let r = g.support_radius();
    let mut sino = ParallelSinogram::from_values(r, n_eta, n_sigma, vec![0.0; n_eta * n_sigma])?;
    let grid = sino.clone();
    sino.values = fill_grid(n_sigma, n_eta, |j, k| {
        let eta = grid.eta(k);
        if eta.abs() > r {
            return 0.0;
        }
        // |eta| <= R < D, so the inverse map is always defined
        let ray = line_to_fan(LineCoords::new(eta, grid.sigma(j)), g.source_distance())
            .expect("offset within the support is below D");
        logs.interpolate(ray.alpha, ray.tau)
    });
    Ok((sino, logs.clamped()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::Disk;

    fn geometry(n_alpha: usize, n_tau: usize) -> FanGeometry {
        FanGeometry::new(3.0, 1.0, 1.0, 1.0, n_alpha, n_tau).unwrap()
    }

    fn centered_disk(a: f64) -> Phantom {
        Phantom::new(1.0, vec![Disk::new(0.0, 0.0, a, 1.0)]).unwrap()
    }

    #[test]
    fn vacuum_sinogram_is_flat() {
        let g = FanGeometry::new(3.0, 2.0, 1.0, 5.0, 33, 16).unwrap();
        let s = project_fan(&Phantom::vacuum(1.0).unwrap(), &g).unwrap();
        assert!(s.values().iter().all(|&v| v == 5.0 / 4.0));
        let logs = log_transform(&s, None).unwrap();
        assert!(logs.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn central_ray_through_unit_disk() {
        let ph = Phantom::new(1.0, vec![Disk::new(0.0, 0.0, 1.0, 1.0)]).unwrap();
        let s = project_fan(&ph, &geometry(33, 8)).unwrap();
        for j in 0..8 {
            assert!((s.get(j, 16) - (-2.0f64).exp()).abs() < 1e-15);
        }
        assert!((s.get(0, 16) - 0.135_335).abs() < 1e-6);
    }

    #[test]
    fn log_transform_inverts_exponential() {
        let g = FanGeometry::new(3.0, 2.0, 1.0, 3.0, 3, 4).unwrap();
        let c = g.vacuum_intensity();
        let mut values = vec![c; 12];
        values[5] = c * (-2.0f64).exp();
        let logs = log_transform(&FanSinogram::from_values(g, values).unwrap(), None).unwrap();
        assert_eq!(logs.get(0, 0), 0.0);
        assert!((logs.get(1, 2) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn log_transform_floor_and_errors() {
        let g = geometry(3, 4);
        let mut values = vec![1.0; 12];
        values[3] = 0.0;
        let s = FanSinogram::from_values(g, values).unwrap();
        assert!(matches!(log_transform(&s, None), Err(Error::Data(_))));
        let logs = log_transform(&s, Some(DEFAULT_INTENSITY_FLOOR)).unwrap();
        assert_eq!(logs.clamped(), 1);
        assert!((logs.values()[3] - 300.0 * 10f64.ln()).abs() < 1e-9);
        assert!(logs.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn log_of_projection_is_line_integral() {
        let ph = Phantom::new(
            1.0,
            vec![
                Disk::new(0.3, 0.0, 0.2, 1.5),
                Disk::new(-0.2, 0.4, 0.35, 0.8),
            ],
        )
        .unwrap();
        let g = geometry(65, 48);
        let logs = log_transform(&project_fan(&ph, &g).unwrap(), None).unwrap();
        for j in 0..g.n_tau() {
            for k in 0..g.n_alpha() {
                let line = fan_to_line(RayCoords::new(g.alpha(k), g.tau(j)), 3.0);
                assert!((logs.get(j, k) - ph.line_integral(&line)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parallel_projection_examples() {
        let empty = project_parallel(&Phantom::vacuum(1.0).unwrap(), 9, 8).unwrap();
        assert!(empty.values().iter().all(|&v| v == 0.0));

        let s = project_parallel(&centered_disk(0.5), 33, 12).unwrap();
        for j in 0..12 {
            for k in 0..33 {
                let eta = s.eta(k);
                let expected = if eta.abs() <= 0.5 {
                    2.0 * (0.25 - eta * eta).max(0.0).sqrt()
                } else {
                    0.0
                };
                assert!((s.get(j, k) - expected).abs() < 1e-15);
            }
            assert_eq!(s.get(j, 16), 1.0);
        }
    }

    #[test]
    fn rebinning_vacuum_and_outside_support() {
        let s = project_fan(&Phantom::vacuum(1.0).unwrap(), &geometry(33, 16)).unwrap();
        let (p, clamped) = rebin_to_parallel(&s, 17, 8, Some(DEFAULT_INTENSITY_FLOOR)).unwrap();
        assert_eq!(clamped, 0);
        assert!(p.values().iter().all(|&v| v == 0.0));

        let s = project_fan(&centered_disk(0.9), &geometry(33, 16)).unwrap();
        let (p, _) = rebin_to_parallel(&s, 17, 8, None).unwrap();
        for j in 0..8 {
            assert_eq!(p.get(j, 0), 0.0);
            assert_eq!(p.get(j, 16), 0.0);
        }
    }

    #[test]
    fn interpolation_wraps_in_tau() {
        let g = geometry(3, 4);
        let values: Vec<f64> = (0..12).map(|i| (-(i as f64) * 0.1).exp()).collect();
        let logs = log_transform(&FanSinogram::from_values(g, values).unwrap(), None).unwrap();
        // half-way between the last view and view 0 (which wraps)
        let mid = logs.interpolate(0.0, 3.5 * g.tau_step());
        assert!((mid - 0.5 * (logs.get(3, 1) + logs.get(0, 1))).abs() < 1e-15);
        // alpha clamps at the fan edge
        assert_eq!(logs.interpolate(10.0, 0.0), logs.get(0, 2));
    }

    #[test]
    fn intensity_scale_and_log_invariance() {
        let ph = centered_disk(0.4);
        let g1 = FanGeometry::new(3.0, 1.0, 1.0, 1.0, 17, 8).unwrap();
        let g2 = FanGeometry::new(3.0, 1.0, 1.0, 2.0, 17, 8).unwrap();
        let g3 = FanGeometry::new(3.0, 4.0, 1.0, 7.0, 17, 8).unwrap();
        let (s1, s2, s3) = (
            project_fan(&ph, &g1).unwrap(),
            project_fan(&ph, &g2).unwrap(),
            project_fan(&ph, &g3).unwrap(),
        );
        for (a, b) in s1.values().iter().zip(s2.values()) {
            assert!((2.0 * a - b).abs() < 1e-15);
        }
        let l1 = log_transform(&s1, None).unwrap();
        let l3 = log_transform(&s3, None).unwrap();
        for (a, b) in l1.values().iter().zip(l3.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn parallel_flip_symmetry(
                cx in -0.3f64..0.3, cy in -0.3f64..0.3, a in 0.05f64..0.5, mu in 0.1f64..3.0,
            ) {
                let ph = Phantom::new(1.0, vec![Disk::new(cx, cy, a, mu)]).unwrap();
                // even n_sigma so sigma + pi is a grid node
                let s = project_parallel(&ph, 21, 16).unwrap();
                for j in 0..16 {
                    for k in 0..21 {
                        let flipped = s.get((j + 8) % 16, 20 - k);
                        prop_assert!((s.get(j, k) - flipped).abs() <= 1e-12);
                    }
                }
            }

            #[test]
            fn adding_absorber_never_brightens(
                cx in -0.4f64..0.4, cy in -0.4f64..0.4, a in 0.05f64..0.4, mu in 0.0f64..2.0,
            ) {
                let base = vec![Disk::new(0.1, -0.1, 0.3, 1.0)];
                let mut more = base.clone();
                more.push(Disk::new(cx, cy, a, mu));
                let g = geometry(17, 8);
                let s0 = project_fan(&Phantom::new(1.0, base).unwrap(), &g).unwrap();
                let s1 = project_fan(&Phantom::new(1.0, more).unwrap(), &g).unwrap();
                for (a, b) in s0.values().iter().zip(s1.values()) {
                    prop_assert!(b <= a);
                }
            }
        }
    }
}
