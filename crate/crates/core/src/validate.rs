//! Numerical checks of the inversion chain: the Fourier-slice identity,
//! the convergence-factor limit behind the principal value, and the
//! closed-form reconstruction of uniform line-integral data.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forward::{project_parallel, ParallelSinogram};
use crate::image::Image;
use crate::phantom::{Disk, Phantom};

/// A point `(u, v) = rho (cos theta, sin theta)` of the 2D spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierSample {
    pub rho: f64,
    pub theta: f64,
    pub re: f64,
    pub im: f64,
}

impl FourierSample {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `g(u, v) = int int F(x, y) exp(-i (u x + v y)) dx dy` over the image,
/// by the pixel-centre rule (the trapezoid rule with zero boundary values).
pub fn fourier_slice_lhs(img: &Image, rho: f64, theta: f64) -> FourierSample {
    let (u, v) = (rho * theta.cos(), rho * theta.sin());
    let h = img.pixel_size();
    let sum: Complex64 = img
        .pixels()
        .filter(|&(_, _, f)| f != 0.0)
        .map(|(x, y, f)| Complex64::from_polar(f, -(u * x + v * y)))
        .sum();
    let value = sum * h * h;
    FourierSample {
        rho,
        theta,
        re: value.re,
        im: value.im,
    }
}

/// `int exp(-i rho eta) Phi(eta, pi/2 - theta) d eta` by the trapezoid rule
/// over `[-R, R]`, with `Phi` interpolated in `sigma`.
pub fn fourier_slice_rhs(sino: &ParallelSinogram, rho: f64, theta: f64) -> FourierSample {
    let profile = sino.profile_at(PI / 2.0 - theta);
    let h = sino.eta_step();
    let last = profile.len() - 1;
    let value: Complex64 = profile
        .iter()
        .enumerate()
        .map(|(k, &phi)| {
            let w = if k == 0 || k == last { 0.5 } else { 1.0 };
            Complex64::from_polar(w * phi, -rho * sino.eta(k))
        })
        .sum::<Complex64>()
        * h;
    FourierSample {
        rho,
        theta,
        re: value.re,
        im: value.im,
    }
}

/// Smooth test functions for the convergence-factor lemma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    /// `f = 1`
    Constant,
    /// `f = exp(-x^2)`
    Gaussian,
    /// `f = x exp(-x^2)`
    OddGaussian,
    /// `f = x^2 exp(-(x/3)^4)`
    CutoffQuadratic,
}

impl TestFunction {
    pub const ALL: [TestFunction; 4] = [
        TestFunction::Constant,
        TestFunction::Gaussian,
        TestFunction::OddGaussian,
        TestFunction::CutoffQuadratic,
    ];

    pub fn value(&self, x: f64) -> f64 {
        match self {
            TestFunction::Constant => 1.0,
            TestFunction::Gaussian => (-x * x).exp(),
            TestFunction::OddGaussian => x * (-x * x).exp(),
            TestFunction::CutoffQuadratic => x * x * (-(x / 3.0).powi(4)).exp(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            TestFunction::Constant => 0.0,
            TestFunction::Gaussian => -2.0 * x * (-x * x).exp(),
            TestFunction::OddGaussian => (1.0 - 2.0 * x * x) * (-x * x).exp(),
            TestFunction::CutoffQuadratic => {
                (-(x / 3.0).powi(4)).exp() * (2.0 * x - 4.0 * x.powi(5) / 81.0)
            }
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match self {
            TestFunction::Constant => 0.0,
            TestFunction::Gaussian => (4.0 * x * x - 2.0) * (-x * x).exp(),
            TestFunction::OddGaussian => (4.0 * x.powi(3) - 6.0 * x) * (-x * x).exp(),
            TestFunction::CutoffQuadratic => {
                (-(x / 3.0).powi(4)).exp()
                    * (2.0 - 28.0 * x.powi(4) / 81.0 + 16.0 * x.powi(8) / 6561.0)
            }
        }
    }
}

/// Symmetric sample axis `[-half_width, half_width]` with `nodes` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaAxis {
    pub half_width: f64,
    pub nodes: usize,
}

impl LemmaAxis {
    pub fn new(half_width: f64, nodes: usize) -> Self {
        LemmaAxis { half_width, nodes }
    }

    fn step(&self) -> f64 {
        2.0 * self.half_width / (self.nodes - 1) as f64
    }
}

/// Convergence-factor kernel `(x^2 - delta^2) / (x^2 + delta^2)^2`.
pub fn lemma_kernel(x: f64, delta: f64) -> f64 {
    let (x2, d2) = (x * x, delta * delta);
    (x2 - d2) / ((x2 + d2) * (x2 + d2))
}

/// `int kernel(x, delta) f(x) dx` by the trapezoid rule on the axis.
///
/// The kernel decays like `x^-2`, so the tails beyond the axis are closed
/// analytically with `f` frozen at its end values; the kernel's antiderivative
/// `-x / (x^2 + delta^2)` gives `half_width / (half_width^2 + delta^2)` per side.
pub fn lemma_lhs(f: TestFunction, delta: f64, axis: &LemmaAxis) -> f64 {
    let h = axis.step();
    let last = axis.nodes - 1;
    let body: f64 = (0..axis.nodes)
        .map(|k| {
            let x = -axis.half_width + k as f64 * h;
            let w = if k == 0 || k == last { 0.5 } else { 1.0 };
            w * lemma_kernel(x, delta) * f.value(x)
        })
        .sum::<f64>()
        * h;
    let x = axis.half_width;
    let tail = x / (x * x + delta * delta) * (f.value(x) + f.value(-x));
    body + tail
}

/// `int_0^inf (f'(x) - f'(-x)) / x dx`, truncated at the axis half-width,
/// trapezoid rule with the `x -> 0` value filled in as `2 f''(0)`.
pub fn lemma_rhs(f: TestFunction, axis: &LemmaAxis) -> f64 {
    let nodes = axis.nodes / 2 + 1;
    let h = axis.half_width / (nodes - 1) as f64;
    (0..nodes)
        .map(|k| {
            let x = k as f64 * h;
            let g = if k == 0 {
                2.0 * f.second_derivative(0.0)
            } else {
                (f.derivative(x) - f.derivative(-x)) / x
            };
            let w = if k == 0 || k == nodes - 1 { 0.5 } else { 1.0 };
            w * g
        })
        .sum::<f64>()
        * h
}

/// Linear extrapolation to `delta -> 0` from the two smallest deltas in the
/// sweep (the lemma's left side approaches its limit linearly in `delta`).
pub fn lemma_limit_estimate(f: TestFunction, deltas: &[f64], axis: &LemmaAxis) -> f64 {
    let mut sorted = deltas.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let (d1, d2) = (sorted[1], sorted[0]);
    let (l1, l2) = (lemma_lhs(f, d1, axis), lemma_lhs(f, d2, axis));
    (d1 * l2 - d2 * l1) / (d1 - d2)
}

/// Reconstruction of `Phi = 1` on `|eta| < R`: `1 / (pi sqrt(R^2 - r^2))`.
pub fn uniform_phi_reference(r: f64, support_radius: f64) -> Result<f64> {
    if !(r.abs() < support_radius) {
        return Err(Error::Domain(format!(
            "uniform-phi reference needs |r| < R, got r = {r}, R = {support_radius}"
        )));
    }
    Ok(1.0 / (PI * (support_radius * support_radius - r * r).sqrt()))
}

/// The same value from its angular integral
/// `1/(4 pi^2) int [1/(R - r sin(phi + sigma)) + 1/(R + r sin(phi + sigma))] d sigma`,
/// by the periodic trapezoid rule.
pub fn uniform_phi_sigma_integral(
    r: f64,
    phi: f64,
    support_radius: f64,
    nodes: usize,
) -> Result<f64> {
    if !(r.abs() < support_radius) {
        return Err(Error::Domain(format!(
            "uniform-phi integral needs |r| < R, got r = {r}, R = {support_radius}"
        )));
    }
    let h = TAU / nodes as f64;
    let sum: f64 = (0..nodes)
        .map(|j| {
            let s = r * (phi + j as f64 * h).sin();
            1.0 / (support_radius - s) + 1.0 / (support_radius + s)
        })
        .sum();
    Ok(sum * h / (4.0 * PI * PI))
}

/// One line of a validation report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub parameters: Value,
    pub observed: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// Passes when `observed <= bound`.
    fn at_most(check: &str, parameters: Value, observed: f64, bound: f64) -> Self {
        CheckRecord {
            check: check.to_string(),
            parameters,
            observed,
            bound,
            pass: observed <= bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    FourierSlice,
    Lemma,
    UniformPhi,
    All,
}

/// Frozen settings of the validation suites.
pub mod settings {
    pub const UNIFORM_PHI_RATIOS: [f64; 4] = [0.0, 0.3, 0.6, 0.9];
    pub const UNIFORM_PHI_NODES: usize = 720;
    pub const UNIFORM_PHI_REL_TOL: f64 = 1e-10;
    pub const UNIFORM_PHI_CENTER_TOL: f64 = 1e-12;

    pub const LEMMA_DELTAS: [f64; 3] = [0.1, 0.05, 0.025];
    pub const LEMMA_HALF_WIDTH: f64 = 8.0;
    pub const LEMMA_NODES: usize = 4097;
    /// Distance of the extrapolated `delta -> 0` value from `-2 sqrt(pi)`.
    pub const LEMMA_LIMIT_TOL: f64 = 1e-2;
    /// Relative agreement of the cutoff-quadratic limit with the PV side.
    pub const LEMMA_CUTOFF_REL_TOL: f64 = 1e-2;
    pub const LEMMA_ZERO_TOL: f64 = 1e-6;

    pub const FOURIER_RHOS: [f64; 4] = [0.0, 2.0, 4.0, 8.0];
    pub const FOURIER_THETAS: usize = 8;
    pub const FOURIER_RASTER: usize = 1024;
    pub const FOURIER_N_ETA: usize = 1025;
    pub const FOURIER_N_SIGMA: usize = 720;
    pub const FOURIER_REL_TOL: f64 = 1e-2;
}

fn uniform_phi_suite() -> Vec<CheckRecord> {
    use settings::*;
    let mut out = Vec::new();
    let center = uniform_phi_reference(0.0, 1.0).expect("r = 0 < R");
    out.push(CheckRecord::at_most(
        "uniform-phi-center",
        json!({ "r": 0.0, "R": 1.0, "expected": 1.0 / PI }),
        (center - 1.0 / PI).abs(),
        UNIFORM_PHI_CENTER_TOL,
    ));
    for ratio in UNIFORM_PHI_RATIOS {
        let closed = uniform_phi_reference(ratio, 1.0).expect("ratio < 1");
        let integral =
            uniform_phi_sigma_integral(ratio, 0.37, 1.0, UNIFORM_PHI_NODES).expect("ratio < 1");
        out.push(CheckRecord::at_most(
            "uniform-phi-identity",
            json!({ "r": ratio, "R": 1.0, "phi": 0.37, "nodes": UNIFORM_PHI_NODES }),
            ((integral - closed) / closed).abs(),
            UNIFORM_PHI_REL_TOL,
        ));
    }
    out
}

fn lemma_suite() -> Vec<CheckRecord> {
    use settings::*;
    let axis = LemmaAxis::new(LEMMA_HALF_WIDTH, LEMMA_NODES);
    let target = -2.0 * PI.sqrt();
    let mut out = Vec::new();

    for f in [TestFunction::Constant, TestFunction::OddGaussian] {
        for delta in LEMMA_DELTAS {
            out.push(CheckRecord::at_most(
                "lemma-vanishing-lhs",
                json!({ "f": f, "delta": delta, "axis": axis }),
                lemma_lhs(f, delta, &axis).abs(),
                LEMMA_ZERO_TOL,
            ));
        }
    }

    out.push(CheckRecord::at_most(
        "lemma-rhs-gaussian",
        json!({ "f": TestFunction::Gaussian, "axis": axis, "expected": target }),
        (lemma_rhs(TestFunction::Gaussian, &axis) - target).abs(),
        LEMMA_ZERO_TOL,
    ));

    let errors: Vec<f64> = LEMMA_DELTAS
        .iter()
        .map(|&d| (lemma_lhs(TestFunction::Gaussian, d, &axis) - target).abs())
        .collect();
    let growth = errors
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(CheckRecord {
        check: "lemma-monotone-convergence".into(),
        parameters: json!({ "f": TestFunction::Gaussian, "deltas": LEMMA_DELTAS, "errors": errors }),
        observed: growth,
        bound: 0.0,
        pass: growth < 0.0,
    });

    let limit = lemma_limit_estimate(TestFunction::Gaussian, &LEMMA_DELTAS, &axis);
    out.push(CheckRecord::at_most(
        "lemma-extrapolated-limit",
        json!({ "f": TestFunction::Gaussian, "deltas": LEMMA_DELTAS, "limit": limit, "expected": target }),
        (limit - target).abs(),
        LEMMA_LIMIT_TOL,
    ));

    let quad = TestFunction::CutoffQuadratic;
    let limit = lemma_limit_estimate(quad, &LEMMA_DELTAS, &axis);
    let pv = lemma_rhs(quad, &axis);
    out.push(CheckRecord::at_most(
        "lemma-cutoff-quadratic",
        json!({ "f": quad, "deltas": LEMMA_DELTAS, "limit": limit, "pv": pv }),
        ((limit - pv) / pv).abs(),
        LEMMA_CUTOFF_REL_TOL,
    ));
    out
}

/// Disk phantom used by the Fourier-slice suite.
pub fn fourier_disk() -> Phantom {
    Phantom::new(1.0, vec![Disk::new(0.0, 0.0, 0.5, 1.0)]).expect("fixed disk fits the support")
}

fn fourier_suite() -> Vec<CheckRecord> {
    use settings::*;
    let phantom = fourier_disk();
    let img = phantom
        .raster(FOURIER_RASTER)
        .expect("raster size is valid");
    let sino = project_parallel(&phantom, FOURIER_N_ETA, FOURIER_N_SIGMA).expect("grid is valid");

    let pairs: Vec<(f64, f64)> = FOURIER_RHOS
        .iter()
        .flat_map(|&rho| {
            (0..FOURIER_THETAS).map(move |j| (rho, (j as f64 + 0.5) * TAU / FOURIER_THETAS as f64))
        })
        .collect();
    let lhs: Vec<Complex64> = pairs
        .iter()
        .map(|&(r, t)| fourier_slice_lhs(&img, r, t).value())
        .collect();
    let rhs: Vec<Complex64> = pairs
        .iter()
        .map(|&(r, t)| fourier_slice_rhs(&sino, r, t).value())
        .collect();
    let scale = lhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let worst = lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);

    let mut out = vec![CheckRecord::at_most(
        "fourier-slice-identity",
        json!({
            "phantom": phantom,
            "rhos": FOURIER_RHOS,
            "thetas": FOURIER_THETAS,
            "raster": FOURIER_RASTER,
            "n_eta": FOURIER_N_ETA,
            "n_sigma": FOURIER_N_SIGMA,
            "max_modulus": scale,
        }),
        worst / scale,
        FOURIER_REL_TOL,
    )];

    let low = fourier_slice_lhs(&img, 2.0, 0.3).value().norm();
    let high = fourier_slice_lhs(&img, 16.0, 0.3).value().norm();
    out.push(CheckRecord {
        check: "fourier-decay".into(),
        parameters: json!({ "rho_low": 2.0, "rho_high": 16.0, "low": low, "high": high }),
        observed: high / low,
        bound: 1.0,
        pass: high < low,
    });
    out
}

/// Runs a validation suite and returns its records.
pub fn run_suite(suite: Suite) -> Vec<CheckRecord> {
    match suite {
        Suite::FourierSlice => fourier_suite(),
        Suite::Lemma => lemma_suite(),
        Suite::UniformPhi => uniform_phi_suite(),
        Suite::All => {
            let mut all = uniform_phi_suite();
            all.extend(lemma_suite());
            all.extend(fourier_suite());
            all
        }
    }
}
