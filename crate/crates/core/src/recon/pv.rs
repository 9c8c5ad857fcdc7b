//! Principal-value quadrature across a simple pole, with the pole window
//! cut out and replaced by a second-derivative term.
//!
//! For a numerator `N` sampled on a uniform axis and a denominator `den`
//! with a single zero at the pole `p`,
//!
//! ```text
//! PV int N(x) / den(x) dx  ~  int_{|x - p| > eps} N / den dx  +  2 eps N'(p) [/ den'(p)]
//! ```
//!
//! The window term comes from expanding `N` to first order about the pole:
//! the constant part integrates to zero over a symmetric window and the
//! linear part leaves `2 eps N'(p) / den'(p)`. By default the `1 / den'(p)`
//! factor is dropped (`jacobian_correction = false`); for a denominator
//! `x - p` it is 1 anyway.
//!
//! Outside the window the integral is regular but steep near its edges.
//! Cells within [`NEAR_CELLS`] of the window are integrated with the
//! numerator taken linear between samples and `1 / (x - p)` integrated in
//! closed form (product trapezoid); farther cells use the trapezoid rule on
//! `N / den` with its first endpoint correction.

/// Cells on each side of the exclusion window that get closed-form kernel
/// weights.
pub const NEAR_CELLS: usize = 4;

/// Uniform sample axis `x_k = start + k * step`, `k < len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformAxis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformAxis {
    pub fn new(start: f64, step: f64, len: usize) -> Self {
        UniformAxis { start, step, len }
    }

    /// `len` points spanning `[start, end]`, ends included.
    pub fn spanning(start: f64, end: f64, len: usize) -> Self {
        UniformAxis::new(start, (end - start) / (len - 1) as f64, len)
    }

    pub fn at(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.at(self.len - 1)
    }
}

/// Knobs of the pole treatment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvOptions {
    /// Half-width of the excluded window, in axis units.
    pub epsilon: f64,
    /// Add the `2 eps N'(p)` window term.
    pub pole_correction: bool,
    /// Divide the window term by `den'(p)`.
    pub jacobian_correction: bool,
}

/// Where the pole fell relative to the sample axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleLocation {
    /// Window fully inside the axis; window term applied if enabled.
    Interior,
    /// Window reaches past an axis end: integrated one-sided, no window term.
    Clipped,
    /// Pole outside the axis: plain integral, nothing excluded.
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvValue {
    pub value: f64,
    pub pole: PoleLocation,
}

/// Central differences on a uniform grid, one-sided at both ends.
pub fn central_difference(samples: &[f64], step: f64) -> Vec<f64> {
    let n = samples.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|k| match k {
            0 => (samples[1] - samples[0]) / step,
            k if k == n - 1 => (samples[n - 1] - samples[n - 2]) / step,
            k => (samples[k + 1] - samples[k - 1]) / (2.0 * step),
        })
        .collect()
}

/// Linear interpolation of uniformly sampled values, clamped at the ends.
pub fn interpolate_linear(samples: &[f64], axis: &UniformAxis, x: f64) -> f64 {
    let n = samples.len();
    let t = ((x - axis.start) / axis.step).clamp(0.0, (n - 1) as f64);
    let k = (t.floor() as usize).min(n - 2);
    let w = t - k as f64;
    (1.0 - w) * samples[k] + w * samples[k + 1]
}

/// A numerator sampled on an axis, with its derivative precomputed, ready
/// to be integrated against many poles.
#[derive(Debug, Clone)]
pub struct PvIntegrand<'a> {
    numerator: &'a [f64],
    slope: Vec<f64>,
    axis: UniformAxis,
}

impl<'a> PvIntegrand<'a> {
    pub fn new(numerator: &'a [f64], axis: UniformAxis) -> Self {
        assert_eq!(
            numerator.len(),
            axis.len,
            "numerator length must match the axis"
        );
        assert!(
            axis.len >= 2 && axis.step > 0.0,
            "axis needs two increasing samples"
        );
        let slope = central_difference(numerator, axis.step);
        PvIntegrand {
            numerator,
            slope,
            axis,
        }
    }

    pub fn axis(&self) -> &UniformAxis {
        &self.axis
    }

    /// PV integral with pole `pole`.
    ///
    /// `den_node(k)` must equal `den(axis.at(k))`; it lets callers supply
    /// cached node values. `den` is only evaluated off-grid near the pole.
    pub fn evaluate(
        &self,
        pole: f64,
        den_node: impl Fn(usize) -> f64,
        den: impl Fn(f64) -> f64,
        opts: &PvOptions,
    ) -> PvValue {
        let axis = &self.axis;
        let n = axis.len;
        let h = axis.step;
        let (lo_end, hi_end) = (axis.start, axis.end());
        let eps = opts.epsilon;

        let location = if pole < lo_end || pole > hi_end {
            PoleLocation::Outside
        } else if pole - eps < lo_end || pole + eps > hi_end {
            PoleLocation::Clipped
        } else {
            PoleLocation::Interior
        };
        let (win_lo, win_hi) = match location {
            PoleLocation::Outside => (pole, pole),
            _ => (pole - eps, pole + eps),
        };

        // slope of den at the pole, by symmetric difference
        let dx = 1e-4 * h;
        let den_slope = (den(pole + dx) - den(pole - dx)) / (2.0 * dx);

        // near zone: node range [first, last] around the window
        let idx = |x: f64| (x - lo_end) / h;
        let first = (idx(win_lo).floor() - NEAR_CELLS as f64).clamp(0.0, (n - 1) as f64) as usize;
        let last = (idx(win_hi).ceil() + NEAR_CELLS as f64).clamp(0.0, (n - 1) as f64) as usize;

        let ratio = |k: usize| self.numerator[k] / den_node(k);
        // d/dx (N / den) at a node, for the endpoint correction of the
        // trapezoid rule; the integrand is steep next to the near zone
        let ratio_slope = |k: usize| {
            let dd = match k {
                0 => (den_node(1) - den_node(0)) / h,
                k if k == n - 1 => (den_node(k) - den_node(k - 1)) / h,
                k => (den_node(k + 1) - den_node(k - 1)) / (2.0 * h),
            };
            let q = den_node(k);
            self.slope[k] / q - self.numerator[k] * dd / (q * q)
        };
        let far_segment = |a: usize, b: usize| {
            let inner: f64 = (a + 1..b).map(ratio).sum();
            h * (0.5 * (ratio(a) + ratio(b)) + inner)
                - h * h / 12.0 * (ratio_slope(b) - ratio_slope(a))
        };
        let mut far = 0.0;
        if first > 0 {
            far += far_segment(0, first);
        }
        if last < n - 1 {
            far += far_segment(last, n - 1);
        }

        // near zone: numerator / q with q = den / (x - p) smooth and nonzero,
        // so the integrand is (N / q)(x) / (x - p) with N / q linear per cell
        let reduced = |k: usize| {
            let offset = axis.at(k) - pole;
            let q = if offset.abs() > dx {
                den_node(k) / offset
            } else {
                den_slope
            };
            self.numerator[k] / q
        };
        let mut near = 0.0;
        if last > first {
            let mut m0 = reduced(first);
            for k in first..last {
                let m1 = reduced(k + 1);
                let (u, v) = (axis.at(k), axis.at(k + 1));
                let slope = (m1 - m0) / h;
                let at_pole = m0 + slope * (pole - u);
                let mut segment = |a: f64, b: f64| {
                    if b > a {
                        near +=
                            at_pole * ((b - pole).abs() / (a - pole).abs()).ln() + slope * (b - a);
                    }
                };
                segment(u, v.min(win_lo));
                segment(u.max(win_hi), v);
                m0 = m1;
            }
        }

        let mut value = far + near;
        if location == PoleLocation::Interior && opts.pole_correction {
            let mut window = 2.0 * eps * interpolate_linear(&self.slope, axis, pole);
            if opts.jacobian_correction {
                window /= den_slope;
            }
            value += window;
        }
        PvValue {
            value,
            pole: location,
        }
    }
}

/// One-shot principal-value integral of `samples / den` across `pole`.
pub fn pv_inner_integral(
    samples: &[f64],
    axis: &UniformAxis,
    pole: f64,
    den: impl Fn(f64) -> f64,
    opts: &PvOptions,
) -> PvValue {
    let integrand = PvIntegrand::new(samples, *axis);
    integrand.evaluate(pole, |k| den(axis.at(k)), &den, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(epsilon: f64) -> PvOptions {
        PvOptions {
            epsilon,
            pole_correction: true,
            jacobian_correction: false,
        }
    }

    #[test]
    fn zero_numerator_gives_zero() {
        let axis = UniformAxis::spanning(-1.0, 1.0, 101);
        let zeros = vec![0.0; 101];
        let v = pv_inner_integral(&zeros, &axis, 0.123, |x| x - 0.123, &opts(0.02));
        assert_eq!(v.value, 0.0);
        assert_eq!(v.pole, PoleLocation::Interior);
    }

    #[test]
    fn numerator_equal_to_denominator_gives_interval_length() {
        // f(x) = x - p over a kernel 1 / (x - p): the integrand is 1
        let axis = UniformAxis::spanning(-2.0, 3.0, 201);
        for p in [0.0, 0.3137, -1.2, 2.49] {
            let samples: Vec<f64> = (0..axis.len).map(|k| axis.at(k) - p).collect();
            let v = pv_inner_integral(&samples, &axis, p, |x| x - p, &opts(axis.step));
            assert!((v.value - 5.0).abs() < 1e-12, "p = {p}: {}", v.value);
        }
    }

    #[test]
    fn even_gaussian_against_odd_kernel_vanishes() {
        let axis = UniformAxis::spanning(-6.0, 6.0, 4097);
        let samples: Vec<f64> = (0..axis.len).map(|k| (-axis.at(k).powi(2)).exp()).collect();
        let v = pv_inner_integral(&samples, &axis, 0.0, |x| x, &opts(axis.step));
        assert!(v.value.abs() < 1e-12, "{}", v.value);
    }

    #[test]
    fn matches_singularity_subtraction_oracle() {
        // PV int_{-1}^{1} e^x / (x - p) dx
        //   = int (e^x - e^p) / (x - p) dx + e^p ln((1 - p) / (1 + p)),
        // the first integral smooth, done here by fine Simpson
        let p: f64 = 0.2718;
        let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64, m: usize| {
            let h = (b - a) / m as f64;
            let mut s = f(a) + f(b);
            for i in 1..m {
                s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        };
        let smooth = |x: f64| {
            if (x - p).abs() < 1e-12 {
                p.exp()
            } else {
                (x.exp() - p.exp()) / (x - p)
            }
        };
        let exact = simpson(&smooth, -1.0, 1.0, 20_000) + p.exp() * ((1.0 - p) / (1.0 + p)).ln();

        let axis = UniformAxis::spanning(-1.0, 1.0, 2001);
        let samples: Vec<f64> = (0..axis.len).map(|k| axis.at(k).exp()).collect();
        let v = pv_inner_integral(&samples, &axis, p, |x| x - p, &opts(axis.step));
        assert!((v.value - exact).abs() < 1e-5, "{} vs {exact}", v.value);

        // without the window term the result is off by about 2 eps f'(p)
        let mut plain = opts(axis.step);
        plain.pole_correction = false;
        let w = pv_inner_integral(&samples, &axis, p, |x| x - p, &plain);
        let gap = v.value - w.value;
        assert!((gap - 2.0 * axis.step * p.exp()).abs() < 1e-6);
    }

    #[test]
    fn window_term_is_stable_under_epsilon() {
        let axis = UniformAxis::spanning(-1.0, 1.0, 1001);
        let samples: Vec<f64> = (0..axis.len).map(|k| (3.0 * axis.at(k)).sin()).collect();
        let p = 0.1234;
        let a = pv_inner_integral(&samples, &axis, p, |x| x - p, &opts(2.0 * axis.step)).value;
        let b = pv_inner_integral(&samples, &axis, p, |x| x - p, &opts(axis.step)).value;
        assert!((a - b).abs() < 1e-4 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn jacobian_factor_for_scaled_denominator() {
        // den = 3 (x - p): the exact PV is a third of the unit-slope one
        let axis = UniformAxis::spanning(-1.0, 1.0, 2001);
        let samples: Vec<f64> = (0..axis.len).map(|k| axis.at(k).exp()).collect();
        let p = -0.37;
        let mut o = opts(axis.step);
        o.jacobian_correction = true;
        let unit = pv_inner_integral(&samples, &axis, p, |x| x - p, &o).value;
        let scaled = pv_inner_integral(&samples, &axis, p, |x| 3.0 * (x - p), &o).value;
        assert!((3.0 * scaled - unit).abs() < 1e-9, "{scaled} vs {unit}");
    }

    #[test]
    fn pole_at_boundary_is_flagged_and_one_sided() {
        let axis = UniformAxis::spanning(0.0, 1.0, 101);
        let ones = vec![1.0; 101];
        let v = pv_inner_integral(&ones, &axis, 0.0, |x| x, &opts(0.01));
        assert_eq!(v.pole, PoleLocation::Clipped);
        // int_{0.01}^{1} dx / x = ln 100, less the far-zone trapezoid error
        assert!((v.value - 100f64.ln()).abs() < 5e-3, "{}", v.value);

        let v = pv_inner_integral(&ones, &axis, -0.5, |x| x + 0.5, &opts(0.01));
        assert_eq!(v.pole, PoleLocation::Outside);
        assert!((v.value - 3f64.ln()).abs() < 1e-4);
    }
}
