//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use fanbeam::geometry::ray_point;
use fanbeam::Phantom;

/// Integral of the phantom's attenuation along the segment `p(t)`,
/// `t in [t0, t1]`, with `p` of unit speed.
///
/// The attenuation is piecewise constant, so each step is split at the
/// jumps (found by bisection) and the pieces are summed exactly.
pub fn march(
    phantom: &Phantom,
    p: impl Fn(f64) -> (f64, f64),
    t0: f64,
    t1: f64,
    steps: usize,
) -> f64 {
    let mu = |t: f64| {
        let (x, y) = p(t);
        phantom.attenuation_at(x, y)
    };
    let h = (t1 - t0) / steps as f64;
    let mut total = 0.0;
    for i in 0..steps {
        let (a, b) = (t0 + i as f64 * h, t0 + (i + 1) as f64 * h);
        total += piece(&mu, a, b, mu(a), mu(b), 0);
    }
    total
}

fn piece(mu: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fb: f64, depth: usize) -> f64 {
    let m = 0.5 * (a + b);
    let fm = mu(m);
    if (fa == fm && fm == fb) || depth > 60 || b - a < 1e-15 {
        // constant piece, or a jump pinned to round-off
        return fm * (b - a);
    }
    piece(mu, a, m, fa, fm, depth + 1) + piece(mu, m, b, fm, fb, depth + 1)
}

/// Line integral over `x sin(sigma) + y cos(sigma) = eta` by marching.
pub fn march_line(phantom: &Phantom, eta: f64, sigma: f64) -> f64 {
    let (s, c) = sigma.sin_cos();
    let r = phantom.radius();
    march(
        phantom,
        |t| (eta * s + t * c, eta * c - t * s),
        -r,
        r,
        20_000,
    )
}

/// Line integral along the fan ray `(alpha, tau)`. The march runs in arc
/// length `t = x' sqrt(1 + tan^2 alpha)`; the support lies within `|x'| <= R`.
pub fn march_ray(phantom: &Phantom, alpha: f64, tau: f64, d: f64) -> f64 {
    let speed = (1.0 + alpha.tan().powi(2)).sqrt();
    let reach = phantom.radius() * speed;
    march(
        phantom,
        |t| ray_point(alpha, tau, t / speed, d),
        -reach,
        reach,
        20_000,
    )
}
