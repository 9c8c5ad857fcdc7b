use fanbeam::recon::ReconConfig;
use fanbeam::{
    project_fan, project_parallel, reconstruct_fan, reconstruct_parallel, Disk, FanGeometry,
    FanSinogram, Image, ParallelSinogram, Phantom,
};
use proptest::prelude::*;

fn interior_mean(img: &Image, radius: f64) -> f64 {
    let inside: Vec<f64> = img
        .pixels()
        .filter(|&(x, y, _)| x.hypot(y) < radius)
        .map(|p| p.2)
        .collect();
    inside.iter().sum::<f64>() / inside.len() as f64
}

fn max_diff(a: &Image, b: &Image) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}

/// Centroid of the pixels above half the image maximum.
fn centroid(img: &Image) -> (f64, f64) {
    let cut = 0.5 * img.max_value();
    let (mut w, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for (x, y, v) in img.pixels().filter(|p| p.2 > cut) {
        w += v;
        sx += v * x;
        sy += v * y;
    }
    (sx / w, sy / w)
}

#[test]
fn fan_reconstruction_is_linear_in_log_data() {
    let g = FanGeometry::new(3.0, 1.0, 1.0, 1.0, 65, 64).unwrap();
    let a = Disk::new(0.2, 0.1, 0.3, 1.0);
    let b = Disk::new(-0.3, -0.2, 0.25, 0.6);
    let cfg = ReconConfig::with_grid(17);
    let rec = |disks: Vec<Disk>| {
        let ph = Phantom::new(1.0, disks).unwrap();
        reconstruct_fan(&project_fan(&ph, &g).unwrap(), &cfg)
            .unwrap()
            .image
    };
    let (ra, rb, both) = (rec(vec![a]), rec(vec![b]), rec(vec![a, b]));
    let sum = Image::from_values(
        17,
        1.0,
        ra.values()
            .iter()
            .zip(rb.values())
            .map(|(u, v)| u + v)
            .collect(),
    )
    .unwrap();
    assert!(max_diff(&both, &sum) < 1e-9, "{}", max_diff(&both, &sum));
}

#[test]
fn parallel_reconstruction_is_linear() {
    let ph1 = Phantom::new(1.0, vec![Disk::new(0.2, 0.1, 0.3, 1.0)]).unwrap();
    let ph2 = Phantom::new(1.0, vec![Disk::new(-0.1, 0.4, 0.2, 2.0)]).unwrap();
    let (s1, s2) = (
        project_parallel(&ph1, 65, 48).unwrap(),
        project_parallel(&ph2, 65, 48).unwrap(),
    );
    let combo: Vec<f64> = s1
        .values()
        .iter()
        .zip(s2.values())
        .map(|(u, v)| 2.5 * u - 0.7 * v)
        .collect();
    let cfg = ReconConfig::with_grid(17);
    let r = |s: &ParallelSinogram| reconstruct_parallel(s, &cfg).unwrap().image;
    let lhs = r(&ParallelSinogram::from_values(1.0, 65, 48, combo).unwrap());
    let (r1, r2) = (r(&s1), r(&s2));
    let rhs = Image::from_values(
        17,
        1.0,
        r1.values()
            .iter()
            .zip(r2.values())
            .map(|(u, v)| 2.5 * u - 0.7 * v)
            .collect(),
    )
    .unwrap();
    assert!(max_diff(&lhs, &rhs) < 1e-10);
}

#[test]
fn rotation_moves_the_feature_with_the_phantom() {
    let g = FanGeometry::new(3.0, 1.0, 1.0, 1.0, 129, 180).unwrap();
    let ph = Phantom::new(1.0, vec![Disk::new(0.4, 0.1, 0.2, 1.0)]).unwrap();
    let delta = 0.9;
    let n = 41;
    let cfg = ReconConfig::with_grid(n);
    let c0 = centroid(
        &reconstruct_fan(&project_fan(&ph, &g).unwrap(), &cfg)
            .unwrap()
            .image,
    );
    let c1 = centroid(
        &reconstruct_fan(&project_fan(&ph.rotated(delta).unwrap(), &g).unwrap(), &cfg)
            .unwrap()
            .image,
    );
    // rotate the first centroid with the phantom's own convention
    let moved = Phantom::new(1.0, vec![Disk::new(c0.0, c0.1, 0.01, 1.0)])
        .unwrap()
        .rotated(delta)
        .unwrap();
    let expected = (moved.disks()[0].cx, moved.disks()[0].cy);
    let drift = (c1.0 - expected.0).hypot(c1.1 - expected.1);
    let cell = 2.0 / n as f64;
    assert!(drift <= 2.0 * cell, "drift {drift} vs cell {cell}");
}

#[test]
fn zero_data_maps_to_zero_image() {
    let g = FanGeometry::new(3.0, 2.0, 1.0, 7.0, 33, 24).unwrap();
    let flat = FanSinogram::from_values(g, vec![g.vacuum_intensity(); 33 * 24]).unwrap();
    let cfg = ReconConfig::with_grid(15);
    assert!(reconstruct_fan(&flat, &cfg)
        .unwrap()
        .image
        .values()
        .iter()
        .all(|&v| v == 0.0));
    let zero = ParallelSinogram::from_values(1.0, 33, 24, vec![0.0; 33 * 24]).unwrap();
    assert!(reconstruct_parallel(&zero, &cfg)
        .unwrap()
        .image
        .values()
        .iter()
        .all(|&v| v == 0.0));
}

/// Halving the pole window (down to its floor of half a grid step) must
/// leave the disk interior mean within 1%.
#[test]
fn halving_epsilon_barely_moves_the_interior() {
    let ph = Phantom::new(1.0, vec![Disk::new(0.0, 0.0, 0.5, 1.0)]).unwrap();
    let g = FanGeometry::new(3.0, 1.0, 1.0, 1.0, 257, 360).unwrap();
    let fan = project_fan(&ph, &g).unwrap();
    let par = project_parallel(&ph, 257, 360).unwrap();
    let change = |run: &dyn Fn(Option<f64>) -> Image, step: f64| {
        let a = interior_mean(&run(Some(step)), 0.3);
        let b = interior_mean(&run(Some(0.5 * step)), 0.3);
        (b / a - 1.0).abs()
    };
    let base = ReconConfig::with_grid(41);

    let parallel = change(
        &|e| {
            reconstruct_parallel(&par, &ReconConfig { epsilon: e, ..base })
                .unwrap()
                .image
        },
        par.eta_step(),
    );
    let corrected = change(
        &|e| {
            reconstruct_fan(
                &fan,
                &ReconConfig {
                    epsilon: e,
                    jacobian_correction: true,
                    ..base
                },
            )
            .unwrap()
            .image
        },
        g.alpha_step(),
    );
    let literal = change(
        &|e| {
            reconstruct_fan(&fan, &ReconConfig { epsilon: e, ..base })
                .unwrap()
                .image
        },
        g.alpha_step(),
    );
    eprintln!("interior mean change: parallel {parallel:.2e}, fan {corrected:.2e}, fan without D cos alpha {literal:.2e}");
    assert!(parallel <= 0.01);
    assert!(corrected <= 0.01);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn positive_fan_data_never_yields_nan(values in prop::collection::vec(1e-300f64..1e3, 17 * 8)) {
        let g = FanGeometry::new(2.5, 1.0, 1.0, 1.0, 17, 8).unwrap();
        let s = FanSinogram::from_values(g, values).unwrap();
        let rec = reconstruct_fan(&s, &ReconConfig::with_grid(9)).unwrap();
        prop_assert!(rec.image.all_finite());
    }

    #[test]
    fn finite_parallel_data_never_yields_nan(values in prop::collection::vec(-1e6f64..1e6, 17 * 8)) {
        let s = ParallelSinogram::from_values(1.0, 17, 8, values).unwrap();
        let rec = reconstruct_parallel(&s, &ReconConfig::with_grid(9)).unwrap();
        prop_assert!(rec.image.all_finite());
    }
}
