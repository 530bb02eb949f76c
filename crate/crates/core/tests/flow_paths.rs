use std::f64::consts::PI;

use hsgeo::flow::{integrate_flow, path_length, sup_displacement, VelocityPath};
use hsgeo::kernels::greens_function;
use hsgeo::shortpath::{alpha_for_strip, LineConstruction};
use hsgeo::spectral::bump;
use hsgeo::{Diffeo1D, Field, Grid1D, MetricSpec};
use proptest::prelude::*;

fn times(t: f64, k: usize) -> Vec<f64> {
    (0..=k).map(|i| t * i as f64 / k as f64).collect()
}

fn wave(a: f64, b: f64) -> impl Fn(f64, f64) -> f64 + Send + Sync + Clone {
    move |t: f64, x: f64| a * (x + t).sin() + b * (2.0 * x).cos() * (1.0 + 0.5 * t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn flow_over_halves_composes(a in -0.3f64..0.3, b in -0.2f64..0.2) {
        let g = Grid1D::circle(1024).unwrap();
        let path = VelocityPath::from_generator(g, times(1.0, 64), "wave", wave(a, b)).unwrap();
        let full = integrate_flow(&path, 8).unwrap().endpoint;
        let first = integrate_flow(&path.slice(0, 32).unwrap(), 8).unwrap().endpoint;
        let second = integrate_flow(&path.slice(32, 64).unwrap(), 8).unwrap().endpoint;
        let composed = second.compose(&first).unwrap();
        prop_assert!(sup_displacement(&full, &composed).unwrap() < 1e-8);
    }

    #[test]
    fn length_is_stable_under_time_refinement(a in -0.5f64..0.5, b in -0.5f64..0.5, s in 0.0f64..1.5) {
        prop_assume!(a.abs() + b.abs() > 0.05);
        let g = Grid1D::circle(128).unwrap();
        let spec = MetricSpec::hs(s).unwrap();
        let coarse = VelocityPath::from_generator(g, times(2.0, 32), "w", wave(a, b)).unwrap();
        let fine = VelocityPath::from_generator(g, times(2.0, 64), "w", wave(a, b)).unwrap();
        let (l1, l2) = (path_length(&spec, &coarse).unwrap(), path_length(&spec, &fine).unwrap());
        prop_assert!((l1 - l2).abs() < 1e-3 * l2);
    }

    #[test]
    fn green_kernel_is_positive(s in 0.3f64..3.0, r in 0.01f64..20.0) {
        let k = greens_function(&MetricSpec::hs(s).unwrap(), 1).unwrap();
        prop_assert!(k.eval(r).unwrap() > 0.0);
    }
}

/// Length bounds displacement from below for `s > 1/2` on every path of a
/// small corpus of smooth, circle and line paths.
#[test]
fn length_controls_displacement_above_half() {
    let g = Grid1D::circle(512).unwrap();
    let spec = MetricSpec::hs(0.75).unwrap();
    let mut ratios = Vec::new();
    for (a, b) in [(0.3, 0.0), (0.0, 0.2), (0.1, -0.1), (0.02, 0.01)] {
        let path = VelocityPath::from_generator(g, times(1.0, 64), "w", wave(a, b)).unwrap();
        let end = integrate_flow(&path, 8).unwrap().endpoint;
        let sup = sup_displacement(&end, &Diffeo1D::identity(g)).unwrap();
        ratios.push(path_length(&spec, &path).unwrap() / sup);
    }
    let shift = VelocityPath::constant(Field::from_fn(g, |_| 0.7), 1.0, 4).unwrap();
    ratios.push(path_length(&spec, &shift).unwrap() / 0.7);

    let lg = Grid1D::new(2048, 6.0).unwrap();
    let target = Diffeo1D::from_fn(lg, |x| x + 0.4 * bump((x - 2.5) / 1.5)).unwrap();
    let alpha = alpha_for_strip(&target, 0.1, &lg).unwrap();
    let mut lc = LineConstruction::new(target.clone(), alpha, 0.02, lg).unwrap();
    lc.correct_endpoint().unwrap();
    let path = lc.path(129).unwrap();
    let line_spec = spec.on_line_window(6.0).unwrap();
    ratios.push(path_length(&line_spec, &path).unwrap() / 0.4);

    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(min > 1e-3, "{ratios:?}");
    let _ = PI;
}

#[test]
fn strip_width_grows_with_angle_over_a_sweep() {
    let lg = Grid1D::new(2048, 6.0).unwrap();
    let target = Diffeo1D::from_fn(lg, |x| x + 0.4 * bump((x - 2.5) / 1.5)).unwrap();
    let alphas: Vec<f64> = [0.12, 0.06, 0.03, 0.015].iter().map(|&d| alpha_for_strip(&target, d, &lg).unwrap()).collect();
    assert!(alphas.windows(2).all(|w| w[1] < w[0]), "{alphas:?}");
    let widths: Vec<f64> = alphas
        .iter()
        .map(|&a| LineConstruction::new(target.clone(), a, 0.01, lg).unwrap().strip_width())
        .collect();
    assert!(widths.windows(2).all(|w| w[1] < w[0]));
    for (w, d) in widths.iter().zip([0.12, 0.06, 0.03, 0.015]) {
        assert!((w - d).abs() < 1e-6 * d, "{w} {d}");
    }
}
