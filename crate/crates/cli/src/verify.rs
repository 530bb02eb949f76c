//! The `verify` invariant suite.

use std::f64::consts::PI;

use hsgeo::flow::integrate_flow;
use hsgeo::geodesic::{ad_transpose, lie_bracket};
use hsgeo::kernels::{convolve_compact, greens_function};
use hsgeo::norms::{equivalence_ratio, inner, metric_at};
use hsgeo::shortpath::{build_circle_path, circle_substeps, rotation_defect, shift_integral, time_in_support};
use hsgeo::spectral::{apply_multiplier, bump, forward, inertia_inverse, Parity, ZeroMode};
use hsgeo::{Diffeo1D, Field, Grid1D, MetricSpec, MultiplierOp};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::commands::{allowed, Outcome};
use crate::config::{config_err, CliResult, Config};
use crate::fields::{random_profile, sample};
use crate::report::{num, object};

/// Size of the symbol perturbation injected by `fault = hilbert`.
const HILBERT_FAULT: f64 = 1e-6;

struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }
}

fn hilbert_op(faulty: bool) -> MultiplierOp {
    if !faulty {
        return MultiplierOp::hilbert();
    }
    MultiplierOp::complex("hilbert (perturbed)", Parity::Odd, |xi| {
        Complex64::new(0.0, -xi.signum() * (1.0 + HILBERT_FAULT))
    })
    .with_zero(ZeroMode::Declared(Complex64::new(0.0, 0.0)))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn parseval(grid: Grid1D, seed: u64) -> CliResult<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = Field::new(grid, (0..grid.n_points()).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
    let physical: f64 = f.values().iter().map(|v| v * v).sum();
    let spectral: f64 = forward(&f).coeffs().iter().map(|c| c.norm_sqr()).sum();
    Ok(rel(physical, spectral))
}

fn hilbert_involution(grid: Grid1D, seed: u64, faulty: bool) -> CliResult<f64> {
    let f = sample(grid, &random_profile(seed, 12, grid.length()));
    let f = f.map(|v| v + 0.3);
    let h = hilbert_op(faulty);
    let hh = apply_multiplier(&h, &apply_multiplier(&h, &f)?)?;
    let mean = f.mean();
    Ok(hh.values().iter().zip(f.values()).map(|(a, b)| (a + (b - mean)).abs()).fold(0.0, f64::max))
}

/// Shift-time uniformity, `T = 2 + I(lambda*)`, the bisection residual and
/// the rigid-rotation defect for a small circle construction.
fn circle_claims(seed: u64) -> CliResult<[f64; 4]> {
    let grid = Grid1D::circle(256)?;
    let (path, c) = build_circle_path(3, 1.0, &grid)?;
    let sub = circle_substeps(&path, &c);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let times: Vec<f64> = (0..16)
        .map(|_| time_in_support(&path, &c, rng.gen_range(0.0..grid.length()), sub))
        .collect::<Result<_, _>>()?;
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    let spread = times.iter().map(|t| (t - mean).abs()).fold(0.0, f64::max) / mean;
    let t_shift = c.t_shift()?;
    let measured = times.iter().map(|t| (t - t_shift).abs()).fold(0.0, f64::max);
    let bisection = (shift_integral(&c)? - 1.0).abs();
    let flow = integrate_flow(&path, sub)?;
    let d = flow.endpoint.displacement();
    let mean_shift = d.iter().sum::<f64>() / d.len() as f64;
    let rotation = rotation_defect(&flow.endpoint).max((mean_shift - 1.0).abs());
    Ok([spread, measured, bisection, rotation])
}

fn weak_form(grid: Grid1D, seed: u64) -> CliResult<f64> {
    let specs = [
        MetricSpec::hs(0.0)?,
        MetricSpec::hs(0.5)?,
        MetricSpec::hs(1.0)?,
        MetricSpec::hsbar(0.5)?,
        MetricSpec::hsbar(1.0)?,
    ];
    let mut worst = 0.0_f64;
    for (i, spec) in specs.iter().enumerate() {
        for j in 0..4u64 {
            let base = seed.wrapping_mul(1000).wrapping_add(10 * i as u64 + j);
            let field = |k: u64| sample(grid, &random_profile(base.wrapping_mul(3).wrapping_add(k), 8, grid.length()));
            let (u, v, w) = (field(0), field(1), field(2));
            let bracket = lie_bracket(&v, &w)?.scale(-1.0);
            let lhs = inner(spec, &u, &bracket)?;
            let rhs = inner(spec, &ad_transpose(spec, &u, &v)?, &w)?;
            worst = worst.max(rel(lhs, rhs));
        }
    }
    Ok(worst)
}

/// Largest gap between the Green's kernel convolution and the grid inverse
/// multiplier for `s = 1` on a wide window.
fn kernel_vs_multiplier() -> CliResult<f64> {
    let spec = MetricSpec::hs(1.0)?;
    let grid = Grid1D::new(4096, 40.0)?;
    let kernel = greens_function(&spec, 1)?;
    let input = |x: f64| bump(x) * (1.0 + 0.5 * (2.0 * x + 0.3).cos());
    let m = Field::from_fn(grid, |x| input(grid.centered(x)));
    let u = apply_multiplier(&inertia_inverse(&spec), &m)?;
    let mut worst = 0.0_f64;
    for j in (0..grid.n_points()).step_by(128) {
        let x = grid.centered(grid.node(j));
        if x.abs() > 3.0 {
            continue;
        }
        let k = convolve_compact(&kernel, &input, (-1.0, 1.0), x)?;
        worst = worst.max((k - u.values()[j]).abs());
    }
    Ok(worst)
}

/// Distance of the observed `H^1 / Hbar^1` ratio range outside
/// `[1/sqrt 2, sqrt 2]`.
fn equivalence(grid: Grid1D, seed: u64) -> CliResult<f64> {
    let samples: Vec<Field> =
        (0..8).map(|k| sample(grid, &random_profile(seed.wrapping_add(100 + k), 10, grid.length()))).collect();
    let (lo, hi) = equivalence_ratio(1.0, &samples)?;
    Ok((0.5f64.sqrt() - lo).max(hi - 2f64.sqrt()).max(0.0))
}

fn right_invariance(seed: u64) -> CliResult<f64> {
    let grid = Grid1D::circle(2048)?;
    let spec = MetricSpec::hs(1.0)?;
    let phi_fn = |x: f64| x + 0.2 * x.sin() + 0.1;
    let phi = Diffeo1D::from_fn(grid, phi_fn)?;
    let xf = random_profile(seed.wrapping_add(200), 6, 2.0 * PI);
    let yf = random_profile(seed.wrapping_add(201), 6, 2.0 * PI);
    let x = sample(grid, &xf);
    let y = sample(grid, &yf);
    let x_phi = Field::from_fn(grid, |t| xf(phi_fn(t)));
    let y_phi = Field::from_fn(grid, |t| yf(phi_fn(t)));
    let lhs = metric_at(&spec, &phi, &x_phi, &y_phi)?;
    let rhs = inner(&spec, &x, &y)?;
    Ok(rel(lhs, rhs))
}

pub fn cmd_verify(cfg: &Config, fault_flag: Option<&str>) -> CliResult<Outcome> {
    cfg.check_keys(&allowed(&["fault"]))?;
    let fault = fault_flag.or(cfg.raw("fault")).unwrap_or("none");
    let faulty = match fault {
        "none" => false,
        "hilbert" => true,
        other => return Err(config_err(format!("unknown fault '{other}' (none, hilbert)"))),
    };
    let seed: u64 = cfg.get_or("seed", 0)?;
    let n: usize = cfg.get_or("grid_n", 256)?;
    let grid = Grid1D::new(n, cfg.get_or("period", 2.0 * PI)?)?;
    let [spread, measured, bisection, rotation] = circle_claims(seed)?;
    let checks = [
        Check { name: "parseval", value: parseval(grid, seed)?, tolerance: 1e-12 },
        Check { name: "hilbert_involution", value: hilbert_involution(grid, seed, faulty)?, tolerance: 1e-10 },
        Check { name: "shift_time_uniform", value: spread, tolerance: 1e-6 },
        Check { name: "shift_time_formula", value: measured, tolerance: 1e-8 },
        Check { name: "shift_integral_root", value: bisection, tolerance: 1e-10 },
        Check { name: "rigid_rotation", value: rotation, tolerance: 1e-3 },
        Check { name: "weak_form_identity", value: weak_form(grid, seed)?, tolerance: 1e-8 },
        Check { name: "kernel_vs_multiplier", value: kernel_vs_multiplier()?, tolerance: 1e-6 },
        Check { name: "equivalence_ratio", value: equivalence(grid, seed)?, tolerance: 0.0 },
        Check { name: "right_invariance", value: right_invariance(seed)?, tolerance: 1e-6 },
    ];
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for c in &checks {
        let ok = c.passed();
        if !ok {
            failures.push(c.name.to_string());
        }
        text.push_str(&format!(
            "{:<22} {} value={:.3e} tol={:.1e}\n",
            c.name,
            if ok { "PASS" } else { "FAIL" },
            c.value,
            c.tolerance
        ));
        rows.push(object([
            ("name", c.name.into()),
            ("value", num(c.value)),
            ("tolerance", num(c.tolerance)),
            ("passed", ok.into()),
        ]));
    }
    let json = object([
        ("seed", seed.into()),
        ("grid_n", n.into()),
        ("fault", fault.into()),
        ("passed", failures.is_empty().into()),
        ("checks", Value::Array(rows)),
        ("failed", Value::Array(failures.iter().map(|f| Value::from(f.as_str())).collect())),
    ]);
    let mut out = Outcome::new(json);
    out.files.push(("verify.txt".into(), text));
    out.failures = failures;
    Ok(out)
}
