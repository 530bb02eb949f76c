//! Acceptance criteria 1-9, one PASS/FAIL line each. Exits non-zero if any
//! criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use hsgeo::flow::{integrate_flow, path_length, VelocityPath};
use hsgeo::geodesic::{ad_transpose, conserved_energy, lie_bracket, named_equation, solve, solve_partial};
use hsgeo::kernels::{bessel_j, bessel_k, convolve_compact, greens_function};
use hsgeo::norms::{equivalence_ratio, inner, metric_at, norm};
use hsgeo::shortpath::{
    alpha_for_strip, build_circle_path, build_line, circle_substeps, fit_length_bound, loglog_slope,
    rotation_defect, shift_integral, time_in_support, vanish_sweep, EpsRule, Family, LineConstruction, SweepTable,
};
use hsgeo::spectral::{apply_multiplier, bump, forward, hilbert, inertia_inverse};
use hsgeo::{Diffeo1D, Field, Grid1D, MetricSpec, NamedEquation, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, Vec<String>), String>;

fn random_smooth(grid: Grid1D, rng: &mut ChaCha8Rng, modes: usize) -> Field {
    let l = grid.length();
    let c: Vec<(f64, f64)> = (0..modes).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    Field::from_fn(grid, |x| {
        let th = 2.0 * PI * x / l;
        c.iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as f64;
                (a * (k * th).cos() + b * (k * th).sin()) / (k * k)
            })
            .sum()
    })
}

fn describe(t: &SweepTable) -> Vec<String> {
    t.rows
        .iter()
        .map(|r| match &r.error {
            Some(e) => format!("param {}: {e}", r.param),
            None => format!(
                "param {}: length {:.6} energy {:.6} endpoint error {:.2e}",
                r.param,
                r.length.unwrap(),
                r.energy.unwrap(),
                r.endpoint_error.unwrap()
            ),
        })
        .collect()
}

fn circle_sweep(s: f64) -> Result<(SweepTable, f64), String> {
    let grid = Grid1D::circle(4096).map_err(|e| e.to_string())?;
    let spec = MetricSpec::hs(s).map_err(|e| e.to_string())?;
    let t0 = Instant::now();
    let table = vanish_sweep(&spec, &Family::Circle { target_shift: 1.0, grid }, &[4.0, 8.0, 16.0, 32.0]);
    Ok((table, t0.elapsed().as_secs_f64()))
}

fn criterion_1() -> Outcome {
    let (t, secs) = circle_sweep(0.5)?;
    let mut notes = describe(&t);
    let energies: Option<Vec<f64>> = t.rows.iter().map(|r| r.energy).collect();
    let errs: Option<Vec<f64>> = t.rows.iter().map(|r| r.endpoint_error).collect();
    let energy_decreasing = energies.as_ref().is_some_and(|e| e.windows(2).all(|w| w[1] < w[0]));
    let pts: Vec<(f64, f64)> =
        t.rows.iter().filter_map(|r| Some(((1.0 / r.param).ln(), r.energy?.ln()))).collect();
    let slope = loglog_slope(&pts).filter(|_| pts.len() == t.rows.len());
    let slope_ok = slope.is_some_and(|s| (0.7..=1.3).contains(&s));
    let length_decreasing = t.strictly_decreasing();
    let errors_ok = errs.is_some_and(|e| e.iter().all(|&v| v < 1e-3));
    notes.push(format!(
        "energy decreasing {energy_decreasing}, slope {slope:?}, length decreasing {length_decreasing}, \
         endpoint errors < 1e-3 {errors_ok}, runtime {secs:.1} s"
    ));
    Ok((energy_decreasing && slope_ok && length_decreasing && errors_ok && secs < 60.0, notes))
}

fn criterion_2() -> Outcome {
    let e = |e: hsgeo::Error| e.to_string();
    let grid = Grid1D::circle(4096).map_err(e)?;
    let (path, c) = build_circle_path(4, 1.0, &grid).map_err(e)?;
    let sub = circle_substeps(&path, &c);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let times: Vec<f64> = (0..64)
        .map(|_| time_in_support(&path, &c, rng.gen_range(0.0..grid.length()), sub))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let mean = times.iter().sum::<f64>() / 64.0;
    let spread = times.iter().map(|t| (t - mean).abs()).fold(0.0, f64::max) / mean;
    let predicted = 2.0 + shift_integral(&c).map_err(e)?;
    let formula = times.iter().map(|t| (t - predicted).abs()).fold(0.0, f64::max);
    let root = (shift_integral(&c).map_err(e)? - 1.0).abs();
    let flow = integrate_flow(&path, sub).map_err(e)?;
    let d = flow.endpoint.displacement();
    let mean_shift = d.iter().sum::<f64>() / d.len() as f64;
    let rigid = rotation_defect(&flow.endpoint).max((mean_shift - 1.0).abs());
    let notes = vec![format!(
        "N=4 lambda*={:.12}: shift-time spread {spread:.2e} (1e-6), |T - (2 + I)| {formula:.2e} (1e-8), \
         |I - 1| {root:.2e} (1e-10), rotation defect {rigid:.2e} (1e-3)",
        c.lambda()
    )];
    Ok((spread < 1e-6 && formula < 1e-8 && root < 1e-10 && rigid < 1e-3, notes))
}

const LINE_N: usize = 16384;
const LINE_L: f64 = 6.0;

fn line_target(n: usize) -> Result<Diffeo1D, String> {
    let g = Grid1D::new(n, LINE_L).map_err(|e| e.to_string())?;
    Diffeo1D::from_fn(g, |x| x + 0.4 * bump((x - 2.5) / 1.5)).map_err(|e| e.to_string())
}

fn criterion_3() -> Outcome {
    let e = |e: hsgeo::Error| e.to_string();
    let target = line_target(LINE_N)?;
    let grid = *target.grid();
    let s = 0.25;
    let deltas: Vec<f64> = (0..5).map(|k| 0.12 / 2f64.powi(k)).collect();
    let alphas: Vec<f64> = deltas.iter().map(|&d| alpha_for_strip(&target, d, &grid)).collect::<Result<_, _>>().map_err(e)?;
    let t0 = Instant::now();
    let spec = MetricSpec::hs(s).map_err(e)?;
    let table = vanish_sweep(&spec, &Family::Line { target: target.clone(), eps: EpsRule::StripFraction(0.08), grid }, &alphas);
    let mut notes = describe(&table);
    let decreasing = table.strictly_decreasing();
    let pts: Vec<(f64, f64)> =
        table.rows.iter().filter_map(|r| Some((r.strip_width?, (r.length? / r.t_end?).powi(2)))).collect();
    let (ds, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
    let fit = fit_length_bound(&ds, &ys, s).ok().filter(|_| pts.len() == deltas.len());
    let fit_ok = fit.is_some_and(|(_, _, r)| r < 0.10);
    // unmollified flow against the piecewise formula
    let mut worst = 0.0f64;
    for &alpha in &alphas {
        let lc = LineConstruction::new(target.clone(), alpha, 2.0 * grid.spacing(), grid).map_err(e)?;
        for i in 0..80 {
            let x = 0.9 + 3.2 * i as f64 / 79.0;
            for k in 0..50 {
                let t = lc.t_end() * k as f64 / 49.0;
                worst = worst.max((lc.explicit_flow(x, t) - lc.sharp_trajectory(x, t)).abs());
            }
        }
    }
    notes.push(format!(
        "lengths strictly decreasing {decreasing}; fit (c1, c2, max rel residual) {fit:?}; \
         three-branch deviation {worst:.2e}; runtime {:.0} s",
        t0.elapsed().as_secs_f64()
    ));
    Ok((decreasing && fit_ok && worst < 1e-6, notes))
}

fn criterion_4() -> Outcome {
    let e = |e: hsgeo::Error| e.to_string();
    let (t, _) = circle_sweep(0.75)?;
    let mut notes = describe(&t);
    let lens: Option<Vec<f64>> = t.rows.iter().map(|r| r.length).collect();
    let no_vanishing = match &lens {
        Some(l) => {
            let (lo, hi) = l.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
            notes.push(format!("min/max length over the sweep {:.4}", lo / hi));
            lo > 0.5 * hi
        }
        None => {
            notes.push("sweep incomplete: the ratio is undefined over the stated N range".into());
            false
        }
    };
    // corpus: circle paths N = 1..8 and smoothed line paths
    let spec = MetricSpec::hs(0.75).map_err(e)?;
    let mut corpus: Vec<(String, VelocityPath, f64)> = Vec::new();
    let cg = Grid1D::circle(4096).map_err(e)?;
    for n in 1..=8 {
        let (path, c) = build_circle_path(n, 1.0, &cg).map_err(e)?;
        let flow = integrate_flow(&path, circle_substeps(&path, &c)).map_err(e)?;
        let sup = flow.endpoint.displacement().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        corpus.push((format!("circle N={n}"), path, sup));
    }
    let target = line_target(4096)?;
    let lg = *target.grid();
    for delta in [0.12, 0.06] {
        let alpha = alpha_for_strip(&target, delta, &lg).map_err(e)?;
        let (path, lc, _) = build_line(&target, alpha, (0.08 * delta).max(2.0 * lg.spacing()), &lg).map_err(e)?;
        let end = lc.endpoint_map().map_err(e)?;
        let sup = end.displacement().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        corpus.push((format!("line delta={delta}"), path, sup));
    }
    let mut min_ratio = f64::INFINITY;
    for (name, path, sup) in &corpus {
        let mut spec = spec;
        if name.starts_with("line") {
            spec = spec.on_line_window(LINE_L).map_err(e)?;
        }
        let r = path_length(&spec, path).map_err(e)? / sup;
        min_ratio = min_ratio.min(r);
    }
    notes.push(format!("min Len/sup-displacement over {} paths: {min_ratio:.4} (> 1e-3)", corpus.len()));
    Ok((no_vanishing && min_ratio > 1e-3, notes))
}

/// `u(t, x) = u0(xi)` where `xi + c t u0(xi) = x`.
fn characteristics(c: f64, t: f64, x: f64) -> f64 {
    let (mut lo, mut hi) = (x - c * t - 1e-9, x + c * t + 1e-9);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m + c * t * m.sin() < x {
            lo = m;
        } else {
            hi = m;
        }
    }
    (0.5 * (lo + hi)).sin()
}

fn drift(eq: NamedEquation, u0: &Field, dt: f64) -> Result<f64, hsgeo::Error> {
    let spec = named_equation(eq);
    let cfg = SolverConfig { dt, t_final: 1.0, snapshot_every: 10, ..SolverConfig::default() };
    let states = solve(&spec, u0, &cfg)?;
    let e0 = conserved_energy(&spec, &states[0])?;
    let mut worst = 0.0f64;
    for st in &states {
        worst = worst.max(((conserved_energy(&spec, st)? - e0) / e0).abs());
    }
    Ok(worst)
}

fn criterion_5() -> Outcome {
    let e = |e: hsgeo::Error| e.to_string();
    let mut notes = Vec::new();
    let grid = Grid1D::circle(1024).map_err(e)?;
    let u0 = Field::from_fn(grid, f64::sin);
    let spec = named_equation(NamedEquation::Burgers);
    let cfg = SolverConfig { dt: 1e-3, t_final: 0.5, ..SolverConfig::default() };
    let run = solve_partial(&spec, &u0, &cfg).map_err(e)?;
    let last = run.states.last().unwrap();
    let err_unit: f64 = grid
        .nodes()
        .iter()
        .zip(last.u.values())
        .map(|(&x, &u)| (u - characteristics(1.0, last.t, x)).abs())
        .fold(0.0, f64::max);
    let burgers_ok = run.halted.is_none() && (last.t - 0.5).abs() < 1e-12 && err_unit < 1e-4;
    notes.push(format!(
        "order-zero equation at t={}: L-inf error vs u0(x - t u) {err_unit:.3e} (1e-4); halted {:?}",
        last.t, run.halted
    ));
    // the equation moves characteristics at speed 3u; check it before breaking
    let cfg3 = SolverConfig { dt: 1e-3, t_final: 0.3, ..SolverConfig::default() };
    let st = solve(&spec, &u0, &cfg3).map_err(e)?;
    let err3 = grid
        .nodes()
        .iter()
        .zip(st.last().unwrap().u.values())
        .map(|(&x, &u)| (u - characteristics(3.0, 0.3, x)).abs())
        .fold(0.0, f64::max);
    notes.push(format!("supplementary: t=0.3 vs u0(x - 3 t u) error {err3:.3e}"));

    let g = Grid1D::circle(256).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let smooth = random_smooth(g, &mut rng, 6).scale(0.5);
    let mut energy_ok = true;
    for eq in [NamedEquation::CamassaHolm, NamedEquation::Mclm] {
        let d1 = drift(eq, &smooth, 0.01).map_err(e)?;
        let d2 = drift(eq, &smooth, 0.005).map_err(e)?;
        let ratio = d1 / d2;
        let ok = d1 < 1e-6 && (12.0..=20.0).contains(&ratio);
        energy_ok &= ok;
        notes.push(format!("{}: drift {d1:.3e} at dt=0.01, {d2:.3e} at dt=0.005, ratio {ratio:.1}", eq.name()));
    }
    Ok((burgers_ok && energy_ok, notes))
}

fn criterion_6() -> Outcome {
    let e = |e: hsgeo::Error| e.to_string();
    let grid = Grid1D::circle(256).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for s in [0.0, 0.5, 1.0] {
        for spec in [MetricSpec::hs(s).map_err(e)?, MetricSpec::hsbar(s).map_err(e)?] {
            let mut w_spec = 0.0f64;
            for _ in 0..20 {
                let u = random_smooth(grid, &mut rng, 10);
                let v = random_smooth(grid, &mut rng, 10);
                let w = random_smooth(grid, &mut rng, 10);
                let lhs = inner(&spec, &u, &lie_bracket(&v, &w).map_err(e)?.scale(-1.0)).map_err(e)?;
                let rhs = inner(&spec, &ad_transpose(&spec, &u, &v).map_err(e)?, &w).map_err(e)?;
                w_spec = w_spec.max((lhs - rhs).abs());
            }
            notes.push(format!("{} s={s}: max |lhs - rhs| {w_spec:.2e}", spec.variant().name()));
            worst = worst.max(w_spec);
        }
    }
    Ok((worst < 1e-8, notes))
}

fn criterion_7() -> Outcome {
    let e = |e: hsgeo::Error| e.to_string();
    let mut notes = Vec::new();
    let grid = Grid1D::new(16384, 40.0).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (a1, a2, p) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..PI));
    let spike = |x: f64| bump(x / 0.2) / 0.2;
    let smooth = move |x: f64| bump(x / 1.5) * (1.0 + a1 * (2.0 * x + p).cos() + a2 * (3.0 * x).sin());
    let inputs: [(&str, &dyn Fn(f64) -> f64, f64); 2] = [("spike", &spike, 0.2), ("smooth", &smooth, 1.5)];
    let mut conv_worst = 0.0f64;
    for s in [0.6, 0.75, 1.0, 1.5] {
        let spec = MetricSpec::hs(s).map_err(e)?;
        let kernel = greens_function(&spec, 1).map_err(e)?;
        for (name, m, half) in inputs {
            let field = Field::from_fn(grid, |x| m(grid.centered(x)));
            let u = apply_multiplier(&inertia_inverse(&spec), &field).map_err(e)?;
            let mut err = 0.0f64;
            for j in (0..grid.n_points()).step_by(256) {
                let x = grid.centered(grid.node(j));
                if x.abs() > 4.0 || x == 0.0 {
                    continue;
                }
                let k = convolve_compact(&kernel, m, (-half, half), x).map_err(e)?;
                err = err.max((k - u.values()[j]).abs());
            }
            notes.push(format!("s={s} {name}: kernel vs multiplier {err:.2e}"));
            conv_worst = conv_worst.max(err);
        }
    }
    let mut closed = 0.0f64;
    for i in 1..=40 {
        let r = 0.25 * i as f64;
        let k = bessel_k(0.5, r).map_err(e)?;
        let j = bessel_j(0.5, r).map_err(e)?;
        closed = closed.max((k - (PI / (2.0 * r)).sqrt() * (-r).exp()).abs());
        closed = closed.max((j - (2.0 / (PI * r)).sqrt() * r.sin()).abs());
    }
    let k1 = greens_function(&MetricSpec::hs(1.0).map_err(e)?, 1).map_err(e)?;
    let mut unit = 0.0f64;
    for i in 1..=40 {
        let r = 0.2 * i as f64;
        unit = unit.max((k1.eval(r).map_err(e)? - 0.5 * (-r).exp()).abs());
    }
    notes.push(format!("K_1/2, J_1/2 closed forms {closed:.2e} (1e-9); s=1 kernel vs exp {unit:.2e}"));
    Ok((conv_worst < 1e-6 && closed < 1e-9 && unit < 1e-9, notes))
}

fn criterion_8() -> Outcome {
    let e = |e: hsgeo::Error| e.to_string();
    let mut notes = Vec::new();
    let grid = Grid1D::circle(512).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let raw = Field::new(grid, (0..512).map(|_| rng.gen_range(-1.0..1.0)).collect()).map_err(e)?;
    let phys: f64 = raw.values().iter().map(|v| v * v).sum();
    let spec_sum: f64 = forward(&raw).coeffs().iter().map(|c| c.norm_sqr()).sum();
    let parseval = (phys - spec_sum).abs() / phys;

    let f = random_smooth(grid, &mut rng, 20).map(|v| v + 0.7);
    let hh = hilbert(&hilbert(&f));
    let mean = f.mean();
    let inv = hh.values().iter().zip(f.values()).map(|(a, b)| (a + b - mean).abs()).fold(0.0, f64::max);

    let samples: Vec<Field> = (0..20).map(|_| random_smooth(grid, &mut rng, 16)).collect();
    let (lo, hi) = equivalence_ratio(1.0, &samples).map_err(e)?;
    let equiv_ok = lo >= 0.5f64.sqrt() && hi <= 2f64.sqrt();

    let g2 = Grid1D::circle(2048).map_err(e)?;
    let spec = MetricSpec::hs(1.0).map_err(e)?;
    let phi_fn = |x: f64| x + 0.25 * x.sin() + 0.4;
    let phi = Diffeo1D::from_fn(g2, phi_fn).map_err(e)?;
    let (xs, ys) = (random_smooth(g2, &mut rng, 6), random_smooth(g2, &mut rng, 6));
    let xc = xs.clone();
    let yc = ys.clone();
    // analytic composition through the band-limited interpolant
    let eval = |f: &Field, x: f64| -> f64 {
        let c = forward(f);
        let g = f.grid();
        let n = g.n_points() as f64;
        c.coeffs()
            .iter()
            .enumerate()
            .filter(|(k, _)| g.mode(*k).unsigned_abs() < g.n_points() as u64 / 2)
            .map(|(k, z)| (z * num_complex::Complex64::from_polar(1.0, g.wavenumber(k) * x)).re)
            .sum::<f64>()
            / n.sqrt()
    };
    let xphi = Field::from_fn(g2, |t| eval(&xc, phi_fn(t)));
    let yphi = Field::from_fn(g2, |t| eval(&yc, phi_fn(t)));
    let lhs = metric_at(&spec, &phi, &xphi, &yphi).map_err(e)?;
    let rhs = inner(&spec, &xs, &ys).map_err(e)?;
    let invariance = (lhs - rhs).abs() / rhs.abs().max(1.0);

    // dilation of a zero-mean profile on a wide window
    let wide = Grid1D::new(8192, 64.0).map_err(e)?;
    let mut dil_ok = true;
    let mut dil = Vec::new();
    for s in [0.25, 0.75, 1.0] {
        let hspec = MetricSpec::homogeneous(s).map_err(e)?;
        let pts: Vec<(f64, f64)> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&lam: &f64| {
                let f = Field::from_fn(wide, |x| {
                    let y = wide.centered(x) / lam;
                    y * bump(y)
                });
                let f = f.map(|v| v);
                Ok((lam.ln(), norm(&hspec, &f)?.powi(2).ln()))
            })
            .collect::<Result<_, hsgeo::Error>>()
            .map_err(e)?;
        let slope = loglog_slope(&pts).unwrap();
        let want = 1.0 - 2.0 * s;
        dil_ok &= (slope - want).abs() <= 0.01 * want.abs();
        dil.push(format!("s={s}: {slope:.5} vs {want}"));
    }
    notes.push(format!(
        "Parseval {parseval:.2e} (1e-12); H^2 + (id - mean) {inv:.2e} (1e-10); H^1/Hbar^1 ratio in \
         [{lo:.4}, {hi:.4}]; right invariance {invariance:.2e} (1e-6)"
    ));
    notes.push(format!("dilation exponents {}", dil.join(", ")));
    Ok((parseval < 1e-12 && inv < 1e-10 && equiv_ok && invariance < 1e-6 && dil_ok, notes))
}

fn criterion_9() -> Outcome {
    let dir = std::env::temp_dir().join(format!("hsgeo-acceptance-{}", std::process::id()));
    let run = |sub: &str| {
        let out_dir = dir.join(sub);
        Command::new(env!("CARGO_BIN_EXE_hsgeo"))
            .args(["verify", "--seed", "42", "--out"])
            .arg(&out_dir)
            .output()
            .map(|o| (o, out_dir))
            .map_err(|e| e.to_string())
    };
    let (a, da) = run("a")?;
    let (b, db) = run("b")?;
    let files = |d: &std::path::Path| {
        ["verify.json", "verify.txt"].map(|f| std::fs::read(d.join(f)).unwrap_or_default())
    };
    let same_files = files(&da) == files(&db);
    let _ = std::fs::remove_dir_all(&dir);
    let ok = a.status.code() == Some(0)
        && b.status.code() == Some(0)
        && a.stdout == b.stdout
        && a.stderr == b.stderr
        && same_files;
    Ok((ok, vec![format!(
        "exit codes {:?} {:?}; stdout identical {}; files identical {same_files}",
        a.status.code(),
        b.status.code(),
        a.stdout == b.stdout
    )]))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("vanishing witness on the circle, s = 1/2", criterion_1),
        ("circle construction mechanics", criterion_2),
        ("line construction, s = 1/4", criterion_3),
        ("positivity contrast, s = 3/4", criterion_4),
        ("geodesic reductions", criterion_5),
        ("weak-form identity", criterion_6),
        ("kernel consistency", criterion_7),
        ("norm machinery", criterion_8),
        ("determinism of verify", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let (ok, notes) = match run() {
            Ok(r) => r,
            Err(msg) => (false, vec![format!("error: {msg}")]),
        };
        println!(
            "criterion {id}: {} - {name} ({:.1} s)",
            if ok { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64()
        );
        for n in notes {
            println!("    {n}");
        }
        if !ok {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {}", failed.join(", "));
        std::process::exit(1);
    }
}
