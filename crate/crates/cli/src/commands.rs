//! `norm`, `vanish`, `geodesic` and `kernel` subcommands.

use std::f64::consts::PI;
use std::path::PathBuf;

use hsgeo::geodesic::{conserved_energy, named_equation, solve_partial};
use hsgeo::kernels::{greens_function, KernelForm};
use hsgeo::norms::norm;
use hsgeo::shortpath::{
    alpha_for_strip, fit_length_bound, multiscale_function, vanish_sweep, EpsRule, Family, SweepTable,
};
use hsgeo::spectral::{bump, derivative};
use hsgeo::{Diffeo1D, Field, Grid1D, MetricSpec, NamedEquation, SolverConfig, Variant};
use serde_json::Value;

use crate::config::{config_err, CliResult, Config};
use crate::fields::{read_csv_field, sample, velocity_profile, Profile};
use crate::report::{fmt_float, num, object, opt, Csv};

/// What a command produced: the JSON summary, data files for `--out`, and
/// the names of failed checks (verify only).
pub struct Outcome {
    pub json: Value,
    pub files: Vec<(String, String)>,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn new(json: Value) -> Self {
        Outcome { json, files: Vec::new(), failures: Vec::new() }
    }
}

/// Keys every command accepts.
pub const COMMON_KEYS: [&str; 6] = ["grid_n", "period", "s", "variant", "out", "seed"];

pub fn allowed(extra: &[&'static str]) -> Vec<&'static str> {
    COMMON_KEYS.iter().chain(extra).copied().collect()
}

pub fn out_dir(cfg: &Config) -> Option<PathBuf> {
    cfg.raw("out").map(PathBuf::from)
}

fn spec_from(cfg: &Config, default_s: Option<f64>) -> CliResult<MetricSpec> {
    let s = match default_s {
        Some(d) => cfg.get_or("s", d)?,
        None => cfg.require("s")?,
    };
    let variant: Variant = cfg.get_or("variant", Variant::Hs)?;
    Ok(MetricSpec::new(s, variant)?)
}

fn grid_from(cfg: &Config, n: usize, period: f64) -> CliResult<Grid1D> {
    Ok(Grid1D::new(cfg.get_or("grid_n", n)?, cfg.get_or("period", period)?)?)
}

pub fn cmd_norm(cfg: &Config) -> CliResult<Outcome> {
    cfg.check_keys(&allowed(&["preset", "k", "scales", "input"]))?;
    let spec = spec_from(cfg, None)?;
    let (field, source) = match cfg.raw("input") {
        Some(path) => (read_csv_field(path.as_ref(), cfg.get("period")?)?, "csv".to_string()),
        None => {
            let grid = grid_from(cfg, 1024, 2.0 * PI)?;
            let preset = cfg.raw("preset").unwrap_or("cosine");
            let l = grid.length();
            let f = match preset {
                "cosine" => {
                    let k: f64 = cfg.get_or("k", 1.0)?;
                    Field::from_fn(grid, |x| (2.0 * PI * k * x / l).cos())
                }
                "bump" => Field::from_fn(grid, |x| bump(grid.centered(x))),
                "multiscale" => multiscale_function(cfg.require("scales")?, &grid)?,
                other => return Err(config_err(format!("unknown preset '{other}' (cosine, bump, multiscale)"))),
            };
            (f, preset.to_string())
        }
    };
    let value = norm(&spec, &field)?;
    Ok(Outcome::new(object([
        ("s", num(spec.s())),
        ("variant", spec.variant().name().into()),
        ("value", num(value)),
        ("source", source.into()),
        ("grid_n", field.grid().n_points().into()),
        ("period", num(field.grid().length())),
    ])))
}

/// Target of the line family: `x + amplitude * bump((x - center) / width)`.
fn line_target(cfg: &Config, grid: Grid1D) -> CliResult<Diffeo1D> {
    let amp: f64 = cfg.get_or("amplitude", 0.4)?;
    let center: f64 = cfg.get_or("center", 2.5)?;
    let width: f64 = cfg.get_or("width", 1.5)?;
    if !(width > 0.0) {
        return Err(config_err("width must be positive"));
    }
    Ok(Diffeo1D::from_fn(grid, |x| x + amp * bump((x - center) / width))?)
}

fn sweep_csv(table: &SweepTable) -> String {
    let mut csv = Csv::new(&["param", "s", "variant", "length", "energy", "endpoint_error", "t_end", "strip_width", "error"]);
    let o = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    for r in &table.rows {
        csv.row(&[
            fmt_float(r.param),
            fmt_float(table.s),
            table.variant.name().to_string(),
            o(r.length),
            o(r.energy),
            o(r.endpoint_error),
            o(r.t_end),
            o(r.strip_width),
            r.error.clone().unwrap_or_default().replace(',', ";"),
        ]);
    }
    csv.as_str().to_string()
}

pub fn cmd_vanish(cfg: &Config) -> CliResult<Outcome> {
    cfg.check_keys(&allowed(&[
        "family", "params", "deltas", "shift", "amplitude", "center", "width", "eps_ratio", "eps",
    ]))?;
    let family = cfg.raw("family").unwrap_or("circle");
    let table = match family {
        "circle" => {
            let spec = spec_from(cfg, Some(0.5))?;
            let params: Vec<f64> = cfg.list("params")?.ok_or_else(|| config_err("missing params (scale counts N)"))?;
            if params.is_empty() {
                return Err(config_err("params list is empty"));
            }
            let grid = grid_from(cfg, 4096, 2.0 * PI)?;
            let target_shift = cfg.get_or("shift", 1.0)?;
            vanish_sweep(&spec, &Family::Circle { target_shift, grid }, &params)
        }
        "line" => {
            let spec = spec_from(cfg, Some(0.25))?;
            let grid = grid_from(cfg, 16384, 6.0)?;
            let target = line_target(cfg, grid)?;
            let eps = match cfg.get::<f64>("eps")? {
                Some(e) => EpsRule::Fixed(e),
                None => EpsRule::StripFraction(cfg.get_or("eps_ratio", 0.08)?),
            };
            let params: Vec<f64> = match (cfg.list::<f64>("params")?, cfg.list::<f64>("deltas")?) {
                (Some(p), None) => p,
                (None, Some(d)) => d.iter().map(|&d| alpha_for_strip(&target, d, &grid)).collect::<Result<_, _>>()?,
                (Some(_), Some(_)) => return Err(config_err("give either params (angles) or deltas, not both")),
                (None, None) => return Err(config_err("missing params (angles) or deltas (strip widths)")),
            };
            if params.is_empty() {
                return Err(config_err("params list is empty"));
            }
            vanish_sweep(&spec, &Family::Line { target, eps, grid }, &params)
        }
        other => return Err(config_err(format!("unknown family '{other}' (circle, line)"))),
    };
    let decreasing = table.strictly_decreasing();
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            object([
                ("param", num(r.param)),
                ("length", opt(r.length)),
                ("energy", opt(r.energy)),
                ("endpoint_error", opt(r.endpoint_error)),
                ("t_end", opt(r.t_end)),
                ("strip_width", opt(r.strip_width)),
                ("error", r.error.clone().map(Value::from).unwrap_or(Value::Null)),
            ])
        })
        .collect();
    let fit = if table.family == "line" {
        let pts: Vec<(f64, f64)> = table
            .rows
            .iter()
            .filter_map(|r| Some((r.strip_width?, (r.length? / r.t_end?).powi(2))))
            .collect();
        let (d, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        match fit_length_bound(&d, &y, table.s) {
            Ok((c1, c2, res)) => object([("c1", num(c1)), ("c2", num(c2)), ("max_rel_residual", num(res))]),
            Err(_) => Value::Null,
        }
    } else {
        Value::Null
    };
    let json = object([
        ("family", table.family.into()),
        ("s", num(table.s)),
        ("variant", table.variant.name().into()),
        ("verdict", if decreasing { "decreasing" } else { "not decreasing" }.into()),
        ("slope", opt(table.slope())),
        ("fit", fit),
        ("rows", Value::Array(rows)),
    ]);
    let mut out = Outcome::new(json);
    out.files.push(("vanish.csv".into(), sweep_csv(&table)));
    Ok(out)
}

/// Speed of characteristics for the order-zero equation `u_t + 3 u u_x = 0`.
pub const BURGERS_SPEED: f64 = 3.0;

/// `u(t, x) = u0(xi)` with `xi + c t u0(xi) = x`, by bisection; valid
/// before characteristics cross.
pub fn characteristics_solution(u0: &Profile, bound: f64, c: f64, t: f64, x: f64) -> f64 {
    let (mut lo, mut hi) = (x - c * t * bound - 1e-12, x + c * t * bound + 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid + c * t * u0(mid) < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    u0(0.5 * (lo + hi))
}

pub fn cmd_geodesic(cfg: &Config) -> CliResult<Outcome> {
    cfg.check_keys(&allowed(&[
        "equation", "u0", "amplitude", "modes", "dt", "t_final", "snapshot_every", "dealias",
    ]))?;
    let equation: Option<NamedEquation> = cfg.get("equation")?;
    let spec = match equation {
        Some(e) => {
            if cfg.raw("s").is_some() || cfg.raw("variant").is_some() {
                return Err(config_err("equation fixes s and variant; drop one of them"));
            }
            named_equation(e)
        }
        None => spec_from(cfg, None)?,
    };
    let grid = grid_from(cfg, 256, 2.0 * PI)?;
    let preset = cfg.raw("u0").unwrap_or("sin").to_string();
    let amplitude: f64 = cfg.get_or("amplitude", 1.0)?;
    let seed: u64 = cfg.get_or("seed", 0)?;
    let u0 = velocity_profile(&preset, amplitude, grid.length(), seed, cfg.get_or("modes", 6)?)?;
    let defaults = SolverConfig::default();
    let config = SolverConfig {
        dt: cfg.get_or("dt", defaults.dt)?,
        t_final: cfg.get_or("t_final", defaults.t_final)?,
        dealias: cfg.get_or("dealias", defaults.dealias)?,
        snapshot_every: cfg.get_or("snapshot_every", defaults.snapshot_every)?,
    };
    let field = sample(grid, &u0);
    let run = solve_partial(&spec, &field, &config)?;
    let energies: Vec<f64> = run.states.iter().map(|st| conserved_energy(&spec, st)).collect::<Result<_, _>>()?;
    let e0 = energies[0];
    let drift = energies.iter().map(|e| ((e - e0) / e0).abs()).fold(0.0, f64::max);
    let last = run.states.last().expect("initial state is stored");

    let (characteristics_error, breaking_time) = if equation == Some(NamedEquation::Burgers) {
        let slope = derivative(&field).values().iter().fold(0.0_f64, |a, v| a.max(-v));
        let tb = if slope > 0.0 { 1.0 / (BURGERS_SPEED * slope) } else { f64::INFINITY };
        let err = (last.t < tb).then(|| {
            let bound = field.max_abs();
            grid.nodes()
                .iter()
                .zip(last.u.values())
                .map(|(&x, &u)| (u - characteristics_solution(&u0, bound, BURGERS_SPEED, last.t, x)).abs())
                .fold(0.0, f64::max)
        });
        (opt(err), num(tb))
    } else {
        (Value::Null, Value::Null)
    };

    let mut csv = Csv::new(&["t", "x", "u", "m"]);
    for st in &run.states {
        for (j, x) in grid.nodes().iter().enumerate() {
            csv.row(&[fmt_float(st.t), fmt_float(*x), fmt_float(st.u.values()[j]), fmt_float(st.m.values()[j])]);
        }
    }
    let snapshots: Vec<Value> = run
        .states
        .iter()
        .zip(&energies)
        .map(|(st, e)| object([("t", num(st.t)), ("energy", num(*e)), ("max_abs_u", num(st.u.max_abs()))]))
        .collect();
    let (stopped_at, reason) = match &run.halted {
        Some(e) => (num(last.t), Value::from(e.to_string())),
        None => (Value::Null, Value::Null),
    };
    let json = object([
        ("equation", equation.map(|e| Value::from(e.name())).unwrap_or(Value::Null)),
        ("s", num(spec.s())),
        ("variant", spec.variant().name().into()),
        ("grid_n", grid.n_points().into()),
        ("period", num(grid.length())),
        ("u0", preset.into()),
        ("dt", num(config.dt)),
        ("t_final", num(config.t_final)),
        ("t_reached", num(last.t)),
        ("energy_initial", num(e0)),
        ("energy_final", num(*energies.last().expect("non-empty"))),
        ("energy_drift", num(drift)),
        ("characteristics_error", characteristics_error),
        ("breaking_time", breaking_time),
        ("stopped_at", stopped_at),
        ("stop_reason", reason),
        ("snapshots", Value::Array(snapshots)),
    ]);
    let mut out = Outcome::new(json);
    out.files.push(("geodesic.csv".into(), csv.as_str().to_string()));
    Ok(out)
}

pub fn cmd_kernel(cfg: &Config) -> CliResult<Outcome> {
    cfg.check_keys(&allowed(&["dimension", "r", "r_min", "r_max", "points", "form"]))?;
    let spec = spec_from(cfg, None)?;
    let n: usize = cfg.get_or("dimension", 1)?;
    let mut kernel = greens_function(&spec, n)?;
    match cfg.raw("form") {
        None | Some("auto") => {}
        Some("oscillatory") => kernel = kernel.oscillatory(),
        Some(other) => return Err(config_err(format!("unknown form '{other}' (auto, oscillatory)"))),
    }
    let rs: Vec<f64> = match cfg.list::<f64>("r")? {
        Some(r) => r,
        None => {
            let (a, b): (f64, f64) = (cfg.get_or("r_min", 0.1)?, cfg.get_or("r_max", 10.0)?);
            let p: usize = cfg.get_or("points", 100)?;
            if !(a > 0.0 && b >= a) || p == 0 {
                return Err(config_err("need 0 < r_min <= r_max and points >= 1"));
            }
            (0..p).map(|i| if p == 1 { a } else { a + (b - a) * i as f64 / (p - 1) as f64 }).collect()
        }
    };
    let values: Vec<f64> = rs.iter().map(|&r| kernel.eval(r)).collect::<Result<_, _>>()?;
    let mut csv = Csv::new(&["r", "value"]);
    for (r, v) in rs.iter().zip(&values) {
        csv.row(&[fmt_float(*r), fmt_float(*v)]);
    }
    let json = object([
        ("s", num(spec.s())),
        ("variant", spec.variant().name().into()),
        ("dimension", n.into()),
        (
            "form",
            match kernel.form() {
                KernelForm::BesselK => "bessel-k",
                KernelForm::OscillatoryIntegral => "oscillatory-integral",
            }
            .into(),
        ),
        ("r", Value::Array(rs.iter().map(|&r| num(r)).collect())),
        ("values", Value::Array(values.iter().map(|&v| num(v)).collect())),
    ]);
    let mut out = Outcome::new(json);
    out.files.push(("kernel.csv".into(), csv.as_str().to_string()));
    Ok(out)
}
