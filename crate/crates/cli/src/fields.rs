//! Named initial data and input fields.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use hsgeo::spectral::bump;
use hsgeo::{Field, Grid1D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{config_err, CliResult};

pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Smooth random profile `sum_{k<=modes} (a_k cos + b_k sin)(k theta) / k^2`
/// with `theta = 2 pi x / period`; zero mean.
pub fn random_profile(seed: u64, modes: usize, period: f64) -> Profile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64)> = (0..modes).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    Arc::new(move |x| {
        let th = 2.0 * PI * x / period;
        coeffs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as f64;
                (a * (k * th).cos() + b * (k * th).sin()) / (k * k)
            })
            .sum()
    })
}

/// Initial velocity presets: `sin`, `bump` (nonzero mean) and `random`.
pub fn velocity_profile(name: &str, amplitude: f64, period: f64, seed: u64, modes: usize) -> CliResult<Profile> {
    let base: Profile = match name {
        "sin" => Arc::new(move |x| (2.0 * PI * x / period).sin()),
        "cos" => Arc::new(move |x| (2.0 * PI * x / period).cos()),
        "bump" => Arc::new(move |x| bump((x - 0.5 * period) / (0.25 * period))),
        "random" => random_profile(seed, modes, period),
        other => return Err(config_err(format!("unknown u0 preset '{other}' (sin, cos, bump, random)"))),
    };
    Ok(Arc::new(move |x| amplitude * base(x)))
}

/// Reads `x,value` rows on uniformly spaced nodes. A non-numeric first line
/// is taken as a header. The period defaults to `n` times the spacing.
pub fn read_csv_field(path: &Path, period: Option<f64>) -> CliResult<Field> {
    let text =
        std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = (cells.len() == 2)
            .then(|| Some((cells[0].parse::<f64>().ok()?, cells[1].parse::<f64>().ok()?)))
            .flatten();
        match parsed {
            Some((x, v)) if x.is_finite() && v.is_finite() => {
                xs.push(x);
                vs.push(v);
            }
            _ if i == 0 && xs.is_empty() => continue,
            _ => return Err(config_err(format!("{}: malformed row {}: '{line}'", path.display(), i + 1))),
        }
    }
    if xs.len() < 2 {
        return Err(config_err(format!("{}: need at least two rows", path.display())));
    }
    let h = xs[1] - xs[0];
    if !(h > 0.0) {
        return Err(config_err("x column must increase"));
    }
    for (j, x) in xs.iter().enumerate() {
        if (x - (xs[0] + j as f64 * h)).abs() > 1e-9 * h.max(x.abs()) {
            return Err(config_err(format!("x column is not uniformly spaced at row {}", j + 1)));
        }
    }
    let n = xs.len();
    let grid = Grid1D::new(n, period.unwrap_or(n as f64 * h))?;
    if (grid.spacing() - h).abs() > 1e-9 * h {
        return Err(config_err(format!("period {} does not match spacing {h} of {n} rows", grid.length())));
    }
    Ok(Field::new(grid, vs)?)
}

/// Samples `f` at the grid nodes.
pub fn sample(grid: Grid1D, f: &Profile) -> Field {
    Field::from_fn(grid, |x| f(x))
}
