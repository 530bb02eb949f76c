//! Sobolev norms of grid fields and the right-invariant metric on sampled
//! diffeomorphisms.
//!
//! Norms carry the grid spacing as quadrature weight,
//! `||f||^2 = (L/n) sum_k sigma(xi_k) |c_k|^2`, so they approximate the
//! continuum norms and are independent of resolution.

use crate::error::{Error, Result};
use crate::interp::{fd4_slopes, hermite, limit_monotone, PeriodicCubic};
use crate::spectral::{self, forward, Field, Grid1D, ZERO_MEAN_TOL};

/// Which family of Sobolev norms is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Symbol `(1 + xi^2)^s`.
    Hs,
    /// Symbol `1 + |xi|^{2s}`.
    HsBar,
    /// Symbol `|xi|^{2s}`, defined on zero-mean fields.
    Homogeneous,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Hs => "hs",
            Variant::HsBar => "hsbar",
            Variant::Homogeneous => "homogeneous",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hs" => Ok(Variant::Hs),
            "hsbar" => Ok(Variant::HsBar),
            "homogeneous" => Ok(Variant::Homogeneous),
            other => Err(Error::invalid(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Circle,
    /// Periodic window of the given length standing in for the real line.
    LineWindow(f64),
}

/// Order and variant of a Sobolev metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSpec {
    s: f64,
    variant: Variant,
    domain: Domain,
}

impl MetricSpec {
    pub fn new(s: f64, variant: Variant) -> Result<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::invalid(format!("Sobolev order must be finite and >= 0, got {s}")));
        }
        if variant == Variant::Homogeneous && s == 0.0 {
            return Err(Error::invalid("homogeneous metric needs s > 0"));
        }
        Ok(MetricSpec { s, variant, domain: Domain::Circle })
    }

    pub fn hs(s: f64) -> Result<Self> {
        Self::new(s, Variant::Hs)
    }

    pub fn hsbar(s: f64) -> Result<Self> {
        Self::new(s, Variant::HsBar)
    }

    pub fn homogeneous(s: f64) -> Result<Self> {
        Self::new(s, Variant::Homogeneous)
    }

    pub fn on_line_window(mut self, length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid("line window length must be positive"));
        }
        self.domain = Domain::LineWindow(length);
        Ok(self)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Norm symbol at wavenumber `xi` (the squared weight).
    pub fn symbol(&self, xi: f64) -> f64 {
        match self.variant {
            Variant::Hs => (1.0 + xi * xi).powf(self.s),
            Variant::HsBar => spectral::hsbar_symbol(self.s, xi),
            Variant::Homogeneous => {
                if xi == 0.0 {
                    0.0
                } else {
                    xi.abs().powf(2.0 * self.s)
                }
            }
        }
    }

    fn check(&self, f: &Field) -> Result<()> {
        if let Domain::LineWindow(l) = self.domain {
            if (l - f.grid().length()).abs() > 1e-12 * l {
                return Err(Error::GridMismatch);
            }
        }
        if self.variant == Variant::Homogeneous {
            let mean = f.mean();
            if mean.abs() > ZERO_MEAN_TOL {
                return Err(Error::HomogeneousNonzeroMean { mean });
            }
        }
        Ok(())
    }
}

/// `<f, g>` in the metric `spec`.
pub fn inner(spec: &MetricSpec, f: &Field, g: &Field) -> Result<f64> {
    f.check_grid(g)?;
    spec.check(f)?;
    spec.check(g)?;
    let grid = f.grid();
    let (cf, cg) = (forward(f), forward(g));
    let sum: f64 = cf
        .coeffs()
        .iter()
        .zip(cg.coeffs())
        .enumerate()
        .map(|(k, (a, b))| spec.symbol(grid.wavenumber(k)) * (a * b.conj()).re)
        .sum();
    Ok(sum * grid.spacing())
}

pub fn norm(spec: &MetricSpec, f: &Field) -> Result<f64> {
    spec.check(f)?;
    let grid = f.grid();
    let sum: f64 = forward(f)
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| spec.symbol(grid.wavenumber(k)) * c.norm_sqr())
        .sum();
    Ok((sum * grid.spacing()).sqrt())
}

/// A sampled orientation-preserving diffeomorphism of the circle (or of a
/// line window, equal to the identity near its ends).
///
/// Stored as the periodic displacement `d = phi - id`; between nodes `phi`
/// is a monotone cubic Hermite interpolant.
#[derive(Debug, Clone)]
pub struct Diffeo1D {
    grid: Grid1D,
    disp: Vec<f64>,
    slopes: Vec<f64>,
}

impl Diffeo1D {
    pub fn identity(grid: Grid1D) -> Self {
        Self::from_displacement(grid, vec![0.0; grid.n_points()]).expect("identity is invertible")
    }

    /// From periodic displacement samples `phi(x_j) - x_j`.
    pub fn from_displacement(grid: Grid1D, disp: Vec<f64>) -> Result<Self> {
        let n = grid.n_points();
        if disp.len() != n {
            return Err(Error::invalid("displacement length does not match the grid"));
        }
        if disp.iter().any(|d| !d.is_finite()) {
            return Err(Error::invalid("non-finite displacement"));
        }
        let h = grid.spacing();
        let secants: Vec<f64> = (0..n).map(|j| 1.0 + (disp[(j + 1) % n] - disp[j]) / h).collect();
        if let Some((node, &slope)) = secants.iter().enumerate().find(|(_, s)| **s <= 0.0) {
            return Err(Error::NonInvertibleDiffeo { node, slope });
        }
        let mut slopes: Vec<f64> = fd4_slopes(&disp, h).into_iter().map(|d| 1.0 + d).collect();
        limit_monotone(&mut slopes, &secants);
        Ok(Diffeo1D { grid, disp, slopes })
    }

    /// From values `phi(x_j)` in the universal cover.
    pub fn from_values(grid: Grid1D, values: &[f64]) -> Result<Self> {
        let disp = values.iter().enumerate().map(|(j, v)| v - grid.node(j)).collect();
        Self::from_displacement(grid, disp)
    }

    /// Samples `phi` at the nodes; `phi(x) - x` must be periodic.
    pub fn from_fn(grid: Grid1D, phi: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<f64> = grid.nodes().into_iter().map(phi).collect();
        Self::from_values(grid, &values)
    }

    /// Rigid rotation `x -> x + c`.
    pub fn shift(grid: Grid1D, c: f64) -> Self {
        Self::from_displacement(grid, vec![c; grid.n_points()]).expect("rotations are invertible")
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn displacement(&self) -> &[f64] {
        &self.disp
    }

    pub fn values(&self) -> Vec<f64> {
        self.disp.iter().enumerate().map(|(j, d)| self.grid.node(j) + d).collect()
    }

    fn node_value(&self, j: usize) -> f64 {
        let n = self.grid.n_points();
        if j == n {
            self.grid.length() + self.disp[0]
        } else {
            self.grid.node(j) + self.disp[j]
        }
    }

    fn cell(&self, j: usize, t: f64) -> f64 {
        let h = self.grid.spacing();
        let n = self.grid.n_points();
        hermite(
            self.node_value(j),
            self.node_value(j + 1),
            self.slopes[j] * h,
            self.slopes[(j + 1) % n] * h,
            t,
        )
    }

    /// `phi(x)` for any real `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let l = self.grid.length();
        let h = self.grid.spacing();
        let wraps = (x / l).floor();
        let r = x - wraps * l;
        let pos = r / h;
        let j = (pos.floor() as usize).min(self.grid.n_points() - 1);
        wraps * l + self.cell(j, (pos - j as f64).clamp(0.0, 1.0))
    }

    /// `phi^{-1}(y)` as `(wraps, cell, t)`, i.e. the point
    /// `wraps * L + x_cell + t h`.
    pub fn inverse_cell(&self, y: f64) -> (f64, usize, f64) {
        let n = self.grid.n_points();
        let l = self.grid.length();
        let base = self.node_value(0);
        let wraps = ((y - base) / l).floor();
        let mut yr = y - wraps * l;
        if yr >= base + l {
            yr = base + l;
        }
        // largest j with phi_j <= yr
        let (mut lo, mut hi) = (0usize, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.node_value(mid) <= yr {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let j = lo;
        if self.node_value(j) == yr {
            return (wraps, j, 0.0);
        }
        let (mut a, mut b) = (0.0f64, 1.0f64);
        while b - a > 1e-13 {
            let m = 0.5 * (a + b);
            if self.cell(j, m) <= yr {
                a = m;
            } else {
                b = m;
            }
        }
        (wraps, j, 0.5 * (a + b))
    }

    pub fn inverse(&self, y: f64) -> f64 {
        let (w, j, t) = self.inverse_cell(y);
        w * self.grid.length() + self.grid.node(j) + t * self.grid.spacing()
    }

    /// `self o other`, sampled at the nodes.
    pub fn compose(&self, other: &Diffeo1D) -> Result<Diffeo1D> {
        if !self.grid.same(&other.grid) {
            return Err(Error::GridMismatch);
        }
        let values: Vec<f64> = other.values().into_iter().map(|y| self.eval(y)).collect();
        Diffeo1D::from_values(self.grid, &values)
    }

    /// Nodal values of `phi^{-1}`.
    pub fn inverse_values(&self) -> Vec<f64> {
        self.grid.nodes().into_iter().map(|x| self.inverse(x)).collect()
    }

    /// `X o phi^{-1}` at the nodes, with `X` interpolated smoothly.
    pub fn pull_back(&self, x: &Field) -> Result<Field> {
        if !self.grid.same(x.grid()) {
            return Err(Error::GridMismatch);
        }
        let pc = PeriodicCubic::new(x.values(), self.grid.length());
        let vals = (0..self.grid.n_points())
            .map(|i| {
                let (_, j, t) = self.inverse_cell(self.grid.node(i));
                pc.eval_cell(j, t)
            })
            .collect();
        Ok(Field::from_raw(self.grid, vals))
    }
}

/// `f o phi` at the nodes, with `f` interpolated smoothly.
pub fn compose_field(f: &Field, phi: &Diffeo1D) -> Result<Field> {
    if !f.grid().same(phi.grid()) {
        return Err(Error::GridMismatch);
    }
    let pc = PeriodicCubic::new(f.values(), f.grid().length());
    Ok(Field::from_raw(*f.grid(), phi.values().into_iter().map(|y| pc.eval(y)).collect()))
}

/// Right-invariant metric `G_phi(X, Y) = <X o phi^{-1}, Y o phi^{-1}>`.
pub fn metric_at(spec: &MetricSpec, phi: &Diffeo1D, x: &Field, y: &Field) -> Result<f64> {
    let xp = phi.pull_back(x)?;
    let yp = phi.pull_back(y)?;
    inner(spec, &xp, &yp)
}

/// `(min, max)` of `||f||_{H^s} / ||f||_{Hbar^s}` over the samples.
pub fn equivalence_ratio(s: f64, samples: &[Field]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let (hs, hb) = (MetricSpec::hs(s)?, MetricSpec::hsbar(s)?);
    ratio_range(samples, |f| Ok((norm(&hs, f)?, norm(&hb, f)?)))
}

fn ratio_range(samples: &[Field], pair: impl Fn(&Field) -> Result<(f64, f64)>) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for f in samples {
        let (num, den) = pair(f)?;
        if den == 0.0 {
            return Err(Error::invalid("sample field has zero norm"));
        }
        let r = num / den;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

/// Largest observed `||g f||_{H^s} / ||f||_{H^s}`.
pub fn multiplication_bound_probe(s: f64, g: &Field, samples: &[Field]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let spec = MetricSpec::hs(s)?;
    let (_, hi) = ratio_range(samples, |f| {
        let gf = g.zip_with(f, |a, b| a * b)?;
        Ok((norm(&spec, &gf)?, norm(&spec, f)?))
    })?;
    Ok(hi)
}

/// `(min, max)` of `||f o phi||_{H^s} / ||f||_{H^s}`.
pub fn composition_bound_probe(s: f64, phi: &Diffeo1D, samples: &[Field]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let spec = MetricSpec::hs(s)?;
    ratio_range(samples, |f| Ok((norm(&spec, &compose_field(f, phi)?)?, norm(&spec, f)?)))
}
