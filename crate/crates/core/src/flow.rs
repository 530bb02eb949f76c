//! Flows of time-dependent vector fields and the length and energy of
//! velocity paths.

use crate::error::{Error, Result};
use crate::interp::PeriodicCubic;
use crate::norms::{norm, Diffeo1D, MetricSpec};
use crate::spectral::{Field, Grid1D};
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

/// Exact velocity `(t, x) -> u(t, x)` backing a sampled path.
pub type Generator = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Right-trivialized velocity `u(t_k, .)` sampled at increasing times.
#[derive(Clone)]
pub struct VelocityPath {
    grid: Grid1D,
    times: Vec<f64>,
    frames: Vec<Field>,
    label: String,
    generator: Option<Generator>,
}

impl fmt::Debug for VelocityPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VelocityPath")
            .field("label", &self.label)
            .field("grid", &self.grid)
            .field("frames", &self.frames.len())
            .field("t_end", &self.duration())
            .field("analytic", &self.generator.is_some())
            .finish()
    }
}

impl VelocityPath {
    pub fn new(grid: Grid1D, times: Vec<f64>, frames: Vec<Field>, label: impl Into<String>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::invalid("a velocity path needs at least two times"));
        }
        if times.len() != frames.len() {
            return Err(Error::invalid("times and frames differ in length"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || !times[0].is_finite() {
            return Err(Error::invalid("times must be strictly increasing"));
        }
        if frames.iter().any(|f| !f.grid().same(&grid)) {
            return Err(Error::GridMismatch);
        }
        Ok(VelocityPath { grid, times, frames, label: label.into(), generator: None })
    }

    /// Samples an exact velocity at `times`; flows then use the exact field
    /// between samples.
    pub fn from_generator(
        grid: Grid1D,
        times: Vec<f64>,
        label: impl Into<String>,
        u: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let frames = times.iter().map(|&t| Field::from_fn(grid, |x| u(t, x))).collect();
        let mut path = Self::new(grid, times, frames, label)?;
        path.generator = Some(Arc::new(u));
        Ok(path)
    }

    /// The same frame held for `duration`, sampled at `samples` times.
    pub fn constant(frame: Field, duration: f64, samples: usize) -> Result<Self> {
        let samples = samples.max(2);
        let times = uniform_times(duration, samples);
        let frames = vec![frame.clone(); samples];
        Self::new(*frame.grid(), times, frames, "constant")
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frames(&self) -> &[Field] {
        &self.frames
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_analytic(&self) -> bool {
        self.generator.is_some()
    }

    pub fn duration(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }

    /// Sub-path on the stored times `k0 ..= k1`.
    pub fn slice(&self, k0: usize, k1: usize) -> Result<Self> {
        if !(k0 < k1 && k1 < self.times.len()) {
            return Err(Error::invalid("slice bounds out of range"));
        }
        Ok(VelocityPath {
            grid: self.grid,
            times: self.times[k0..=k1].to_vec(),
            frames: self.frames[k0..=k1].to_vec(),
            label: self.label.clone(),
            generator: self.generator.clone(),
        })
    }
}

pub(crate) fn uniform_times(duration: f64, samples: usize) -> Vec<f64> {
    (0..samples).map(|k| duration * k as f64 / (samples - 1) as f64).collect()
}

enum Velocity<'a> {
    Exact(&'a Generator),
    Frames { times: &'a [f64], splines: Vec<PeriodicCubic> },
}

impl<'a> Velocity<'a> {
    fn new(u: &'a VelocityPath) -> Self {
        match &u.generator {
            Some(g) => Velocity::Exact(g),
            None => Velocity::Frames {
                times: &u.times,
                splines: u.frames.iter().map(|f| PeriodicCubic::new(f.values(), u.grid.length())).collect(),
            },
        }
    }

    /// `u(t, x)` for `t` in the interval `[t_k, t_{k+1}]`.
    #[inline]
    fn at(&self, k: usize, t: f64, x: f64) -> f64 {
        match self {
            Velocity::Exact(g) => g(t, x),
            Velocity::Frames { times, splines } => {
                let w = (t - times[k]) / (times[k + 1] - times[k]);
                let a = splines[k].eval(x);
                if w == 0.0 {
                    a
                } else {
                    (1.0 - w) * a + w * splines[k + 1].eval(x)
                }
            }
        }
    }

    fn trajectory(&self, times: &[f64], x0: f64, substeps: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(times.len());
        let mut x = x0;
        out.push(x);
        for k in 0..times.len() - 1 {
            let dt = (times[k + 1] - times[k]) / substeps as f64;
            for i in 0..substeps {
                let t = times[k] + i as f64 * dt;
                let k1 = self.at(k, t, x);
                let k2 = self.at(k, t + 0.5 * dt, x + 0.5 * dt * k1);
                let k3 = self.at(k, t + 0.5 * dt, x + 0.5 * dt * k2);
                let k4 = self.at(k, t + dt, x + dt * k3);
                x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            out.push(x);
        }
        out
    }
}

/// Flow `phi(t_k, .)` of a velocity path at every stored time.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub times: Vec<f64>,
    pub path: Vec<Diffeo1D>,
    pub endpoint: Diffeo1D,
}

/// RK4 flow of `u` starting from the identity, `substeps` steps per stored
/// time interval.
pub fn integrate_flow(u: &VelocityPath, substeps: usize) -> Result<FlowResult> {
    if substeps == 0 {
        return Err(Error::invalid("substeps must be >= 1"));
    }
    let vel = Velocity::new(u);
    let grid = u.grid;
    let traj: Vec<Vec<f64>> = (0..grid.n_points())
        .into_par_iter()
        .map(|j| vel.trajectory(&u.times, grid.node(j), substeps))
        .collect();
    let mut path = Vec::with_capacity(u.times.len());
    for (k, &t) in u.times.iter().enumerate() {
        let values: Vec<f64> = traj.iter().map(|tr| tr[k]).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::MonotonicityLost { t });
        }
        match Diffeo1D::from_values(grid, &values) {
            Ok(phi) => path.push(phi),
            Err(Error::NonInvertibleDiffeo { .. }) => return Err(Error::MonotonicityLost { t }),
            Err(e) => return Err(e),
        }
    }
    let endpoint = path[path.len() - 1].clone();
    Ok(FlowResult { times: u.times.clone(), path, endpoint })
}

/// Position of the single trajectory from `x0` at every stored time.
pub fn integrate_trajectory(u: &VelocityPath, x0: f64, substeps: usize) -> Result<Vec<f64>> {
    if substeps == 0 {
        return Err(Error::invalid("substeps must be >= 1"));
    }
    Ok(Velocity::new(u).trajectory(&u.times, x0, substeps))
}

/// Every RK4 substep of one trajectory: times, positions and velocities.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl Trace {
    /// Cubic Hermite dense output of the position at time `t`.
    pub fn position_at(&self, t: f64) -> f64 {
        let i = match self.t.partition_point(|&s| s <= t) {
            0 => 0,
            k if k >= self.t.len() => self.t.len() - 2,
            k => k - 1,
        };
        let h = self.t[i + 1] - self.t[i];
        crate::interp::hermite(self.x[i], self.x[i + 1], self.v[i] * h, self.v[i + 1] * h, (t - self.t[i]) / h)
    }
}

/// Records the trajectory from `x0` at every substep.
pub fn trace_trajectory(u: &VelocityPath, x0: f64, substeps: usize) -> Result<Trace> {
    if substeps == 0 {
        return Err(Error::invalid("substeps must be >= 1"));
    }
    let vel = Velocity::new(u);
    let times = &u.times;
    let cap = (times.len() - 1) * substeps + 1;
    let mut tr = Trace { t: Vec::with_capacity(cap), x: Vec::with_capacity(cap), v: Vec::with_capacity(cap) };
    let mut x = x0;
    for k in 0..times.len() - 1 {
        let dt = (times[k + 1] - times[k]) / substeps as f64;
        for i in 0..substeps {
            let t = times[k] + i as f64 * dt;
            let k1 = vel.at(k, t, x);
            tr.t.push(t);
            tr.x.push(x);
            tr.v.push(k1);
            let k2 = vel.at(k, t + 0.5 * dt, x + 0.5 * dt * k1);
            let k3 = vel.at(k, t + 0.5 * dt, x + 0.5 * dt * k2);
            let k4 = vel.at(k, t + dt, x + dt * k3);
            x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    let last = times.len() - 1;
    tr.t.push(times[last]);
    tr.x.push(x);
    tr.v.push(vel.at(last - 1, times[last], x));
    Ok(tr)
}

fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// `||u(t_k)||` in the metric `spec`, for every stored frame.
pub fn frame_norms(spec: &MetricSpec, u: &VelocityPath) -> Result<Vec<f64>> {
    u.frames.par_iter().map(|f| norm(spec, f)).collect()
}

/// `int ||u(t)|| dt` by the trapezoid rule on the stored times.
pub fn path_length(spec: &MetricSpec, u: &VelocityPath) -> Result<f64> {
    Ok(trapezoid(&u.times, &frame_norms(spec, u)?))
}

/// `int ||u(t)||^2 dt` by the trapezoid rule on the stored times.
pub fn path_energy(spec: &MetricSpec, u: &VelocityPath) -> Result<f64> {
    let sq: Vec<f64> = frame_norms(spec, u)?.into_iter().map(|v| v * v).collect();
    Ok(trapezoid(&u.times, &sq))
}

/// `max_j |phi1(x_j) - phi0(x_j)|`.
pub fn sup_displacement(phi0: &Diffeo1D, phi1: &Diffeo1D) -> Result<f64> {
    if !phi0.grid().same(phi1.grid()) {
        return Err(Error::GridMismatch);
    }
    Ok(phi0
        .displacement()
        .iter()
        .zip(phi1.displacement())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_velocity_gives_identity() {
        let g = Grid1D::circle(64).unwrap();
        let u = VelocityPath::constant(Field::zeros(g), 2.0, 5).unwrap();
        let flow = integrate_flow(&u, 3).unwrap();
        assert_eq!(flow.endpoint.displacement(), Diffeo1D::identity(g).displacement());
        let spec = MetricSpec::hs(0.5).unwrap();
        assert_eq!(path_length(&spec, &u).unwrap(), 0.0);
        assert_eq!(path_energy(&spec, &u).unwrap(), 0.0);
    }

    #[test]
    fn constant_velocity_rotates() {
        let g = Grid1D::circle(64).unwrap();
        let c = 0.37;
        let u = VelocityPath::constant(Field::from_fn(g, |_| c), 3.0, 7).unwrap();
        let flow = integrate_flow(&u, 2).unwrap();
        assert!(flow.endpoint.displacement().iter().all(|d| (d - c * 3.0).abs() < 1e-10));
    }

    #[test]
    fn autonomous_sine_flow_matches_closed_form() {
        // x' = sin x has tan(x/2) = tan(x0/2) e^t
        let g = Grid1D::circle(256).unwrap();
        let u = VelocityPath::constant(Field::from_fn(g, f64::sin), 1.0, 41).unwrap();
        let flow = integrate_flow(&u, 10).unwrap();
        let vals = flow.endpoint.values();
        for (j, v) in vals.iter().enumerate() {
            let x0 = g.centered(g.node(j));
            if (x0.abs() - PI).abs() < 1e-12 {
                continue;
            }
            let exact = 2.0 * ((x0 / 2.0).tan() * 1f64.exp()).atan();
            let got = g.centered(*v);
            assert!((got - exact).abs() < 1e-8, "j={j} {got} {exact}");
        }
    }

    #[test]
    fn constant_frame_length_and_energy() {
        let g = Grid1D::circle(64).unwrap();
        let f = Field::from_fn(g, |x| x.cos() + 0.2);
        let spec = MetricSpec::hsbar(0.75).unwrap();
        let nf = norm(&spec, &f).unwrap();
        let u = VelocityPath::constant(f, 2.5, 11).unwrap();
        let len = path_length(&spec, &u).unwrap();
        let en = path_energy(&spec, &u).unwrap();
        assert!((len - 2.5 * nf).abs() < 1e-12);
        assert!((en - 2.5 * nf * nf).abs() < 1e-11);
        assert!(len * len <= 2.5 * en * (1.0 + 1e-12));
    }

    #[test]
    fn sup_displacement_cases() {
        let g = Grid1D::circle(32).unwrap();
        let id = Diffeo1D::identity(g);
        assert_eq!(sup_displacement(&id, &id).unwrap(), 0.0);
        assert_eq!(sup_displacement(&id, &Diffeo1D::shift(g, 1.0)).unwrap(), 1.0);
        let other = Diffeo1D::identity(Grid1D::circle(16).unwrap());
        assert!(matches!(sup_displacement(&id, &other), Err(Error::GridMismatch)));
    }

    #[test]
    fn crossing_flow_lines_are_reported() {
        let g = Grid1D::circle(16).unwrap();
        // a steep field compresses nodes faster than the grid can follow
        let u = VelocityPath::constant(Field::from_fn(g, |x| 20.0 * (x + 0.1).sin()), 1.0, 3).unwrap();
        assert!(matches!(integrate_flow(&u, 1), Err(Error::MonotonicityLost { .. })));
    }

    #[test]
    fn path_validation() {
        let g = Grid1D::circle(8).unwrap();
        let f = Field::zeros(g);
        assert!(VelocityPath::new(g, vec![0.0, 0.0], vec![f.clone(), f.clone()], "x").is_err());
        assert!(VelocityPath::new(g, vec![0.0], vec![f.clone()], "x").is_err());
        let other = Field::zeros(Grid1D::circle(4).unwrap());
        assert!(matches!(VelocityPath::new(g, vec![0.0, 1.0], vec![f, other], "x"), Err(Error::GridMismatch)));
    }
}
