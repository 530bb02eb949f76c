//! Pseudo-spectral solver for `m_t = -2 u_x m - u m_x`, `m = A u`, on the
//! circle.

use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::norms::{inner, MetricSpec, Variant};
use crate::spectral::{
    derivative, forward, inertia_inverse, inertia_operator, inverse_unchecked, Field, Grid1D, SpectralField,
};

/// Momentum and velocity at time `t`.
#[derive(Debug, Clone)]
pub struct GeodesicState {
    pub t: f64,
    pub m: Field,
    pub u: Field,
}

impl GeodesicState {
    pub fn from_velocity(spec: &MetricSpec, u: &Field) -> Result<Self> {
        let op = Operators::new(spec, *u.grid(), 2.0 / 3.0)?;
        let uh = forward(u);
        if spec.variant() == Variant::Homogeneous && u.mean().abs() > crate::spectral::ZERO_MEAN_TOL {
            return Err(Error::HomogeneousNonzeroMean { mean: u.mean() });
        }
        let mh: Vec<Complex64> = uh.coeffs().iter().zip(&op.a).map(|(c, a)| c * a).collect();
        let m = op.to_field(mh);
        Ok(GeodesicState { t: 0.0, u: u.clone(), m })
    }

    pub fn from_momentum(spec: &MetricSpec, m: &Field) -> Result<Self> {
        let op = Operators::new(spec, *m.grid(), 2.0 / 3.0)?;
        if spec.variant() == Variant::Homogeneous && m.mean().abs() > crate::spectral::ZERO_MEAN_TOL {
            return Err(Error::HomogeneousNonzeroMean { mean: m.mean() });
        }
        let mh = forward(m).coeffs().to_vec();
        Ok(GeodesicState { t: 0.0, u: op.to_field(op.velocity(&mh)), m: m.clone() })
    }

    pub fn grid(&self) -> Grid1D {
        *self.u.grid()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Fraction of the resolved band kept in products; 2/3 is the usual rule.
    pub dealias: f64,
    /// Store every this many steps (the final state is always stored).
    pub snapshot_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { dt: 1e-3, t_final: 1.0, dealias: 2.0 / 3.0, snapshot_every: 100 }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::invalid(format!("t_final must be non-negative, got {}", self.t_final)));
        }
        if !(self.dealias > 0.0 && self.dealias <= 1.0) {
            return Err(Error::invalid(format!("dealias must lie in (0, 1], got {}", self.dealias)));
        }
        if self.snapshot_every == 0 {
            return Err(Error::invalid("snapshot_every must be at least 1"));
        }
        Ok(())
    }
}

/// Sampled symbols for one grid and spec.
struct Operators {
    grid: Grid1D,
    a: Vec<Complex64>,
    a_inv: Vec<Complex64>,
    ik: Vec<Complex64>,
    keep: Vec<bool>,
    homogeneous: bool,
}

impl Operators {
    fn new(spec: &MetricSpec, grid: Grid1D, dealias: f64) -> Result<Self> {
        let a = inertia_operator(spec).sampled(&grid)?;
        let a_inv = inertia_inverse(spec).sampled(&grid)?;
        let ik = crate::spectral::MultiplierOp::derivative().sampled(&grid)?;
        let kmax = (dealias * grid.n_points() as f64 / 2.0).floor() as u64;
        let keep = (0..grid.n_points()).map(|k| grid.mode(k).unsigned_abs() <= kmax).collect();
        Ok(Operators { grid, a, a_inv, ik, keep, homogeneous: spec.variant() == Variant::Homogeneous })
    }

    fn to_field(&self, coeffs: Vec<Complex64>) -> Field {
        inverse_unchecked(&SpectralField::new(self.grid, coeffs).expect("length matches grid"))
    }

    fn velocity(&self, mh: &[Complex64]) -> Vec<Complex64> {
        mh.iter().zip(&self.a_inv).map(|(c, a)| c * a).collect()
    }

    fn masked(&self, v: impl Iterator<Item = Complex64>) -> Vec<Complex64> {
        v.zip(&self.keep).map(|(c, &k)| if k { c } else { Complex64::new(0.0, 0.0) }).collect()
    }

    /// `-(2 u_x m + u m_x)` in coefficients, with inputs and product
    /// truncated to the dealiased band.
    fn rhs(&self, mh: &[Complex64]) -> Vec<Complex64> {
        let mt = self.masked(mh.iter().copied());
        let ut = self.masked(self.velocity(mh).into_iter());
        let ux = self.to_field(ut.iter().zip(&self.ik).map(|(c, d)| c * d).collect());
        let mx = self.to_field(mt.iter().zip(&self.ik).map(|(c, d)| c * d).collect());
        let u = self.to_field(ut);
        let m = self.to_field(mt);
        let prod: Vec<f64> = (0..u.values().len())
            .map(|j| -(2.0 * ux.values()[j] * m.values()[j] + u.values()[j] * mx.values()[j]))
            .collect();
        let mut out = self.masked(forward(&Field::from_raw(self.grid, prod)).coeffs().iter().copied());
        if self.homogeneous {
            // the exact mean is zero; drop roundoff so the inverse stays defined
            out[0] = Complex64::new(0.0, 0.0);
        }
        out
    }

    fn state(&self, t: f64, mh: Vec<Complex64>) -> GeodesicState {
        let u = self.to_field(self.velocity(&mh));
        GeodesicState { t, m: self.to_field(mh), u }
    }
}

/// Right-hand side `-2 u_x m - u m_x` with 2/3-rule dealiasing.
pub fn rhs(spec: &MetricSpec, state: &GeodesicState) -> Result<Field> {
    rhs_with(spec, state, 2.0 / 3.0)
}

/// Like [`rhs`] with an explicit dealiasing fraction (`1.0` disables it).
pub fn rhs_with(spec: &MetricSpec, state: &GeodesicState, dealias: f64) -> Result<Field> {
    state.m.check_grid(&state.u)?;
    let op = Operators::new(spec, state.grid(), dealias)?;
    Ok(op.to_field(op.rhs(forward(&state.m).coeffs())))
}

/// Lie bracket of vector fields `[v, w] = v w_x - w v_x`.
pub fn lie_bracket(v: &Field, w: &Field) -> Result<Field> {
    let (vx, wx) = (derivative(v), derivative(w));
    let a = v.zip_with(&wx, |a, b| a * b)?;
    let b = w.zip_with(&vx, |a, b| a * b)?;
    a.zip_with(&b, |a, b| a - b)
}

/// `ad(v)^T u = A^{-1}(2 m v_x + v m_x)` with `m = A u`. For homogeneous
/// specs the mean is removed first, which is the transpose on the quotient
/// by constants.
pub fn ad_transpose(spec: &MetricSpec, u: &Field, v: &Field) -> Result<Field> {
    u.check_grid(v)?;
    let op = Operators::new(spec, *u.grid(), 1.0)?;
    let mh: Vec<Complex64> = forward(u).coeffs().iter().zip(&op.a).map(|(c, a)| c * a).collect();
    let m = op.to_field(mh.clone());
    let mx = op.to_field(mh.iter().zip(&op.ik).map(|(c, d)| c * d).collect());
    let vx = derivative(v);
    let y: Vec<f64> = (0..m.values().len())
        .map(|j| 2.0 * m.values()[j] * vx.values()[j] + v.values()[j] * mx.values()[j])
        .collect();
    let mut yh = forward(&Field::from_raw(*u.grid(), y)).coeffs().to_vec();
    if op.homogeneous {
        yh[0] = Complex64::new(0.0, 0.0);
    }
    Ok(op.to_field(op.velocity(&yh)))
}

fn courant(u: &Field, dt: f64) -> f64 {
    let g = u.grid();
    dt * u.max_abs() * g.n_points() as f64 / g.length()
}

/// One RK4 step in `m`.
pub fn step(spec: &MetricSpec, state: &GeodesicState, config: &SolverConfig) -> Result<GeodesicState> {
    config.validate()?;
    let op = Operators::new(spec, state.grid(), config.dealias)?;
    let c = courant(&state.u, config.dt);
    if !(c < 1.0) {
        return Err(Error::CflViolation { t: state.t, courant: c });
    }
    let next = rk4(&op, forward(&state.m).coeffs(), config.dt);
    Ok(op.state(state.t + config.dt, next))
}

fn rk4(op: &Operators, m0: &[Complex64], dt: f64) -> Vec<Complex64> {
    let axpy = |a: &[Complex64], k: &[Complex64], h: f64| -> Vec<Complex64> {
        a.iter().zip(k).map(|(x, y)| x + y * h).collect()
    };
    let k1 = op.rhs(m0);
    let k2 = op.rhs(&axpy(m0, &k1, 0.5 * dt));
    let k3 = op.rhs(&axpy(m0, &k2, 0.5 * dt));
    let k4 = op.rhs(&axpy(m0, &k3, dt));
    (0..m0.len()).map(|i| m0[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0)).collect()
}

/// Snapshots of a run, and the reason it stopped early if it did.
#[derive(Debug, Clone)]
pub struct GeodesicRun {
    pub states: Vec<GeodesicState>,
    pub halted: Option<Error>,
}

/// Integrates to `t_final`, keeping whatever was computed when the CFL
/// guard or a non-finite value stops the run.
pub fn solve_partial(spec: &MetricSpec, u0: &Field, config: &SolverConfig) -> Result<GeodesicRun> {
    config.validate()?;
    let init = GeodesicState::from_velocity(spec, u0)?;
    let op = Operators::new(spec, *u0.grid(), config.dealias)?;
    let steps = (config.t_final / config.dt).round() as usize;
    let dt = if steps == 0 { 0.0 } else { config.t_final / steps as f64 };
    let mut states = vec![init.clone()];
    let mut mh = forward(&init.m).coeffs().to_vec();
    let mut cur = init;
    for k in 1..=steps {
        let c = courant(&cur.u, dt);
        if !(c < 1.0) {
            return Ok(GeodesicRun { states, halted: Some(Error::CflViolation { t: cur.t, courant: c }) });
        }
        let next = rk4(&op, &mh, dt);
        if next.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            let c = f64::INFINITY;
            return Ok(GeodesicRun { states, halted: Some(Error::CflViolation { t: cur.t, courant: c }) });
        }
        mh = next;
        cur = op.state(k as f64 * dt, mh.clone());
        if k % config.snapshot_every == 0 || k == steps {
            states.push(cur.clone());
        }
    }
    Ok(GeodesicRun { states, halted: None })
}

/// Like [`solve_partial`], failing with [`Error::CflViolation`] if the run
/// cannot reach `t_final`.
pub fn solve(spec: &MetricSpec, u0: &Field, config: &SolverConfig) -> Result<Vec<GeodesicState>> {
    let run = solve_partial(spec, u0, config)?;
    match run.halted {
        Some(e) => Err(e),
        None => Ok(run.states),
    }
}

/// `<u, u>` in the metric; constant along smooth geodesics.
pub fn conserved_energy(spec: &MetricSpec, state: &GeodesicState) -> Result<f64> {
    inner(spec, &state.u, &state.u)
}

/// Equations arising as geodesic equations of particular metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedEquation {
    Burgers,
    CamassaHolm,
    Mclm,
    HunterSaxton,
}

impl NamedEquation {
    pub const ALL: [NamedEquation; 4] =
        [NamedEquation::Burgers, NamedEquation::CamassaHolm, NamedEquation::Mclm, NamedEquation::HunterSaxton];

    pub fn name(&self) -> &'static str {
        match self {
            NamedEquation::Burgers => "burgers",
            NamedEquation::CamassaHolm => "camassa-holm",
            NamedEquation::Mclm => "mclm",
            NamedEquation::HunterSaxton => "hunter-saxton",
        }
    }
}

impl FromStr for NamedEquation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "burgers" => Ok(NamedEquation::Burgers),
            "camassa-holm" | "ch" => Ok(NamedEquation::CamassaHolm),
            "mclm" => Ok(NamedEquation::Mclm),
            "hunter-saxton" | "hs" => Ok(NamedEquation::HunterSaxton),
            _ => Err(Error::invalid(format!("unknown equation '{s}'"))),
        }
    }
}

/// Metric whose geodesic equation is `name`: Burgers `m = u`, Camassa-Holm
/// `m = u - u_xx`, mCLM `m = H u_x`, Hunter-Saxton `m = -u_xx`.
pub fn named_equation(name: NamedEquation) -> MetricSpec {
    let spec = match name {
        NamedEquation::Burgers => MetricSpec::hs(0.0),
        NamedEquation::CamassaHolm => MetricSpec::hsbar(1.0),
        NamedEquation::Mclm => MetricSpec::homogeneous(0.5),
        NamedEquation::HunterSaxton => MetricSpec::homogeneous(1.0),
    };
    spec.expect("fixed orders are valid")
}
