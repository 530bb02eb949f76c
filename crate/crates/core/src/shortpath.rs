//! Explicit short paths between diffeomorphisms.
//!
//! Two constructions live here. On the circle, a traveling wave
//! `u(t, x) = lambda f(t - x)` built from a multiscale bump `f` shifts every
//! point by the same amount while its energy decays like `1/N` in the number
//! of scales. On a line window, a velocity equal to one on a thin moving
//! strip `[g(t), f(t)]` (smoothed by a mollifier) carries the identity to a
//! target `x + c(x)` with length controlled by the strip width.

use crate::error::{Error, Result};
use crate::flow::{integrate_flow, path_energy, path_length, trace_trajectory, VelocityPath};
use crate::norms::{Diffeo1D, MetricSpec};
use crate::quad;
use crate::spectral::{bump, Field, Grid1D, Mollifier};
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// Support diameter of the multiscale profile.
pub const SUPPORT_DIAMETER: f64 = 2.0;

/// `f(x) = (1/N) sum_{j<N} bump(2^j x)`, supported on `(-1, 1)` with
/// `f(0) = 1`.
pub fn multiscale(n_scales: usize, x: f64) -> f64 {
    let mut acc = 0.0;
    let mut y = x.abs();
    for _ in 0..n_scales {
        if y >= 1.0 {
            break;
        }
        acc += bump(y);
        y *= 2.0;
    }
    acc / n_scales as f64
}

/// `1 - f(x)` without cancellation near the peak.
pub fn multiscale_gap(n_scales: usize, x: f64) -> f64 {
    let mut acc = 0.0;
    let mut y = x.abs();
    for _ in 0..n_scales {
        if y >= 1.0 {
            acc += 1.0;
        } else {
            let y2 = y * y;
            acc -= (-y2 / (1.0 - y2)).exp_m1();
        }
        y *= 2.0;
    }
    acc / n_scales as f64
}

/// Grid points needed to resolve `n_scales` dyadic scales on a period of
/// `length`: `2^{N+4}` per `2 pi`.
pub fn required_points(n_scales: usize, length: f64) -> usize {
    let v = 2f64.powi(n_scales as i32 + 4) * (length / (2.0 * PI)).max(1.0);
    if v >= usize::MAX as f64 {
        usize::MAX
    } else {
        v.ceil() as usize
    }
}

fn check_scales(n_scales: usize, grid: &Grid1D) -> Result<()> {
    if n_scales == 0 {
        return Err(Error::invalid("number of scales must be >= 1"));
    }
    if grid.length() <= SUPPORT_DIAMETER {
        return Err(Error::invalid(format!(
            "period {} does not contain the profile support {SUPPORT_DIAMETER}",
            grid.length()
        )));
    }
    let required = required_points(n_scales, grid.length());
    if grid.n_points() < required {
        return Err(Error::UnresolvedScale { n_points: grid.n_points(), scales: n_scales, required });
    }
    Ok(())
}

/// The multiscale profile sampled on `grid`, centered at `x = 0`.
pub fn multiscale_function(n_scales: usize, grid: &Grid1D) -> Result<Field> {
    check_scales(n_scales, grid)?;
    Ok(Field::from_fn(*grid, |x| multiscale(n_scales, grid.centered(x))))
}

/// Traveling-wave construction on a circle of circumference `period`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleConstruction {
    n_scales: usize,
    lambda: f64,
    period: f64,
}

impl CircleConstruction {
    pub fn new(n_scales: usize, lambda: f64, period: f64) -> Result<Self> {
        if n_scales == 0 {
            return Err(Error::invalid("number of scales must be >= 1"));
        }
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::invalid(format!("lambda must lie in [0, 1), got {lambda}")));
        }
        if !(period > SUPPORT_DIAMETER) {
            return Err(Error::invalid("period must exceed the support diameter"));
        }
        Ok(CircleConstruction { n_scales, lambda, period })
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.n_scales, lambda, self.period)
    }

    pub fn n_scales(&self) -> usize {
        self.n_scales
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn support_diameter(&self) -> f64 {
        SUPPORT_DIAMETER
    }

    /// The profile moved onto `[0, 2]`.
    #[inline]
    pub fn profile(&self, y: f64) -> f64 {
        if y <= 0.0 || y >= SUPPORT_DIAMETER {
            0.0
        } else {
            multiscale(self.n_scales, y - 0.5 * SUPPORT_DIAMETER)
        }
    }

    /// `u(t, x) = lambda f(t - x)`, periodic in `x`.
    #[inline]
    pub fn velocity(&self, t: f64, x: f64) -> f64 {
        self.lambda * self.profile((t - x).rem_euclid(self.period))
    }

    /// Time a trajectory spends inside the moving support: `2 + I(lambda)`.
    pub fn t_shift(&self) -> Result<f64> {
        Ok(SUPPORT_DIAMETER + shift_integral(self)?)
    }

    /// Duration after which every point has crossed the support once.
    pub fn t_end(&self) -> Result<f64> {
        Ok(self.t_shift()? + self.period - SUPPORT_DIAMETER)
    }
}

/// `I(lambda) = int lambda f / (1 - lambda f)`, the shift each point
/// receives while crossing the wave.
pub fn shift_integral(c: &CircleConstruction) -> Result<f64> {
    let lam = c.lambda;
    if lam == 0.0 {
        return Ok(0.0);
    }
    if lam >= 1.0 - 1e-12 {
        return Err(Error::SingularIntegrand { peak: lam });
    }
    let n = c.n_scales;
    let gap = 1.0 - lam;
    let integrand = |x: f64| lam * multiscale(n, x) / (gap + lam * multiscale_gap(n, x));
    // width of the near-singular peak at the origin
    let curvature = (4f64.powi(n as i32) - 1.0) / (3.0 * n as f64);
    let width = ((1.0 - lam) / (lam * curvature)).sqrt();
    let mut breaks = vec![0.0, 1.0];
    breaks.extend((1..n).map(|j| 2f64.powi(-(j as i32))));
    breaks.extend((-4..=10).map(|k| width * 2f64.powi(k)).filter(|&b| b > 0.0 && b < 1.0));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    Ok(2.0 * quad::integrate_with_breaks(integrand, &breaks, 1e-13, 1e-12)?)
}

/// Largest `lambda` considered: `1 - 1e-9`.
pub const LAMBDA_CAP_GAP: f64 = 1e-9;

/// Solves `I(lambda) = target_shift` by bracket expansion toward 1 and
/// bisection in `mu = -ln(1 - lambda)`.
pub fn solve_lambda(c: &CircleConstruction, target_shift: f64) -> Result<f64> {
    if !(target_shift.is_finite() && target_shift > 0.0) {
        return Err(Error::invalid(format!("target shift must be positive, got {target_shift}")));
    }
    let lam = |mu: f64| -(-mu).exp_m1();
    let i_of = |mu: f64| shift_integral(&c.with_lambda(lam(mu))?);
    let cap = -LAMBDA_CAP_GAP.ln();
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=9 {
        let mu = (k as f64 * std::f64::consts::LN_10).min(cap);
        let v = i_of(mu)?;
        if v >= target_shift {
            hi = Some(mu);
            break;
        }
        lo = mu;
        if k == 9 {
            return Err(Error::BracketFailure { target: target_shift, reached: v });
        }
    }
    let mut hi = hi.expect("bracket found");
    let (mut best, mut best_err) = (hi, f64::INFINITY);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = i_of(mid)?;
        let err = (v - target_shift).abs();
        if err < best_err {
            best = mid;
            best_err = err;
        }
        if err <= 1e-14 * target_shift.max(1.0) {
            break;
        }
        if v < target_shift {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lam(best))
}

/// Frames stored by [`build_circle_path`].
pub const CIRCLE_FRAMES: usize = 257;

/// RK4 steps per unit time that resolve `n_scales` scales.
pub fn circle_steps_per_unit_time(n_scales: usize) -> usize {
    (1usize << (n_scales + 2).min(40)).max(256)
}

/// Traveling-wave path from the identity to the rotation by
/// `target_shift`, with its construction data.
pub fn build_circle_path(
    n_scales: usize,
    target_shift: f64,
    grid: &Grid1D,
) -> Result<(VelocityPath, CircleConstruction)> {
    build_circle_path_with(n_scales, target_shift, grid, CIRCLE_FRAMES)
}

pub fn build_circle_path_with(
    n_scales: usize,
    target_shift: f64,
    grid: &Grid1D,
    frames: usize,
) -> Result<(VelocityPath, CircleConstruction)> {
    check_scales(n_scales, grid)?;
    if !(target_shift > 0.0 && target_shift <= grid.length()) {
        return Err(Error::invalid(format!("target shift must lie in (0, period], got {target_shift}")));
    }
    let c0 = CircleConstruction::new(n_scales, 0.0, grid.length())?;
    let c = c0.with_lambda(solve_lambda(&c0, target_shift)?)?;
    let times = crate::flow::uniform_times(c.t_end()?, frames.max(2));
    let path = VelocityPath::from_generator(*grid, times, format!("circle N={n_scales}"), move |t, x| c.velocity(t, x))?;
    Ok((path, c))
}

/// RK4 substeps per stored interval needed by a circle path.
pub fn circle_substeps(path: &VelocityPath, c: &CircleConstruction) -> usize {
    let intervals = (path.times().len() - 1) as f64;
    ((path.duration() * circle_steps_per_unit_time(c.n_scales) as f64) / intervals).ceil().max(1.0) as usize
}

/// Time the trajectory from `x0` spends inside the moving support over the
/// whole path, located from the RK4 trace by dense output.
pub fn time_in_support(path: &VelocityPath, c: &CircleConstruction, x0: f64, substeps: usize) -> Result<f64> {
    let tr = trace_trajectory(path, x0, substeps)?;
    let a: Vec<f64> = tr.t.iter().zip(&tr.x).map(|(t, x)| t - x).collect();
    let (t0, t1) = (tr.t[0], tr.t[tr.t.len() - 1]);
    let l = c.period;
    let crossing = |level: f64| -> f64 {
        let i = a.partition_point(|&v| v < level);
        if i == 0 {
            return t0;
        }
        if i >= a.len() {
            return t1;
        }
        let (lo_t, hi_t) = (tr.t[i - 1], tr.t[i]);
        let (mut lo, mut hi) = (lo_t, hi_t);
        for _ in 0..80 {
            let m = 0.5 * (lo + hi);
            if m - tr.position_at(m) < level {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    };
    let k0 = (a[0] / l).floor() as i64;
    let k1 = (a[a.len() - 1] / l).floor() as i64;
    let mut total = 0.0;
    for k in k0..=k1 {
        let enter = k as f64 * l;
        let exit = enter + SUPPORT_DIAMETER;
        if exit <= a[0] || enter >= a[a.len() - 1] {
            continue;
        }
        total += crossing(exit) - crossing(enter);
    }
    Ok(total)
}

/// Largest deviation of `phi(x) - x` from its mean; zero for rotations.
pub fn rotation_defect(phi: &Diffeo1D) -> f64 {
    let d = phi.displacement();
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    d.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max)
}

/// Strip construction on a line window carrying the identity to a target
/// `phi(x) = x + c(x)` with `c >= 0`.
///
/// The strip is bounded by `f(t) = t tan(alpha)` and `g`, given through
/// `g^{-1}(y) = y cot(alpha) + corr(y)`; without smoothing
/// `corr(y) = kappa (y - phi^{-1}(y))` with `kappa = 1 - cot(alpha)`.
#[derive(Debug, Clone)]
pub struct LineConstruction {
    target: Diffeo1D,
    alpha: f64,
    eps: f64,
    grid: Grid1D,
    y0: f64,
    hy: f64,
    corr: Vec<f64>,
    ta: f64,
    ht: f64,
    g_tab: Vec<f64>,
    trivial: bool,
}

/// Outcome of the endpoint-correction loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingReport {
    pub iterations: usize,
    pub endpoint_error: f64,
}

const SHOOTING_TOL: f64 = 1e-3;
const SHOOTING_MAX_ITER: usize = 50;
const SHOOTING_DAMPING: f64 = 0.5;

impl LineConstruction {
    pub fn new(target: Diffeo1D, alpha: f64, eps: f64, grid: Grid1D) -> Result<Self> {
        if !target.grid().same(&grid) {
            return Err(Error::GridMismatch);
        }
        if !(alpha > FRAC_PI_4 && alpha < FRAC_PI_2) {
            return Err(Error::invalid(format!("angle must lie in (pi/4, pi/2), got {alpha}")));
        }
        let min = 2.0 * grid.spacing();
        if !(eps >= min) {
            return Err(Error::KernelUnresolved { eps, min });
        }
        let disp = target.displacement();
        if let Some(j) = disp.iter().position(|&d| d < -1e-12) {
            return Err(Error::invalid(format!("target must satisfy phi(x) >= x (fails at node {j})")));
        }
        let kappa = 1.0 - 1.0 / alpha.tan();
        let h = grid.spacing();
        let n = disp.len();
        let min_slope = (0..n).map(|j| 1.0 + (disp[(j + 1) % n] - disp[j]) / h).fold(f64::INFINITY, f64::min);
        if kappa >= min_slope {
            return Err(Error::invalid(format!(
                "1 - cot(alpha) = {kappa} must stay below the smallest target slope {min_slope}"
            )));
        }
        let active: Vec<usize> = (0..n).filter(|&j| disp[j] > 0.0).collect();
        let (a, b) = match (active.first(), active.last()) {
            (Some(&a), Some(&b)) => (grid.node(a) - 3.0 * h, grid.node(b) + disp[b] + 3.0 * h),
            _ => (0.0, 0.0),
        };
        let pad = 8.0 * eps + 4.0 * h;
        let hy = 0.5 * h;
        let y0 = a - pad;
        let count = ((b + pad - y0) / hy).ceil() as usize + 1;
        let corr: Vec<f64> = (0..count)
            .map(|i| {
                let y = y0 + i as f64 * hy;
                if y <= a || y >= b {
                    0.0
                } else {
                    kappa * (y - target.inverse(y)).max(0.0)
                }
            })
            .collect();
        let trivial = corr.iter().all(|&c: &f64| c == 0.0);
        let mut lc = LineConstruction {
            target,
            alpha,
            eps,
            grid,
            y0,
            hy,
            corr,
            ta: 0.0,
            ht: 1.0,
            g_tab: Vec::new(),
            trivial,
        };
        lc.rebuild_g()?;
        Ok(lc)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn kappa(&self) -> f64 {
        1.0 - 1.0 / self.alpha.tan()
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn target(&self) -> &Diffeo1D {
        &self.target
    }

    /// Leading edge `f(t) = t tan(alpha)`.
    pub fn f(&self, t: f64) -> f64 {
        t * self.alpha.tan()
    }

    fn corr_at(&self, y: f64) -> f64 {
        let pos = (y - self.y0) / self.hy;
        let last = self.corr.len() - 1;
        if pos <= 0.0 {
            return self.corr[0];
        }
        if pos >= last as f64 {
            return self.corr[last];
        }
        let i = pos.floor() as usize;
        let w = pos - i as f64;
        (1.0 - w) * self.corr[i] + w * self.corr[i + 1]
    }

    /// `g^{-1}(y)`.
    pub fn g_inv(&self, y: f64) -> f64 {
        y / self.alpha.tan() + self.corr_at(y)
    }

    /// Trailing edge `g(t)`.
    pub fn g(&self, t: f64) -> f64 {
        let tan = self.alpha.tan();
        let pos = (t - self.ta) / self.ht;
        let last = self.g_tab.len() - 1;
        if pos <= 0.0 {
            return (t - self.corr[0]) * tan;
        }
        if pos >= last as f64 {
            return (t - self.corr[self.corr.len() - 1]) * tan;
        }
        let i = pos.floor() as usize;
        let w = pos - i as f64;
        (1.0 - w) * self.g_tab[i] + w * self.g_tab[i + 1]
    }

    fn rebuild_g(&mut self) -> Result<()> {
        let m = self.corr.len();
        let ginv: Vec<f64> = (0..m).map(|i| self.g_inv(self.y0 + i as f64 * self.hy)).collect();
        if let Some(i) = ginv.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(format!(
                "trailing edge is not increasing near y = {}",
                self.y0 + i as f64 * self.hy
            )));
        }
        let (ta, tb) = (ginv[0], ginv[m - 1]);
        let ht = (tb - ta) / (m - 1) as f64;
        let mut g_tab = Vec::with_capacity(m);
        let mut i = 0;
        for k in 0..m {
            let t = ta + k as f64 * ht;
            while i + 2 < m && ginv[i + 1] < t {
                i += 1;
            }
            let w = ((t - ginv[i]) / (ginv[i + 1] - ginv[i])).clamp(0.0, 1.0);
            g_tab.push(self.y0 + (i as f64 + w) * self.hy);
        }
        self.ta = ta;
        self.ht = ht;
        self.g_tab = g_tab;
        Ok(())
    }

    /// Time after which the velocity vanishes identically.
    pub fn t_end(&self) -> f64 {
        self.ta + self.ht * (self.g_tab.len() - 1) as f64
    }

    /// Whether the strip is empty, i.e. the target is the identity.
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    /// `sup_t |f(t) - g(t)|`.
    pub fn strip_width(&self) -> f64 {
        if self.is_trivial() {
            return 0.0;
        }
        (0..self.g_tab.len())
            .map(|k| {
                let t = self.ta + k as f64 * self.ht;
                (self.f(t) - self.g_tab[k]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Smoothed strip velocity `1_[g(t), f(t)] * G_eps (x)`.
    #[inline]
    pub fn velocity(&self, t: f64, x: f64) -> f64 {
        if self.is_trivial() {
            return 0.0;
        }
        let (g, f) = (self.g(t), self.f(t));
        if x < g.min(f) - self.eps || x > g.max(f) + self.eps {
            return 0.0;
        }
        let m = Mollifier::get();
        m.cdf((x - g) / self.eps) - m.cdf((x - f) / self.eps)
    }

    /// Unsmoothed strip velocity `1_[g(t), f(t)](x)`.
    pub fn sharp_velocity(&self, t: f64, x: f64) -> f64 {
        if self.g(t) <= x && x <= self.f(t) {
            1.0
        } else {
            0.0
        }
    }

    /// Explicit flow of the unsmoothed strip:
    /// `x` before the front arrives, `t + kappa x` inside the strip,
    /// `phi(x)` after it.
    pub fn explicit_flow(&self, x: f64, t: f64) -> f64 {
        let cot = 1.0 / self.alpha.tan();
        let kappa = self.kappa();
        let phi = self.target.eval(x);
        if t < x * cot {
            x
        } else if t <= phi - kappa * x {
            t + kappa * x
        } else {
            phi
        }
    }

    /// Unsmoothed trajectory from `x0` at time `t`, by locating when the
    /// leading edge reaches the point and when the trailing edge catches it.
    pub fn sharp_trajectory(&self, x0: f64, t: f64) -> f64 {
        let t_in = x0 / self.alpha.tan();
        if t <= t_in {
            return x0;
        }
        // g(s) - (x0 + s - t_in) changes sign once on [t_in, t_end]
        let gap = |s: f64| self.g(s) - (x0 + s - t_in);
        let (mut lo, mut hi) = (t_in, self.t_end().max(t_in));
        if gap(lo) >= 0.0 {
            return x0;
        }
        if gap(hi) < 0.0 {
            return x0 + t - t_in;
        }
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if gap(m) < 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        let t_out = 0.5 * (lo + hi);
        x0 + t.min(t_out) - t_in
    }

    /// Time-`t_end` map of the smoothed flow sampled on the grid.
    pub fn endpoint_map(&self) -> Result<Diffeo1D> {
        let xs = self.grid.nodes();
        let vals: Vec<f64> = xs.par_iter().map(|&x| self.endpoint(x)).collect::<Result<_>>()?;
        Diffeo1D::from_values(self.grid, &vals)
    }

    /// Velocity path on `frames` equally spaced times over `[0, t_end]`.
    pub fn path(&self, frames: usize) -> Result<VelocityPath> {
        let me = self.clone();
        let times = crate::flow::uniform_times(self.t_end(), frames.max(2));
        VelocityPath::from_generator(
            self.grid,
            times,
            format!("line alpha={}", self.alpha),
            move |t, x| me.velocity(t, x),
        )
    }

    /// Slope of the trailing edge.
    fn g_slope(&self, t: f64) -> f64 {
        let pos = (t - self.ta) / self.ht;
        let last = self.g_tab.len() - 1;
        if pos <= 0.0 || pos >= last as f64 {
            return self.alpha.tan();
        }
        let i = (pos.floor() as usize).min(last - 1);
        (self.g_tab[i + 1] - self.g_tab[i]) / self.ht
    }

    /// Velocity, its `x`-derivative, and its rate of change per unit delay
    /// of the trailing edge.
    #[inline]
    fn velocity_parts(&self, t: f64, x: f64) -> (f64, f64, f64) {
        let (g, f) = (self.g(t), self.f(t));
        if x < g.min(f) - self.eps || x > g.max(f) + self.eps {
            return (0.0, 0.0, 0.0);
        }
        let m = Mollifier::get();
        let (zg, zf) = ((x - g) / self.eps, (x - f) / self.eps);
        let (dg, df) = (m.density(zg) / self.eps, m.density(zf) / self.eps);
        (m.cdf(zg) - m.cdf(zf), dg - df, dg * self.g_slope(t))
    }

    /// Endpoint of the smoothed flow from `x0`, with its derivative with
    /// respect to a uniform delay of the trailing edge. RK4 runs only while
    /// the point can feel the strip: from the arrival of the smoothed
    /// leading edge until the smoothed trailing edge has passed.
    fn endpoint_sensitivity(&self, x0: f64) -> Result<(f64, f64)> {
        if self.is_trivial() {
            return Ok((x0, 0.0));
        }
        let t_end = self.t_end();
        let t0 = ((x0 - self.eps) / self.alpha.tan()).max(0.0);
        if t0 >= t_end {
            return Ok((x0, 0.0));
        }
        let steps = ((t_end - t0) / (self.eps / 8.0)).ceil() as usize;
        let dt = (t_end - t0) / steps as f64;
        let rhs = |t: f64, x: f64, j: f64| {
            let (u, ux, ud) = self.velocity_parts(t, x);
            (u, ux * j + ud)
        };
        let (mut t, mut x, mut j) = (t0, x0, 0.0);
        for _ in 0..steps {
            if x < self.g(t) - self.eps {
                break;
            }
            let (a1, b1) = rhs(t, x, j);
            let (a2, b2) = rhs(t + 0.5 * dt, x + 0.5 * dt * a1, j + 0.5 * dt * b1);
            let (a3, b3) = rhs(t + 0.5 * dt, x + 0.5 * dt * a2, j + 0.5 * dt * b2);
            let (a4, b4) = rhs(t + dt, x + dt * a3, j + dt * b3);
            x += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            j += dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
            t += dt;
            if !x.is_finite() {
                return Err(Error::MonotonicityLost { t });
            }
        }
        Ok((x, j))
    }

    /// Endpoint of the smoothed flow from `x0`.
    pub fn endpoint(&self, x0: f64) -> Result<f64> {
        Ok(self.endpoint_sensitivity(x0)?.0)
    }

    /// Endpoint errors of the smoothed flow at sample points `xs`.
    pub fn endpoint_errors(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.par_iter().map(|&x| Ok(self.endpoint(x)? - self.target.eval(x))).collect()
    }

    /// Damped shooting on `g^{-1}` until the smoothed flow ends within
    /// `1e-3` of the target.
    pub fn correct_endpoint(&mut self) -> Result<ShootingReport> {
        if self.is_trivial() {
            return Ok(ShootingReport { iterations: 0, endpoint_error: 0.0 });
        }
        let (ya, yb) = (self.y0, self.y0 + self.hy * (self.corr.len() - 1) as f64);
        let (xa, xb) = (self.target.inverse(ya), self.target.inverse(yb));
        // samples at most eps/2 apart so corrections resolve the edge layer
        let m: usize = (((xb - xa) / (0.5 * self.eps)).ceil() as usize).max(512);
        let xs: Vec<f64> = (0..=m).map(|i| xa + (xb - xa) * i as f64 / m as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| self.target.eval(x)).collect();
        let mut err = f64::INFINITY;
        for it in 0..=SHOOTING_MAX_ITER {
            let (e, step): (Vec<f64>, Vec<f64>) = xs
                .par_iter()
                .zip(&ys)
                .map(|(&x, &y)| {
                    let (end, jac) = self.endpoint_sensitivity(x)?;
                    // damped inverse: points at the fringe that the strip
                    // barely touches must not receive huge delays
                    let step = (end - y) * jac / (jac * jac + 0.25);
                    // trust region: a delay beyond the smoothing width can
                    // capture points the linearization treats as free
                    let step = step.clamp(-0.25 * self.eps, 0.25 * self.eps);
                    Ok((end - y, step))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip();
            err = e.iter().fold(0.0, |a, v| a.max(v.abs()));
            if err < SHOOTING_TOL {
                return Ok(ShootingReport { iterations: it, endpoint_error: err });
            }
            if it == SHOOTING_MAX_ITER {
                break;
            }
            let mut k = 0;
            for i in 0..self.corr.len() {
                let y = self.y0 + i as f64 * self.hy;
                while k + 2 < ys.len() && ys[k + 1] < y {
                    k += 1;
                }
                let w = ((y - ys[k]) / (ys[k + 1] - ys[k])).clamp(0.0, 1.0);
                self.corr[i] -= SHOOTING_DAMPING * ((1.0 - w) * step[k] + w * step[k + 1]);
            }
            self.rebuild_g()?;
        }
        Err(Error::EndpointCorrectionDiverged { iterations: SHOOTING_MAX_ITER, error: err })
    }
}

/// Frames stored by [`build_line_path`].
pub const LINE_FRAMES: usize = 257;

/// Smoothed strip path with endpoint correction.
pub fn build_line_path(target: &Diffeo1D, alpha: f64, eps: f64, grid: &Grid1D) -> Result<VelocityPath> {
    Ok(build_line(target, alpha, eps, grid)?.0)
}

/// Like [`build_line_path`], also returning the construction and the
/// shooting report.
pub fn build_line(
    target: &Diffeo1D,
    alpha: f64,
    eps: f64,
    grid: &Grid1D,
) -> Result<(VelocityPath, LineConstruction, ShootingReport)> {
    let mut lc = LineConstruction::new(target.clone(), alpha, eps, *grid)?;
    let report = lc.correct_endpoint()?;
    Ok((lc.path(LINE_FRAMES)?, lc, report))
}

/// Angle at which the unsmoothed strip has width `delta`, found by
/// bisection in `kappa = 1 - cot(alpha)`.
pub fn alpha_for_strip(target: &Diffeo1D, delta: f64, grid: &Grid1D) -> Result<f64> {
    let eps = 2.0 * grid.spacing();
    let width = |kappa: f64| -> Result<f64> {
        let alpha = (1.0 / (1.0 - kappa)).atan();
        Ok(LineConstruction::new(target.clone(), alpha, eps, *grid)?.strip_width())
    };
    let disp = target.displacement();
    let h = grid.spacing();
    let n = disp.len();
    let min_slope = (0..n).map(|j| 1.0 + (disp[(j + 1) % n] - disp[j]) / h).fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi) = (0.0, 0.999 * min_slope.min(1.0));
    if width(hi)? < delta {
        return Err(Error::invalid(format!("strip width {delta} exceeds what the target admits")));
    }
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if width(m)? < delta {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok((1.0 / (1.0 - 0.5 * (lo + hi))).atan())
}

/// Mollifier width used for each point of a line sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsRule {
    Fixed(f64),
    /// `eps = r * strip width`, floored at two grid spacings.
    StripFraction(f64),
}

/// Path family swept by [`vanish_sweep`].
#[derive(Debug, Clone)]
pub enum Family {
    /// Rotation of the circle; parameters are scale counts `N`.
    Circle { target_shift: f64, grid: Grid1D },
    /// Strip construction toward `target`; parameters are angles `alpha`.
    Line { target: Diffeo1D, eps: EpsRule, grid: Grid1D },
}

/// One measured point of a sweep. Failed points carry the error message.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub length: Option<f64>,
    pub energy: Option<f64>,
    pub endpoint_error: Option<f64>,
    pub t_end: Option<f64>,
    pub strip_width: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub s: f64,
    pub variant: crate::norms::Variant,
    pub family: &'static str,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Whether every row succeeded and lengths strictly decrease in the
    /// order the parameters were given.
    pub fn strictly_decreasing(&self) -> bool {
        let lens: Option<Vec<f64>> = self.rows.iter().map(|r| r.length).collect();
        match lens {
            Some(l) if l.len() >= 2 => l.windows(2).all(|w| w[1] < w[0]),
            _ => false,
        }
    }

    /// Log-log slope of energy against `1/N` (circle) or of squared length
    /// against strip width (line), over the successful rows.
    pub fn slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter_map(|r| match self.family {
                "circle" => Some(((1.0 / r.param).ln(), r.energy?.ln())),
                _ => Some((r.strip_width?.ln(), (r.length? * r.length?).ln())),
            })
            .collect();
        loglog_slope(&pts)
    }
}

/// Least-squares slope of `(x, y)` pairs; `None` with fewer than two.
pub fn loglog_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Fit of `y = c1 delta + c2 delta^{1-2s}` with `c1, c2 >= 0` by relative
/// least squares; returns `(c1, c2, max relative residual)`.
pub fn fit_length_bound(deltas: &[f64], ys: &[f64], s: f64) -> Result<(f64, f64, f64)> {
    if deltas.len() != ys.len() || deltas.len() < 2 {
        return Err(Error::invalid("fit needs at least two matching points"));
    }
    if ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::invalid("fit needs positive values"));
    }
    let p = 1.0 - 2.0 * s;
    // rows weighted by 1/y
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&d, &y) in deltas.iter().zip(ys) {
        let (u, v) = (d / y, d.powf(p) / y);
        a11 += u * u;
        a12 += u * v;
        a22 += v * v;
        b1 += u;
        b2 += v;
    }
    let resid = |c1: f64, c2: f64| {
        deltas
            .iter()
            .zip(ys)
            .map(|(&d, &y)| ((c1 * d + c2 * d.powf(p)) - y).abs() / y)
            .fold(0.0, f64::max)
    };
    let det = a11 * a22 - a12 * a12;
    if det.abs() > 1e-300 {
        let c1 = (b1 * a22 - b2 * a12) / det;
        let c2 = (a11 * b2 - a12 * b1) / det;
        if c1 >= 0.0 && c2 >= 0.0 {
            return Ok((c1, c2, resid(c1, c2)));
        }
    }
    if a11 <= 0.0 || a22 <= 0.0 {
        return Err(Error::invalid("degenerate fit"));
    }
    // one constant pinned at zero
    let linear = (b1 / a11, 0.0);
    let power = (0.0, b2 / a22);
    let (r1, r2) = (resid(linear.0, linear.1), resid(power.0, power.1));
    Ok(if r1 <= r2 { (linear.0, linear.1, r1) } else { (power.0, power.1, r2) })
}

fn circle_row(spec: &MetricSpec, n_scales: usize, target_shift: f64, grid: &Grid1D) -> Result<SweepRow> {
    let (path, c) = build_circle_path(n_scales, target_shift, grid)?;
    let flow = integrate_flow(&path, circle_substeps(&path, &c))?;
    let err = flow
        .endpoint
        .displacement()
        .iter()
        .map(|d| (d - target_shift).abs())
        .fold(0.0, f64::max);
    Ok(SweepRow {
        param: n_scales as f64,
        length: Some(path_length(spec, &path)?),
        energy: Some(path_energy(spec, &path)?),
        endpoint_error: Some(err),
        t_end: Some(path.duration()),
        strip_width: None,
        error: None,
    })
}

fn line_row(spec: &MetricSpec, target: &Diffeo1D, alpha: f64, eps: EpsRule, grid: &Grid1D) -> Result<SweepRow> {
    let eps = match eps {
        EpsRule::Fixed(e) => e,
        EpsRule::StripFraction(r) => {
            let probe = LineConstruction::new(target.clone(), alpha, 2.0 * grid.spacing(), *grid)?;
            (r * probe.strip_width()).max(2.0 * grid.spacing())
        }
    };
    let (path, lc, _) = build_line(target, alpha, eps, grid)?;
    let err = crate::flow::sup_displacement(&lc.endpoint_map()?, target)?;
    Ok(SweepRow {
        param: alpha,
        length: Some(path_length(spec, &path)?),
        energy: Some(path_energy(spec, &path)?),
        endpoint_error: Some(err),
        t_end: Some(path.duration()),
        strip_width: Some(lc.strip_width()),
        error: None,
    })
}

/// Measures length, energy and endpoint error along a family of paths.
/// Points that cannot be built are reported with their error rather than
/// aborting the sweep.
pub fn vanish_sweep(spec: &MetricSpec, family: &Family, params: &[f64]) -> SweepTable {
    let rows = params
        .par_iter()
        .map(|&p| {
            let row = match family {
                Family::Circle { target_shift, grid } => {
                    if p < 1.0 || p.fract() != 0.0 {
                        Err(Error::invalid(format!("scale count must be a positive integer, got {p}")))
                    } else {
                        circle_row(spec, p as usize, *target_shift, grid)
                    }
                }
                Family::Line { target, eps, grid } => line_row(spec, target, p, *eps, grid),
            };
            row.unwrap_or_else(|e| SweepRow {
                param: p,
                length: None,
                energy: None,
                endpoint_error: None,
                t_end: None,
                strip_width: None,
                error: Some(e.to_string()),
            })
        })
        .collect();
    SweepTable {
        s: spec.s(),
        variant: spec.variant(),
        family: match family {
            Family::Circle { .. } => "circle",
            Family::Line { .. } => "line",
        },
        rows,
    }
}
