//! Discrete Fourier machinery on uniform periodic grids.
//!
//! Transforms use the unitary normalization `c_k = n^{-1/2} sum_j f_j e^{-2 pi i jk/n}`,
//! so the discrete Parseval identity holds without extra factors. Every
//! operator in the crate that acts diagonally in frequency is a
//! [`MultiplierOp`]: a symbol sampled on the grid wavenumbers.

use crate::error::{Error, Result};
use crate::norms::{MetricSpec, Variant};
use crate::quad;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Uniform periodic sampling of a circle of circumference `length`, or of a
/// periodic window standing in for the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n_points: usize,
    length: f64,
}

impl Grid1D {
    pub fn new(n_points: usize, length: f64) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::invalid(format!("grid needs at least 2 points, got {n_points}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid(format!("grid length must be positive, got {length}")));
        }
        Ok(Grid1D { n_points, length })
    }

    /// The standard circle of circumference 2 pi.
    pub fn circle(n_points: usize) -> Result<Self> {
        Self::new(n_points, 2.0 * PI)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n_points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.length / self.n_points as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.node(j)).collect()
    }

    /// Signed mode index of FFT slot `k`, in `-n/2+1 ..= n/2`.
    pub fn mode(&self, k: usize) -> i64 {
        let n = self.n_points as i64;
        let k = k as i64;
        if k <= n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Angular wavenumber `2 pi k / L` of FFT slot `k`.
    pub fn wavenumber(&self, k: usize) -> f64 {
        2.0 * PI * self.mode(k) as f64 / self.length
    }

    /// Wavenumbers in FFT slot order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.wavenumber(k)).collect()
    }

    /// FFT slot of the unpaired Nyquist mode, if `n` is even.
    pub fn nyquist(&self) -> Option<usize> {
        (self.n_points % 2 == 0).then_some(self.n_points / 2)
    }

    /// Reduces `x` into `[0, L)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let r = x.rem_euclid(self.length);
        if r >= self.length {
            0.0
        } else {
            r
        }
    }

    /// Signed periodic offset of `x` from the origin, in `[-L/2, L/2)`.
    pub fn centered(&self, x: f64) -> f64 {
        let r = self.wrap(x + 0.5 * self.length);
        r - 0.5 * self.length
    }

    pub(crate) fn same(&self, other: &Grid1D) -> bool {
        self.n_points == other.n_points && self.length == other.length
    }
}

/// Real samples of a function at the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::invalid(format!(
                "field has {} values for {} grid points",
                values.len(),
                grid.n_points()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite field value at node {j}")));
        }
        Ok(Field { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Field { grid, values }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Field { grid, values: vec![0.0; grid.n_points()] }
    }

    pub(crate) fn from_raw(grid: Grid1D, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        Field { grid, values }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trapezoid (= rectangle, on a periodic grid) approximation of the integral.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.spacing()
    }

    /// `L^2` pairing `int f g dx` by the periodic trapezoid rule.
    pub fn dot(&self, other: &Field) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.grid.spacing())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.check_grid(other)?;
        Ok(Field::from_raw(
            self.grid,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }

    /// Circular shift by `k` nodes: `out[j] = self[j - k]`.
    pub fn shift_nodes(&self, k: i64) -> Field {
        let n = self.values.len() as i64;
        let values = (0..n).map(|j| self.values[(j - k).rem_euclid(n) as usize]).collect();
        Field::from_raw(self.grid, values)
    }

    pub(crate) fn check_grid(&self, other: &Field) -> Result<()> {
        if self.grid.same(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Discrete Fourier coefficients of a field, in FFT slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid1D,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid1D, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n_points() {
            return Err(Error::invalid("coefficient count does not match the grid"));
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Largest violation of `c_{-k} = conj(c_k)`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.coeffs.len();
        (0..n)
            .map(|k| (self.coeffs[k] - self.coeffs[(n - k) % n].conj()).norm())
            .fold(0.0, f64::max)
    }
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    });
    plan.process(buf);
}

/// Unitary forward transform.
pub fn forward(field: &Field) -> SpectralField {
    let n = field.values.len();
    let mut buf: Vec<Complex64> = field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf, false);
    let scale = 1.0 / (n as f64).sqrt();
    buf.iter_mut().for_each(|c| *c *= scale);
    SpectralField { grid: field.grid, coeffs: buf }
}

/// Unitary inverse transform; rejects coefficient sets that cannot come from
/// a real field.
pub fn inverse(sf: &SpectralField) -> Result<Field> {
    let peak = sf.coeffs.iter().fold(1.0f64, |m, c| m.max(c.norm()));
    let defect = sf.hermitian_defect();
    if defect > 1e-10 * peak {
        return Err(Error::NonHermitianInput { defect });
    }
    Ok(inverse_unchecked(sf))
}

pub(crate) fn inverse_unchecked(sf: &SpectralField) -> Field {
    let n = sf.coeffs.len();
    let mut buf = sf.coeffs.clone();
    fft_in_place(&mut buf, true);
    let scale = 1.0 / (n as f64).sqrt();
    Field::from_raw(sf.grid, buf.iter().map(|c| c.re * scale).collect())
}

/// Whether a symbol is even (`sigma(-xi) = conj sigma(xi)` with real
/// values) or odd; odd symbols drop the unpaired Nyquist mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Value a multiplier takes at `xi = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroMode {
    /// Evaluate the symbol there like anywhere else.
    Regular,
    /// Symbol is singular or ambiguous at zero; use this value instead.
    Declared(Complex64),
    /// Symbol is singular at zero and nothing was declared.
    Undeclared,
}

type Symbol = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Fourier multiplier `F^{-1} sigma(xi) F`.
#[derive(Clone)]
pub struct MultiplierOp {
    label: String,
    symbol: Symbol,
    zero: ZeroMode,
    parity: Parity,
    zero_mean_input: bool,
}

impl fmt::Debug for MultiplierOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierOp")
            .field("label", &self.label)
            .field("zero", &self.zero)
            .field("parity", &self.parity)
            .field("zero_mean_input", &self.zero_mean_input)
            .finish()
    }
}

impl MultiplierOp {
    pub fn real(label: impl Into<String>, symbol: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        MultiplierOp {
            label: label.into(),
            symbol: Arc::new(move |xi| Complex64::new(symbol(xi), 0.0)),
            zero: ZeroMode::Regular,
            parity: Parity::Even,
            zero_mean_input: false,
        }
    }

    pub fn complex(
        label: impl Into<String>,
        parity: Parity,
        symbol: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        MultiplierOp {
            label: label.into(),
            symbol: Arc::new(symbol),
            zero: ZeroMode::Regular,
            parity,
            zero_mean_input: false,
        }
    }

    pub fn with_zero(mut self, zero: ZeroMode) -> Self {
        self.zero = zero;
        self
    }

    /// Marks the operator as defined only on zero-mean fields.
    pub fn requiring_zero_mean(mut self) -> Self {
        self.zero_mean_input = true;
        self
    }

    pub fn identity() -> Self {
        Self::real("identity", |_| 1.0)
    }

    /// `d/dx`, symbol `i xi`.
    pub fn derivative() -> Self {
        Self::complex("d/dx", Parity::Odd, |xi| Complex64::new(0.0, xi))
    }

    /// Periodic Hilbert transform, symbol `-i sgn(xi)`; annihilates the mean.
    pub fn hilbert() -> Self {
        Self::complex("hilbert", Parity::Odd, |xi| Complex64::new(0.0, -xi.signum()))
            .with_zero(ZeroMode::Declared(Complex64::new(0.0, 0.0)))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// The symbol value used at wavenumber `xi`.
    pub fn symbol_at(&self, xi: f64) -> Result<Complex64> {
        if xi == 0.0 {
            return match self.zero {
                ZeroMode::Regular => Ok((self.symbol)(0.0)),
                ZeroMode::Declared(v) => Ok(v),
                ZeroMode::Undeclared => Err(Error::SymbolSingularAtZero { label: self.label.clone() }),
            };
        }
        Ok((self.symbol)(xi))
    }

    /// Symbol sampled on the FFT slots of `grid`, Nyquist handled by parity.
    pub fn sampled(&self, grid: &Grid1D) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(grid.n_points());
        for k in 0..grid.n_points() {
            let v = self.symbol_at(grid.wavenumber(k))?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::invalid(format!(
                    "symbol `{}` is not finite at xi = {}",
                    self.label,
                    grid.wavenumber(k)
                )));
            }
            out.push(v);
        }
        if let Some(k) = grid.nyquist() {
            out[k] = match self.parity {
                Parity::Odd => Complex64::new(0.0, 0.0),
                Parity::Even => Complex64::new(out[k].re, 0.0),
            };
        }
        Ok(out)
    }

    /// Multiplies coefficients in place.
    pub fn apply_spectral(&self, sf: &mut SpectralField) -> Result<()> {
        let sym = self.sampled(&sf.grid)?;
        sf.coeffs.iter_mut().zip(sym).for_each(|(c, s)| *c *= s);
        Ok(())
    }
}

/// Mean tolerance below which a field counts as zero-mean for homogeneous
/// operators.
pub const ZERO_MEAN_TOL: f64 = 1e-10;

/// Applies `op` to `field` through the transform.
pub fn apply_multiplier(op: &MultiplierOp, field: &Field) -> Result<Field> {
    if op.zero_mean_input {
        let mean = field.mean();
        if mean.abs() > ZERO_MEAN_TOL {
            return Err(Error::HomogeneousNonzeroMean { mean });
        }
    }
    let mut sf = forward(field);
    op.apply_spectral(&mut sf)?;
    Ok(inverse_unchecked(&sf))
}

pub fn derivative(field: &Field) -> Field {
    apply_multiplier(&MultiplierOp::derivative(), field).expect("derivative symbol is regular")
}

pub fn hilbert(field: &Field) -> Field {
    apply_multiplier(&MultiplierOp::hilbert(), field).expect("hilbert symbol is declared at zero")
}

/// Zeroes every mode with `|k| > kmax` (the 2/3 rule uses `kmax = n/3`).
pub fn truncate_modes(field: &Field, kmax: usize) -> Field {
    let mut sf = forward(field);
    let g = sf.grid;
    for (k, c) in sf.coeffs.iter_mut().enumerate() {
        if g.mode(k).unsigned_abs() as usize > kmax {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    inverse_unchecked(&sf)
}

/// Symbol of the inertia operator `A` for `spec`.
pub fn inertia_operator(spec: &MetricSpec) -> MultiplierOp {
    let s = spec.s();
    match spec.variant() {
        Variant::Hs => MultiplierOp::real(format!("A_s(s={s})"), move |xi| (1.0 + xi * xi).powf(s)),
        Variant::HsBar => MultiplierOp::real(format!("Abar_s(s={s})"), move |xi| hsbar_symbol(s, xi)),
        Variant::Homogeneous => MultiplierOp::real(format!("Lambda^2s(s={s})"), move |xi| xi.abs().powf(2.0 * s))
            .with_zero(ZeroMode::Declared(Complex64::new(0.0, 0.0))),
    }
}

/// Inverse of [`inertia_operator`]; the homogeneous inverse lives on
/// zero-mean fields and sends them to zero-mean fields.
pub fn inertia_inverse(spec: &MetricSpec) -> MultiplierOp {
    let s = spec.s();
    match spec.variant() {
        Variant::Hs => MultiplierOp::real(format!("A_s^-1(s={s})"), move |xi| (1.0 + xi * xi).powf(-s)),
        Variant::HsBar => MultiplierOp::real(format!("Abar_s^-1(s={s})"), move |xi| 1.0 / hsbar_symbol(s, xi)),
        Variant::Homogeneous => MultiplierOp::real(format!("Lambda^-2s(s={s})"), move |xi| xi.abs().powf(-2.0 * s))
            .with_zero(ZeroMode::Declared(Complex64::new(0.0, 0.0)))
            .requiring_zero_mean(),
    }
}

/// `1 + |xi|^{2s}`, with the order-zero operator taken to be the identity.
pub(crate) fn hsbar_symbol(s: f64, xi: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        1.0 + xi.abs().powf(2.0 * s)
    }
}

/// Unit-peak smooth bump `exp(1 - 1/(1 - x^2))` on `(-1, 1)`.
pub fn bump(x: f64) -> f64 {
    let y2 = x * x;
    if y2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - y2)).exp()
    }
}

/// The smoothing kernel `G_1 = bump / int bump` together with its
/// cumulative distribution, tabulated once.
pub struct Mollifier {
    mass: f64,
    cdf_table: Vec<f64>,
}

const CDF_CELLS: usize = 4096;

impl Mollifier {
    pub fn get() -> &'static Mollifier {
        static M: OnceLock<Mollifier> = OnceLock::new();
        M.get_or_init(|| {
            let h = 2.0 / CDF_CELLS as f64;
            let mut cdf_table = Vec::with_capacity(CDF_CELLS + 1);
            let mut acc = 0.0;
            cdf_table.push(0.0);
            for i in 0..CDF_CELLS {
                let a = -1.0 + i as f64 * h;
                acc += quad::integrate(bump, a, a + h, 1e-17, 1e-14).expect("bump is smooth");
                cdf_table.push(acc);
            }
            let mass = acc;
            cdf_table.iter_mut().for_each(|v| *v /= mass);
            Mollifier { mass, cdf_table }
        })
    }

    /// `int bump` over the real line.
    pub fn bump_mass(&self) -> f64 {
        self.mass
    }

    /// Unit-mass kernel `G_1`.
    pub fn density(&self, x: f64) -> f64 {
        bump(x) / self.mass
    }

    /// `G_eps(x) = G_1(x / eps) / eps`.
    pub fn scaled(&self, x: f64, eps: f64) -> f64 {
        self.density(x / eps) / eps
    }

    /// `int_{-inf}^x G_1`, by cubic Hermite interpolation of the table with
    /// exact end slopes.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= -1.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let h = 2.0 / CDF_CELLS as f64;
        let pos = (x + 1.0) / h;
        let i = (pos.floor() as usize).min(CDF_CELLS - 1);
        let t = pos - i as f64;
        let x0 = -1.0 + i as f64 * h;
        let (p0, p1) = (self.cdf_table[i], self.cdf_table[i + 1]);
        let (m0, m1) = (self.density(x0) * h, self.density(x0 + h) * h);
        crate::interp::hermite(p0, p1, m0, m1, t)
    }
}

/// Convolution with `G_eps` on the periodic grid.
///
/// The kernel is sampled at the nodes and renormalized to unit discrete
/// mass, so the mean of the field is preserved exactly.
pub fn mollify(field: &Field, eps: f64) -> Result<Field> {
    let grid = field.grid;
    let min = 2.0 * grid.spacing();
    if !(eps >= min) {
        return Err(Error::KernelUnresolved { eps, min });
    }
    if eps >= 0.5 * grid.length() {
        return Err(Error::invalid(format!("mollifier width {eps} exceeds half the period")));
    }
    let m = Mollifier::get();
    let n = grid.n_points();
    let dx = grid.spacing();
    let mut kernel: Vec<f64> = (0..n).map(|j| m.scaled(grid.centered(grid.node(j)), eps)).collect();
    let mass: f64 = kernel.iter().sum::<f64>() * dx;
    kernel.iter_mut().for_each(|k| *k /= mass);

    let mut fk: Vec<Complex64> = field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut kk: Vec<Complex64> = kernel.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut fk, false);
    fft_in_place(&mut kk, false);
    fk.iter_mut().zip(&kk).for_each(|(a, b)| *a *= b);
    fft_in_place(&mut fk, true);
    let scale = dx / n as f64;
    Ok(Field::from_raw(grid, fk.iter().map(|c| c.re * scale).collect()))
}
