//! Special functions and radial Green's kernels of `A^{-1}` on `R^n`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::norms::{MetricSpec, Variant};
use crate::quad;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function by the Lanczos approximation, with reflection below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (PI * x).sin();
        if s == 0.0 {
            return f64::NAN;
        }
        return PI / (s * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Euler transform of partial sums by repeated averaging. Returns the
/// estimate and its change when the window is shifted by one.
fn euler_limit(sums: &[f64]) -> (f64, f64) {
    let average = |s: &[f64]| {
        let mut row = s.to_vec();
        while row.len() > 1 {
            row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        }
        row[0]
    };
    let a = average(&sums[1..]);
    let b = average(&sums[..sums.len() - 1]);
    (a, (a - b).abs())
}

/// Integral of `f` over `[0, inf)` where `f` changes sign near each of the
/// `breaks`: head by adaptive quadrature, then alternating half-wave terms
/// summed with Euler acceleration.
fn oscillatory_tail<F: Fn(f64) -> f64>(f: &F, head: f64, breaks: &[f64]) -> (f64, f64) {
    let mut sums = Vec::with_capacity(breaks.len());
    let mut acc = head;
    for w in breaks.windows(2) {
        acc += quad::composite_legendre(&[w[0], w[1]]).iter().map(|&(x, wt)| wt * f(x)).sum::<f64>();
        sums.push(acc);
    }
    const SKIP: usize = 6;
    euler_limit(&sums[SKIP.min(sums.len() - 3)..])
}

/// Bessel function of the first kind,
/// `J_a(r) = (1/pi) int_0^pi cos(a t - r sin t) dt
///         - (sin(a pi)/pi) int_0^inf exp(-r sinh t - a t) dt`.
pub fn bessel_j(alpha: f64, r: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite() && alpha.is_finite()) {
        return Err(Error::invalid(format!("bessel_j needs finite r >= 0, got {r}")));
    }
    let panels = (r / 2.0).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=panels).map(|i| PI * i as f64 / panels as f64).collect();
    let first = quad::integrate_with_breaks(|t| (alpha * t - r * t.sin()).cos(), &breaks, 1e-14, 1e-13)? / PI;
    let sin_ap = if alpha.fract() == 0.0 { 0.0 } else { (alpha * PI).sin() };
    if sin_ap == 0.0 {
        return Ok(first);
    }
    let second = if r == 0.0 {
        if alpha <= 0.0 {
            return Err(Error::DomainError(format!("J_{alpha} is unbounded at 0")));
        }
        1.0 / alpha
    } else {
        // exponent reaches -60 well before the cut
        let expo = |t: f64| -r * t.sinh() - alpha * t;
        let mut cut = 1.0;
        while expo(cut) > -60.0 {
            cut *= 2.0;
        }
        let mut br = vec![0.0];
        if alpha < 0.0 {
            // interior maximum where r cosh t = -alpha
            let peak = (-alpha / r).max(1.0).acosh();
            if peak > 0.0 && peak < cut {
                br.push(peak);
            }
        }
        br.push(cut);
        quad::integrate_with_breaks(|t| expo(t).exp(), &br, 1e-15, 1e-13)?
    };
    Ok(first - sin_ap / PI * second)
}

/// Modified Bessel function of the second kind from
/// `K_nu(r) = Gamma(nu + 1/2) (2r)^nu / sqrt(pi) int_0^inf cos t / (t^2 + r^2)^{nu + 1/2} dt`,
/// valid for `nu > -1/2`.
pub fn bessel_k(nu: f64, r: f64) -> Result<f64> {
    if !(nu > -0.5) {
        return Err(Error::DomainError(format!("integral form of K_nu needs nu > -1/2, got {nu}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("bessel_k needs r > 0, got {r}")));
    }
    let p = nu + 0.5;
    let f = |t: f64| t.cos() * (t * t + r * r).powf(-p);
    let mut br = vec![0.0];
    let mut b = r;
    while b < 0.5 * PI {
        br.push(b);
        b *= 8.0;
    }
    br.push(0.5 * PI);
    let head = quad::integrate_with_breaks(f, &br, 0.0, 1e-14)?;
    let zeros: Vec<f64> = (0..=40).map(|k| (k as f64 + 0.5) * PI).collect();
    let (sum, change) = oscillatory_tail(&f, head, &zeros);
    let scale = gamma(p) * (2.0 * r).powf(nu) / PI.sqrt();
    if !(change * scale < 1e-11 * (scale * sum).abs().max(1.0)) {
        return Err(Error::QuadratureNonconvergent(format!("K_{nu}({r}): tail estimate moved by {}", change * scale)));
    }
    Ok(scale * sum)
}

/// Radial inverse transform
/// `|x|^{1-n/2} int_0^inf J_{n/2-1}(rho |x|) f(rho) rho^{n/2} d rho`
/// at `|x| = r`, in the unitary convention.
pub fn radial_inverse_ft(f: &dyn Fn(f64) -> f64, n: usize, r: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {r}")));
    }
    let nu = n as f64 / 2.0 - 1.0;
    let half = n as f64 / 2.0;
    let err = std::cell::RefCell::new(None);
    let integrand = |rho: f64| {
        if rho == 0.0 {
            return 0.0;
        }
        match bessel_j(nu, rho * r) {
            Ok(j) => j * f(rho) * rho.powf(half),
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    // approximate zeros of J_nu(rho r), asymptotically exact
    let first = ((1.0 + nu / 2.0 - 0.25) * PI / r).max(1e-12);
    let skip = 6 + (5.0 * r / PI).ceil() as usize;
    let zeros: Vec<f64> = (1..=skip + 30).map(|k| (k as f64 + nu / 2.0 - 0.25) * PI / r).collect();
    let mut hb = vec![0.0];
    if first > 1.0 {
        hb.push(1.0);
    }
    hb.push(first);
    let head = quad::integrate_with_breaks(&integrand, &hb, 1e-13, 1e-11);
    if let Some(e) = err.borrow_mut().take() {
        return Err(e);
    }
    let head = head?;
    let mut sums = Vec::with_capacity(zeros.len());
    let mut acc = head;
    for w in zeros.windows(2) {
        acc += quad::composite_legendre(&[w[0], w[1]]).iter().map(|&(x, wt)| wt * integrand(x)).sum::<f64>();
        sums.push(acc);
    }
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let (sum, change) = euler_limit(&sums[skip.min(sums.len() - 3)..]);
    let value = r.powf(1.0 - half) * sum;
    if !(change * r.powf(1.0 - half) < 1e-8 * value.abs().max(1.0)) {
        return Err(Error::SlowDecayWarning { estimate: value });
    }
    Ok(value)
}

/// Which representation a kernel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelForm {
    BesselK,
    OscillatoryIntegral,
}

/// Radial convolution kernel `k` with `A^{-1} m = k * m` on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialKernel {
    s: f64,
    n: usize,
    variant: Variant,
    form: KernelForm,
}

/// `(2 pi)^{-1/2}`: the factor turning the unitary transform of the symbol
/// into a convolution kernel, read off from the `s = 1`, `n = 1` closed form
/// `(1 - d^2)^{-1} = (1/2) e^{-|x|} *`.
pub fn convention_factor() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let r: f64 = 1.0;
        let transform = r.sqrt() * bessel_k(0.5, r).expect("K_1/2(1) converges");
        let c = 0.5 * (-r).exp() / transform;
        assert!((c - (2.0 * PI).powf(-0.5)).abs() < 1e-10, "convention factor drifted: {c}");
        c
    })
}

impl RadialKernel {
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn form(&self) -> KernelForm {
        self.form
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Kernel value at distance `r > 0`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!("kernel needs r > 0, got {r}")));
        }
        let c = convention_factor().powi(self.n as i32);
        let s = self.s;
        match self.form {
            KernelForm::BesselK => {
                let nu = s - self.n as f64 / 2.0;
                Ok(c * 2f64.powf(1.0 - s) * r.powf(nu) * bessel_k(nu, r)? / gamma(s))
            }
            KernelForm::OscillatoryIntegral => {
                let symbol: Box<dyn Fn(f64) -> f64> = match self.variant {
                    Variant::Hs => Box::new(move |rho: f64| (1.0 + rho * rho).powf(-s)),
                    _ => Box::new(move |rho: f64| 1.0 / (1.0 + rho.powf(2.0 * s))),
                };
                Ok(c * radial_inverse_ft(&*symbol, self.n, r)?)
            }
        }
    }

    /// The same kernel through the oscillatory integral, whichever form it
    /// normally uses.
    pub fn oscillatory(&self) -> RadialKernel {
        RadialKernel { form: KernelForm::OscillatoryIntegral, ..*self }
    }
}

/// Green's kernel of the inertia operator of `spec` on `R^n`. The Bessel-K
/// form is used for `H^s` when `s > (n-1)/4` and `s - n/2 > -1/2`; the
/// oscillatory integral otherwise and for `Hbar^s`.
pub fn greens_function(spec: &MetricSpec, n: usize) -> Result<RadialKernel> {
    if n == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let s = spec.s();
    if s <= 0.0 {
        return Err(Error::invalid("order zero inverse is the identity and has no kernel"));
    }
    let nf = n as f64;
    let form = match spec.variant() {
        Variant::Hs if s > (nf - 1.0) / 4.0 && s - nf / 2.0 > -0.5 => KernelForm::BesselK,
        Variant::Hs | Variant::HsBar => KernelForm::OscillatoryIntegral,
        Variant::Homogeneous => {
            return Err(Error::invalid("homogeneous symbols have no integrable inverse kernel"));
        }
    };
    Ok(RadialKernel { s, n, variant: spec.variant(), form })
}

/// `(k * m)(x)` on the line for `m` supported in `[a, b]`, by composite
/// Gauss-Legendre panels graded towards `x`.
pub fn convolve_compact(kernel: &RadialKernel, m: &dyn Fn(f64) -> f64, support: (f64, f64), x: f64) -> Result<f64> {
    let (a, b) = support;
    if !(b > a) {
        return Err(Error::invalid("empty support"));
    }
    let panels = ((b - a) / 0.25).ceil() as usize;
    let mut br: Vec<f64> = (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect();
    if x > a && x < b {
        br.push(x);
        for j in 2..=24 {
            let d = 2f64.powi(-j);
            br.extend([x - d, x + d].into_iter().filter(|&y| y > a && y < b));
        }
    }
    br.sort_by(f64::total_cmp);
    br.dedup();
    let mut total = 0.0;
    for (y, w) in quad::composite_legendre(&br) {
        let v = m(y);
        if v != 0.0 {
            total += w * v * kernel.eval((x - y).abs())?;
        }
    }
    Ok(total)
}
