//! Piecewise cubic Hermite interpolation on uniform periodic grids.

/// Cubic Hermite on the unit cell: values `p0, p1`, slopes `m0, m1`
/// already multiplied by the cell width.
#[inline]
pub fn hermite(p0: f64, p1: f64, m0: f64, m1: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1
}

/// Derivative in `t` of [`hermite`].
#[inline]
pub fn hermite_dt(p0: f64, p1: f64, m0: f64, m1: f64, t: f64) -> f64 {
    let t2 = t * t;
    (6.0 * t2 - 6.0 * t) * (p0 - p1) + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (3.0 * t2 - 2.0 * t) * m1
}

/// Fourth-order centered finite-difference derivative of periodic samples.
pub fn fd4_slopes(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let at = |j: isize| values[j.rem_euclid(n as isize) as usize];
    (0..n as isize)
        .map(|j| (8.0 * (at(j + 1) - at(j - 1)) - (at(j + 2) - at(j - 2))) / (12.0 * h))
        .collect()
}

/// Periodic cubic Hermite interpolant with fourth-order slopes; accurate to
/// `O(h^4)` on smooth data.
#[derive(Debug, Clone)]
pub struct PeriodicCubic {
    h: f64,
    period: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl PeriodicCubic {
    pub fn new(values: &[f64], period: f64) -> Self {
        let h = period / values.len() as f64;
        PeriodicCubic { h, period, values: values.to_vec(), slopes: fd4_slopes(values, h) }
    }

    /// Cell index and local coordinate of `x`.
    #[inline]
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.values.len();
        let r = x.rem_euclid(self.period);
        let pos = r / self.h;
        let j = (pos.floor() as usize).min(n - 1);
        (j, (pos - j as f64).clamp(0.0, 1.0))
    }

    #[inline]
    pub fn eval_cell(&self, j: usize, t: f64) -> f64 {
        let k = if j + 1 == self.values.len() { 0 } else { j + 1 };
        hermite(
            self.values[j],
            self.values[k],
            self.slopes[j] * self.h,
            self.slopes[k] * self.h,
            t,
        )
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let (j, t) = self.locate(x);
        self.eval_cell(j, t)
    }
}

/// Fritsch-Carlson limiting: clips each slope into `[0, 3 min(secants)]`
/// around it, which keeps every cell of the Hermite interpolant monotone
/// when all secants are positive.
pub fn limit_monotone(slopes: &mut [f64], secants: &[f64]) {
    let n = slopes.len();
    for j in 0..n {
        let left = secants[(j + n - 1) % n];
        let right = secants[j];
        let cap = 3.0 * left.min(right);
        slopes[j] = slopes[j].clamp(0.0, cap.max(0.0));
    }
}
