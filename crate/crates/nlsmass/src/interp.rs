//! Finite differences and cubic Hermite interpolation helpers.

use crate::error::{Error, Result};

/// Fourth-order finite-difference derivative on a uniform grid; one-sided
/// stencils at both ends.
pub fn fd4(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    assert!(n >= 5, "fd4 needs at least five samples");
    let c = 1.0 / (12.0 * h);
    let mut d = vec![0.0; n];
    d[0] = c * (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]);
    d[1] = c * (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]);
    for i in 2..n - 2 {
        d[i] = c * (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]);
    }
    let k = n - 1;
    d[k - 1] = -c * (-3.0 * y[k] - 10.0 * y[k - 1] + 18.0 * y[k - 2] - 6.0 * y[k - 3] + y[k - 4]);
    d[k] = -c * (-25.0 * y[k] + 48.0 * y[k - 1] - 36.0 * y[k - 2] + 16.0 * y[k - 3] - 3.0 * y[k - 4]);
    d
}

/// Cubic Hermite basis on one interval of width `h`, local coordinate `t ∈ [0,1]`.
#[inline]
pub fn hermite(y0: f64, y1: f64, m0: f64, m1: f64, h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let s = 1.0 - t;
    let s2 = s * s;
    (1.0 + 2.0 * t) * s2 * y0 + t * s2 * h * m0 + t2 * (3.0 - 2.0 * t) * y1 + t2 * (t - 1.0) * h * m1
}

/// Fritsch–Carlson limiter applied in place to slopes on a uniform grid.
pub fn limit_slopes(y: &[f64], h: f64, m: &mut [f64]) {
    for k in 0..y.len().saturating_sub(1) {
        let delta = (y[k + 1] - y[k]) / h;
        if delta == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let mut a = m[k] / delta;
        let mut b = m[k + 1] / delta;
        if a < 0.0 {
            m[k] = 0.0;
            a = 0.0;
        }
        if b < 0.0 {
            m[k + 1] = 0.0;
            b = 0.0;
        }
        let r2 = a * a + b * b;
        if r2 > 9.0 {
            let tau = 3.0 / r2.sqrt();
            m[k] = tau * a * delta;
            m[k + 1] = tau * b * delta;
        }
    }
}

/// Monotone piecewise-cubic interpolant through scattered points, with an
/// exact running integral.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    cumulative: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Domain("monotone cubic needs at least two (x, y) pairs".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite interpolation data".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("interpolation abscissae must be strictly increasing".into()));
        }
        let secant: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k])).collect();
        let mut m = vec![0.0; n];
        m[0] = secant[0];
        m[n - 1] = secant[n - 2];
        for k in 1..n - 1 {
            m[k] = if secant[k - 1] * secant[k] <= 0.0 {
                0.0
            } else {
                // weighted harmonic mean (Fritsch–Butland) keeps monotonicity on uneven spacing
                let h0 = x[k] - x[k - 1];
                let h1 = x[k + 1] - x[k];
                let w0 = 2.0 * h1 + h0;
                let w1 = h1 + 2.0 * h0;
                (w0 + w1) / (w0 / secant[k - 1] + w1 / secant[k])
            };
        }
        let mut cumulative = vec![0.0; n];
        for k in 0..n - 1 {
            let h = x[k + 1] - x[k];
            cumulative[k + 1] = cumulative[k] + 0.5 * h * (y[k] + y[k + 1]) + h * h * (m[k] - m[k + 1]) / 12.0;
        }
        Ok(Self { x, y, m, cumulative })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn locate(&self, s: f64) -> Option<usize> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&s) {
            return None;
        }
        let k = self.x.partition_point(|&v| v <= s);
        Some(k.saturating_sub(1).min(self.x.len() - 2))
    }

    /// Value at `s`, or `None` outside the tabulated range.
    pub fn eval(&self, s: f64) -> Option<f64> {
        let k = self.locate(s)?;
        let h = self.x[k + 1] - self.x[k];
        let t = (s - self.x[k]) / h;
        Some(hermite(self.y[k], self.y[k + 1], self.m[k], self.m[k + 1], h, t))
    }

    /// ∫ from the first abscissa to `s`.
    pub fn integral(&self, s: f64) -> Option<f64> {
        let k = self.locate(s)?;
        let h = self.x[k + 1] - self.x[k];
        let t = (s - self.x[k]) / h;
        let (y0, y1, m0, m1) = (self.y[k], self.y[k + 1], self.m[k], self.m[k + 1]);
        // antiderivatives of the Hermite basis functions on [0, t]
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let a00 = t - t3 + 0.5 * t4;
        let a10 = 0.5 * t2 - 2.0 * t3 / 3.0 + 0.25 * t4;
        let a01 = t3 - 0.5 * t4;
        let a11 = 0.25 * t4 - t3 / 3.0;
        Some(self.cumulative[k] + h * (a00 * y0 + a10 * h * m0 + a01 * y1 + a11 * h * m1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd4_is_exact_on_quartics() {
        let h = 0.1;
        let y: Vec<f64> = (0..20).map(|i| (i as f64 * h).powi(4) - 3.0 * (i as f64 * h)).collect();
        let d = fd4(&y, h);
        for (i, di) in d.iter().enumerate() {
            let x = i as f64 * h;
            assert!((di - (4.0 * x.powi(3) - 3.0)).abs() < 1e-10, "i={i}");
        }
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |x: f64| x * x * x - x;
        let df = |x: f64| 3.0 * x * x - 1.0;
        let (a, b) = (0.3, 0.8);
        for t in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let v = hermite(f(a), f(b), df(a), df(b), b - a, t);
            assert!((v - f(a + t * (b - a))).abs() < 1e-14);
        }
    }

    #[test]
    fn monotone_cubic_integral_matches_trapezoid_limit() {
        let x: Vec<f64> = (0..=200).map(|i| i as f64 * 0.01).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let mc = MonotoneCubic::new(x, y).unwrap();
        assert!((mc.integral(2.0).unwrap() - 8.0 / 3.0).abs() < 1e-5);
        assert!((mc.eval(1.234).unwrap() - 1.234f64.powi(2)).abs() < 1e-5);
        assert!(mc.eval(2.5).is_none());
    }

    #[test]
    fn monotone_cubic_has_no_overshoot_on_steps() {
        let x = vec![0.0, 1.0, 2.0, 3.0];
        let y = vec![0.0, 0.0, 1.0, 1.0];
        let mc = MonotoneCubic::new(x, y).unwrap();
        for i in 0..=300 {
            let v = mc.eval(i as f64 * 0.01).unwrap();
            assert!((-1e-15..=1.0 + 1e-15).contains(&v));
        }
    }
}
