use serde::{Deserialize, Serialize};

use super::sphere_area;

/// `C r^{−(N−1)/2} e^{−κ r} S(κ r)`, the decaying solution of `−Δw + κ²w = 0`
/// with `S` the first two terms of the Bessel-K asymptotic series (exact for N = 3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    #[serde(rename = "C")]
    pub amplitude: f64,
    pub rate: f64,
}

fn series(dim: usize) -> (f64, f64) {
    let nu = (dim as f64 - 2.0) / 2.0;
    let a = 4.0 * nu * nu;
    ((a - 1.0) / 8.0, (a - 1.0) * (a - 9.0) / 128.0)
}

impl TailModel {
    fn shape(&self, r: f64, dim: usize) -> (f64, f64) {
        let (a1, a2) = series(dim);
        let z = self.rate * r;
        let s = 1.0 + a1 / z + a2 / (z * z);
        let ds = -a1 / (z * z) - 2.0 * a2 / (z * z * z);
        let base = r.powf(-(dim as f64 - 1.0) / 2.0) * (-z).exp();
        let value = base * s;
        let deriv = base * (s * (-(dim as f64 - 1.0) / (2.0 * r) - self.rate) + ds * self.rate);
        (value, deriv)
    }

    pub fn eval(&self, r: f64, dim: usize) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        self.amplitude * self.shape(r, dim).0
    }

    pub fn derivative(&self, r: f64, dim: usize) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        self.amplitude * self.shape(r, dim).1
    }

    /// Tail of `x ↦ u(x/e^θ)`.
    pub fn rescaled(&self, theta: f64, dim: usize) -> Self {
        Self { amplitude: self.amplitude * (theta * (dim as f64 - 1.0) / 2.0).exp(), rate: self.rate * (-theta).exp() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { amplitude: self.amplitude * c, rate: self.rate }
    }

    /// Same rate, amplitude chosen so the model passes through `(r, value)`.
    pub fn refit(&self, r: f64, dim: usize, value: f64) -> Option<Self> {
        let s = self.shape(r, dim).0;
        (s.is_finite() && s > 0.0 && self.rate > 0.0).then(|| Self { amplitude: value / s, rate: self.rate })
    }

    /// `∫_{|x|>R} f(T, T') dx`, composite Simpson in `x = κ(r − R)` over 40 decay lengths.
    pub fn integral(&self, r_max: f64, dim: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
        if self.amplitude == 0.0 || !(self.rate > 0.0) {
            return 0.0;
        }
        const PANELS: usize = 2000;
        const SPAN: f64 = 40.0;
        let dx = SPAN / PANELS as f64;
        let area = sphere_area(dim);
        let mut acc = 0.0;
        for k in 0..=PANELS {
            let r = r_max + k as f64 * dx / self.rate;
            let c = if k == 0 || k == PANELS {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let v = f(self.eval(r, dim), self.derivative(r, dim));
            acc += c * v * r.powi(dim as i32 - 1);
        }
        area * acc * dx / (3.0 * self.rate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_dimensional_tail_is_yukawa() {
        let t = TailModel { amplitude: 2.0, rate: 1.5 };
        for r in [1.0, 4.0, 9.0] {
            assert!((t.eval(r, 3) - 2.0 * (-1.5 * r).exp() / r).abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_matches_differences() {
        let t = TailModel { amplitude: 1.0, rate: 0.7 };
        for dim in [2, 3, 4] {
            let r = 6.0;
            let h = 1e-5;
            let fd = (t.eval(r + h, dim) - t.eval(r - h, dim)) / (2.0 * h);
            assert!((fd - t.derivative(r, dim)).abs() < 1e-8 * fd.abs());
        }
    }

    #[test]
    fn rescaled_tail_is_dilated_tail() {
        let t = TailModel { amplitude: 1.3, rate: 1.1 };
        let theta = 0.4;
        let d = t.rescaled(theta, 2);
        for r in [5.0, 10.0] {
            let direct = t.eval(r * (-theta as f64).exp(), 2);
            assert!((d.eval(r, 2) - direct).abs() < 1e-14 * direct);
        }
    }

    #[test]
    fn exponential_integral() {
        // ∫_{|x|>R} (e^{−r}/r)² dx in ℝ³ = 4π e^{−2R}/2
        let t = TailModel { amplitude: 1.0, rate: 1.0 };
        let v = t.integral(5.0, 3, |u, _| u * u);
        let exact = 2.0 * std::f64::consts::PI * (-10.0f64).exp();
        assert!((v - exact).abs() < 1e-7 * exact);
    }
}
