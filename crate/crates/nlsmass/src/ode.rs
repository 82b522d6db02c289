//! Dormand–Prince 5(4) for two-component first-order systems.

use crate::error::{Error, Result};

pub type State = [f64; 2];

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights are the last row of A; these are (5th − 4th)
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Where an integration run ended.
#[derive(Debug, Clone, Copy)]
pub struct Stop {
    pub r: f64,
    pub y: State,
    /// The step callback asked to stop before the target was reached.
    pub interrupted: bool,
}

/// Adaptive stepper; remembers its step size between calls.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    h: f64,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64, initial_step: f64) -> Self {
        Self { rtol, atol, h: initial_step }
    }

    /// Integrates from `(r, y)` to exactly `r_end`, calling `on_step` after each
    /// accepted step; `on_step` returning `false` stops the run there.
    pub fn run(
        &mut self,
        f: &impl Fn(f64, &State) -> State,
        mut r: f64,
        mut y: State,
        r_end: f64,
        mut on_step: impl FnMut(f64, &State) -> bool,
    ) -> Result<Stop> {
        let mut k = [[0.0; 2]; 7];
        k[0] = f(r, &y);
        while r < r_end {
            let last = self.h >= r_end - r;
            let h = if last { r_end - r } else { self.h };
            if h <= 1e-14 * (1.0 + r.abs()) && !last {
                return Err(Error::Integrator(format!("step size underflow at r = {r}")));
            }
            for s in 1..7 {
                let mut yi = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        yi[0] += h * a * kj[0];
                        yi[1] += h * a * kj[1];
                    }
                }
                k[s] = f(r + C[s] * h, &yi);
            }
            let mut y_new = y;
            for (j, kj) in k.iter().enumerate().take(6) {
                y_new[0] += h * A[6][j] * kj[0];
                y_new[1] += h * A[6][j] * kj[1];
            }
            // FSAL: k[6] was evaluated at y_new
            let mut err: f64 = 0.0;
            for i in 0..2 {
                let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() {
                self.h = 0.25 * h;
                if self.h <= 1e-14 * (1.0 + r.abs()) {
                    return Err(Error::Integrator(format!("non-finite state near r = {r}")));
                }
                continue;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                r = if last { r_end } else { r + h };
                y = y_new;
                k[0] = k[6];
                if !last {
                    self.h = h * factor;
                }
                if !on_step(r, &y) {
                    return Ok(Stop { r, y, interrupted: true });
                }
            } else {
                self.h = h * factor.min(1.0);
            }
        }
        Ok(Stop { r, y, interrupted: false })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_is_accurate() {
        let f = |_r: f64, y: &State| [y[1], -y[0]];
        let mut s = Dopri5::new(1e-12, 1e-14, 0.1);
        let end = s.run(&f, 0.0, [1.0, 0.0], 10.0, |_, _| true).unwrap();
        assert!((end.y[0] - 10f64.cos()).abs() < 1e-10);
        assert!((end.y[1] + 10f64.sin()).abs() < 1e-10);
        assert_eq!(end.r, 10.0);
    }

    #[test]
    fn callback_interrupts() {
        let f = |_r: f64, y: &State| [y[1], -y[0]];
        let mut s = Dopri5::new(1e-10, 1e-12, 0.1);
        let end = s.run(&f, 0.0, [1.0, 0.0], 10.0, |_, y| y[0] > 0.0).unwrap();
        assert!(end.interrupted);
        assert!(end.y[0] <= 0.0 && end.r > 1.5 && end.r < 2.0);
    }

    #[test]
    fn clamped_segments_match_one_run() {
        let f = |r: f64, y: &State| [y[1], -y[0] - y[1] / (1.0 + r)];
        let mut a = Dopri5::new(1e-11, 1e-14, 0.05);
        let whole = a.run(&f, 0.0, [1.0, 0.0], 4.0, |_, _| true).unwrap();
        let mut b = Dopri5::new(1e-11, 1e-14, 0.05);
        let mut y = [1.0, 0.0];
        for i in 0..40 {
            y = b.run(&f, i as f64 * 0.1, y, (i + 1) as f64 * 0.1, |_, _| true).unwrap().y;
        }
        assert!((whole.y[0] - y[0]).abs() < 1e-9);
    }
}
