//! Adaptive Dormand-Prince 5(4) integration for small fixed-size systems.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            initial_step: 1e-3,
            max_step: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

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
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_LOW: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl Dopri5 {
    /// Integrates `y' = f(t, y)` from `(t0, y0)` until `stop(t, y)` returns
    /// true after an accepted step. Returns every accepted state, starting
    /// with the initial one.
    pub fn integrate<const N: usize, F, S>(&self, f: F, t0: f64, y0: [f64; N], mut stop: S) -> Result<Vec<(f64, [f64; N])>>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        S: FnMut(f64, &[f64; N]) -> bool,
    {
        let mut out = Vec::new();
        out.push((t0, y0));
        let (mut t, mut y) = (t0, y0);
        let mut h = self.initial_step;
        let mut k = [[0.0; N]; 7];
        k[0] = f(t, &y);
        for _ in 0..self.max_steps {
            h = h.min(self.max_step);
            for stage in 1..7 {
                let mut ys = y;
                for (i, v) in ys.iter_mut().enumerate() {
                    for (j, kj) in k.iter().enumerate().take(stage) {
                        *v += h * A[stage][j] * kj[i];
                    }
                }
                k[stage] = f(t + C[stage] * h, &ys);
            }
            let mut y_new = y;
            let mut err: f64 = 0.0;
            for i in 0..N {
                let mut hi = 0.0;
                let mut lo = 0.0;
                for s in 0..7 {
                    hi += B[s] * k[s][i];
                    lo += B_LOW[s] * k[s][i];
                }
                y_new[i] = y[i] + h * hi;
                let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((h * (hi - lo)).abs() / scale);
            }
            if !err.is_finite() {
                return Err(Error::IntegrationFailure(format!("non-finite error estimate at t = {t}")));
            }
            if err <= 1.0 {
                t += h;
                y = y_new;
                // first-same-as-last: stage 7 is f at the new point
                k[0] = k[6];
                out.push((t, y));
                if stop(t, &y) {
                    return Ok(out);
                }
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0) };
            h *= factor;
            if h <= f64::EPSILON * t.abs().max(1.0) {
                return Err(Error::IntegrationFailure(format!("step size underflow at t = {t}")));
            }
        }
        Err(Error::IntegrationFailure(format!(
            "no stop after {} steps (t = {t})",
            self.max_steps
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let sol = Dopri5::default()
            .integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], |t, _| t >= 2.0 * core::f64::consts::PI)
            .unwrap();
        let (t, y) = *sol.last().unwrap();
        assert!((y[0] - libm::cos(t)).abs() < 1e-10);
        assert!((y[1] + libm::sin(t)).abs() < 1e-10);
    }

    #[test]
    fn runaway_reports_failure() {
        let r = Dopri5 {
            max_steps: 10,
            ..Dopri5::default()
        }
        .integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], |_, _| false);
        assert!(matches!(r, Err(Error::IntegrationFailure(_))));
    }
}
