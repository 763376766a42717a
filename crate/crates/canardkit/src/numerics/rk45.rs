//! Embedded Dormand-Prince 5(4) stepper with adaptive step control.

use super::{NumericError, NumericSystem};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Error weights: fifth-order minus embedded fourth-order solution.
const E1: f64 = B1 - 5179.0 / 57600.0;
const E3: f64 = B3 - 7571.0 / 16695.0;
const E4: f64 = B4 - 393.0 / 640.0;
const E5: f64 = B5 + 92097.0 / 339200.0;
const E6: f64 = B6 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;

const MIN_STEP: f64 = 1e-14;
pub const DEFAULT_MAX_STEP: f64 = 0.1;

pub struct Stepper<'a> {
    sys: &'a NumericSystem,
    pub tol: f64,
    pub max_step: f64,
    pub t: f64,
    pub y: [f64; 2],
    /// Derivative at the current point (FSAL cache).
    pub dy: [f64; 2],
    h: f64,
    pub accepted: usize,
    pub rejected: usize,
}

pub struct Step {
    pub t0: f64,
    pub y0: [f64; 2],
    pub dy0: [f64; 2],
    pub t1: f64,
    pub y1: [f64; 2],
    pub dy1: [f64; 2],
}

impl<'a> Stepper<'a> {
    pub fn new(sys: &'a NumericSystem, start: (f64, f64), tol: f64) -> Stepper<'a> {
        let y = [start.0, start.1];
        let dy = sys.rhs(y[0], y[1]);
        Stepper {
            sys,
            tol,
            max_step: DEFAULT_MAX_STEP,
            t: 0.0,
            y,
            dy: [dy.0, dy.1],
            h: 1e-6,
            accepted: 0,
            rejected: 0,
        }
    }

    /// Advance one accepted step, clipped so t never exceeds `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<Step, NumericError> {
        loop {
            let mut h = self.h.min(self.max_step);
            if self.t + h > t_limit {
                h = t_limit - self.t;
            }
            if h < MIN_STEP {
                if t_limit - self.t < MIN_STEP {
                    // Resting exactly on the limit.
                    h = t_limit - self.t;
                } else {
                    return Err(NumericError::StiffnessFloor { t: self.t });
                }
            }

            let (t0, y0, k1) = (self.t, self.y, self.dy);
            let f = |x: f64, y: f64| self.sys.rhs(x, y);
            let stage = |coeffs: &[(f64, [f64; 2])]| {
                let mut x = y0[0];
                let mut y = y0[1];
                for (a, k) in coeffs {
                    x += h * a * k[0];
                    y += h * a * k[1];
                }
                (x, y)
            };
            let p = stage(&[(A21, k1)]);
            let k2 = f(p.0, p.1);
            let k2 = [k2.0, k2.1];
            let p = stage(&[(A31, k1), (A32, k2)]);
            let k3 = f(p.0, p.1);
            let k3 = [k3.0, k3.1];
            let p = stage(&[(A41, k1), (A42, k2), (A43, k3)]);
            let k4 = f(p.0, p.1);
            let k4 = [k4.0, k4.1];
            let p = stage(&[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
            let k5 = f(p.0, p.1);
            let k5 = [k5.0, k5.1];
            let p = stage(&[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
            let k6 = f(p.0, p.1);
            let k6 = [k6.0, k6.1];
            let y1 = [
                y0[0] + h * (B1 * k1[0] + B3 * k3[0] + B4 * k4[0] + B5 * k5[0] + B6 * k6[0]),
                y0[1] + h * (B1 * k1[1] + B3 * k3[1] + B4 * k4[1] + B5 * k5[1] + B6 * k6[1]),
            ];
            let k7v = f(y1[0], y1[1]);
            let k7 = [k7v.0, k7v.1];

            let mut err_sq = 0.0;
            let mut finite = true;
            for i in 0..2 {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let sc = self.tol * (1.0 + y0[i].abs().max(y1[i].abs()));
                err_sq += (e / sc) * (e / sc);
                finite &= y1[i].is_finite() && k7[i].is_finite();
            }
            if !finite {
                return Err(NumericError::NonFinite { t: t0 });
            }
            let err = (0.5 * err_sq).sqrt();

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                self.t = t0 + h;
                self.y = y1;
                self.dy = k7;
                self.h = h * factor;
                self.accepted += 1;
                return Ok(Step {
                    t0,
                    y0,
                    dy0: k1,
                    t1: self.t,
                    y1,
                    dy1: k7,
                });
            }
            self.rejected += 1;
            self.h = h * factor;
        }
    }
}

/// Cubic Hermite dense output on one step, theta in [0, 1].
pub fn hermite(step: &Step, theta: f64, component: usize) -> f64 {
    let h = step.t1 - step.t0;
    let y0 = step.y0[component];
    let y1 = step.y1[component];
    let m0 = step.dy0[component] * h;
    let m1 = step.dy1[component] * h;
    let t2 = theta * theta;
    let t3 = t2 * theta;
    y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
        + m0 * (t3 - 2.0 * t2 + theta)
        + y1 * (-2.0 * t3 + 3.0 * t2)
        + m1 * (t3 - t2)
}

/// Derivative of the Hermite interpolant with respect to t.
pub fn hermite_derivative(step: &Step, theta: f64, component: usize) -> f64 {
    let h = step.t1 - step.t0;
    let y0 = step.y0[component];
    let y1 = step.y1[component];
    let m0 = step.dy0[component] * h;
    let m1 = step.dy1[component] * h;
    let t2 = theta * theta;
    let dtheta = y0 * (6.0 * t2 - 6.0 * theta)
        + m0 * (3.0 * t2 - 4.0 * theta + 1.0)
        + y1 * (-6.0 * t2 + 6.0 * theta)
        + m1 * (3.0 * t2 - 2.0 * theta);
    dtheta / h
}
