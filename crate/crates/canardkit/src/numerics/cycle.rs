//! Limit-cycle detection on the Poincare section x' = 0 (maxima of x).
//!
//! After the transient is discarded, maxima and minima of x are located
//! from sign changes of x' between accepted steps and refined on the
//! cubic Hermite dense output. The period is the time between
//! successive maxima; the amplitude is the refined x-range over the
//! last full period.

use super::rk45::{hermite, hermite_derivative, Step, Stepper};
use super::{NumericError, NumericSystem};

#[derive(Debug, Clone, Copy)]
pub struct CycleOptions {
    pub tol: f64,
    /// Transient discard in time units; defaults to 20/eps.
    pub transient: Option<f64>,
    pub max_periods: usize,
    /// Integration budget after the transient.
    pub budget: f64,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions {
            tol: 1e-10,
            transient: None,
            max_periods: 64,
            budget: 400.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCycleSummary {
    pub amplitude_x: f64,
    pub period: f64,
    pub converged: bool,
}

const EQUILIBRIUM_SPEED: f64 = 1e-9;
const DEAD_AMPLITUDE: f64 = 1e-6;
const PERIOD_RTOL: f64 = 1e-6;

struct Extremum {
    t: f64,
    x: f64,
}

fn refine_extremum(step: &Step) -> Extremum {
    // Bisection on the Hermite derivative of x over theta in [0, 1].
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let d_lo = step.dy0[0];
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let d = hermite_derivative(step, mid, 0);
        if d == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (d > 0.0) == (d_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    Extremum {
        t: step.t0 + theta * (step.t1 - step.t0),
        x: hermite(step, theta, 0),
    }
}

/// Characterize the attractor at fixed (mu, eps).
pub fn limit_cycle(
    sys: &NumericSystem,
    start: (f64, f64),
    opts: &CycleOptions,
) -> Result<LimitCycleSummary, NumericError> {
    let transient = opts.transient.unwrap_or(20.0 / sys.eps);
    let mut stepper = Stepper::new(sys, start, opts.tol);

    while stepper.t < transient {
        stepper.step(transient)?;
        let speed = (stepper.dy[0].powi(2) + stepper.dy[1].powi(2)).sqrt();
        if speed < EQUILIBRIUM_SPEED * (1.0 + stepper.y[0].abs() + stepper.y[1].abs()) {
            return Err(NumericError::NoOscillation);
        }
    }

    let t_end = transient + opts.budget;
    let mut maxima: Vec<Extremum> = Vec::new();
    let mut minima: Vec<Extremum> = Vec::new();
    let mut periods: Vec<f64> = Vec::new();
    let mut converged = false;

    while stepper.t < t_end {
        let step = stepper.step(t_end)?;
        let speed = (stepper.dy[0].powi(2) + stepper.dy[1].powi(2)).sqrt();
        if speed < EQUILIBRIUM_SPEED * (1.0 + stepper.y[0].abs() + stepper.y[1].abs()) {
            return Err(NumericError::NoOscillation);
        }
        let d0 = step.dy0[0];
        let d1 = step.dy1[0];
        if d0 > 0.0 && d1 <= 0.0 {
            maxima.push(refine_extremum(&step));
            if maxima.len() >= 2 {
                let pair = &maxima[maxima.len() - 2..];
                periods.push(pair[1].t - pair[0].t);
            }
            if periods.len() >= 2 {
                let last = periods[periods.len() - 1];
                let prev = periods[periods.len() - 2];
                if (last - prev).abs() <= PERIOD_RTOL * last.abs() {
                    converged = true;
                    break;
                }
            }
            if maxima.len() >= opts.max_periods {
                break;
            }
        } else if d0 < 0.0 && d1 >= 0.0 {
            minima.push(refine_extremum(&step));
        }
    }

    if maxima.len() < 2 {
        return Err(NumericError::NoOscillation);
    }
    let last_max = maxima.last().unwrap();
    let prev_max = &maxima[maxima.len() - 2];
    let period = last_max.t - prev_max.t;
    // Trough inside the final period window.
    let trough = minima
        .iter()
        .filter(|m| m.t > prev_max.t && m.t < last_max.t)
        .map(|m| m.x)
        .fold(f64::INFINITY, f64::min);
    if !trough.is_finite() {
        return Err(NumericError::NoOscillation);
    }
    let amplitude_x = last_max.x.max(prev_max.x) - trough;
    if amplitude_x < DEAD_AMPLITUDE {
        return Err(NumericError::NoOscillation);
    }

    Ok(LimitCycleSummary {
        amplitude_x,
        period,
        converged,
    })
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub mu: f64,
    pub summary: Result<LimitCycleSummary, NumericError>,
    pub classification: String,
}

pub fn classify(summary: &Result<LimitCycleSummary, NumericError>, threshold: f64) -> String {
    match summary {
        Ok(s) if s.amplitude_x >= threshold => "relaxation".into(),
        Ok(_) => "canard".into(),
        Err(NumericError::NoOscillation) => "none".into(),
        Err(_) => "error".into(),
    }
}

/// Independent limit-cycle runs per mu, rows in input order; failures
/// become per-row markers and the sweep continues.
pub fn sweep(
    s: &crate::sysmodel::SPSystem,
    eps: f64,
    mu_values: &[f64],
    start: (f64, f64),
    threshold: f64,
    opts: &CycleOptions,
) -> Vec<SweepRow> {
    mu_values
        .iter()
        .map(|&mu| {
            let sys = NumericSystem::compile(s, mu, eps, super::TimeScale::Slow);
            let summary = limit_cycle(&sys, start, opts);
            let classification = classify(&summary, threshold);
            SweepRow {
                mu,
                summary,
                classification,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::TimeScale;
    use crate::sysmodel::vdp;

    #[test]
    fn relaxation_oscillation_amplitude_and_convergence() {
        let s = vdp();
        let sys = NumericSystem::compile(&s, 0.9, 0.05, TimeScale::Slow);
        let opts = CycleOptions {
            tol: 1e-10,
            transient: Some(50.0),
            ..CycleOptions::default()
        };
        let lc = limit_cycle(&sys, (0.5, 0.0), &opts).unwrap();
        assert!(lc.converged);
        // The cubic's relaxation cycle spans roughly [-2, 2].
        assert!(lc.amplitude_x > 3.5 && lc.amplitude_x < 4.5, "{:?}", lc);
        assert!(lc.period > 0.0);
    }

    #[test]
    fn stable_equilibrium_reports_no_oscillation() {
        let s = vdp();
        let sys = NumericSystem::compile(&s, 1.2, 0.01, TimeScale::Slow);
        let opts = CycleOptions::default();
        match limit_cycle(&sys, (0.5, 0.0), &opts) {
            Err(NumericError::NoOscillation) => {}
            other => panic!("expected NoOscillation, got {:?}", other),
        }
    }

    #[test]
    fn relaxation_amplitude_at_design_eps() {
        // mu = 0.9, eps = 0.01: the cubic's relaxation cycle spans
        // roughly [-2, 2] in x.
        let s = vdp();
        let sys = NumericSystem::compile(&s, 0.9, 0.01, TimeScale::Slow);
        let lc = limit_cycle(&sys, (0.5, 0.0), &CycleOptions::default()).unwrap();
        assert!(lc.converged);
        assert!(lc.amplitude_x > 3.8 && lc.amplitude_x < 4.2, "{:?}", lc);

        // Cross-check the extremes on a recorded settled window, at
        // tight tolerance and again at half tolerance.
        for tol in [1e-10, 5e-11] {
            let settle = crate::numerics::integrate(&sys, (0.5, 0.0), 2000.0, tol).unwrap();
            let last = settle.samples.last().unwrap();
            let window =
                crate::numerics::integrate(&sys, (last[1], last[2]), 10.0, tol).unwrap();
            let max_x = window.samples.iter().map(|r| r[1]).fold(f64::MIN, f64::max);
            let min_x = window.samples.iter().map(|r| r[1]).fold(f64::MAX, f64::min);
            assert!((1.9..=2.1).contains(&max_x), "max x = {max_x}");
            assert!((-2.1..=-1.9).contains(&min_x), "min x = {min_x}");
        }
    }

    #[test]
    fn canard_regime_cycle_converges() {
        let s = vdp();
        let sys = NumericSystem::compile(&s, 0.9987404, 0.01, TimeScale::Slow);
        let lc = limit_cycle(&sys, (0.5, 0.0), &CycleOptions::default()).unwrap();
        assert!(lc.converged, "{:?}", lc);
        assert!(lc.amplitude_x > 1e-3);
    }

    #[test]
    fn sweep_keeps_input_order_and_is_deterministic() {
        let s = vdp();
        let opts = CycleOptions {
            transient: Some(40.0),
            ..CycleOptions::default()
        };
        let rows = sweep(&s, 0.05, &[0.9, 1.2, 0.9], (0.5, 0.0), 2.0, &opts);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].classification, "relaxation");
        assert_eq!(rows[1].classification, "none");
        assert_eq!(rows[2].classification, "relaxation");
        let (a, b) = (&rows[0].summary, &rows[2].summary);
        assert_eq!(a.as_ref().unwrap(), b.as_ref().unwrap());
        assert!(sweep(&s, 0.05, &[], (0.5, 0.0), 2.0, &opts).is_empty());
    }
}
