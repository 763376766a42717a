//! Bisection location of the canard explosion on the amplitude
//! classifier: relaxation-size cycles on one side of the bracket, small
//! cycles or a stable equilibrium on the other.

use super::cycle::{limit_cycle, CycleOptions};
use super::{NumericError, NumericSystem, TimeScale};
use crate::sysmodel::SPSystem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplosionResult {
    /// Midpoint of the final bracket.
    pub mu_star: f64,
    pub bracket_width: f64,
    /// Amplitude on the sub-threshold side of the final bracket.
    pub amplitude_below: f64,
    /// Amplitude on the super-threshold side of the final bracket.
    pub amplitude_above: f64,
}

fn amplitude_at(
    s: &SPSystem,
    mu: f64,
    eps: f64,
    start: (f64, f64),
    opts: &CycleOptions,
) -> Result<f64, NumericError> {
    let sys = NumericSystem::compile(s, mu, eps, TimeScale::Slow);
    match limit_cycle(&sys, start, opts) {
        Ok(summary) => Ok(summary.amplitude_x),
        Err(NumericError::NoOscillation) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Bisection on mu between a relaxation-side value `mu_lo` and a
/// small-cycle/equilibrium-side value `mu_hi` (numeric order is
/// irrelevant; the classifier orientation is what matters).
pub fn locate_explosion(
    s: &SPSystem,
    eps: f64,
    mu_lo: f64,
    mu_hi: f64,
    threshold: f64,
    resolution: f64,
    start: (f64, f64),
    opts: &CycleOptions,
) -> Result<ExplosionResult, NumericError> {
    let amp_lo = amplitude_at(s, mu_lo, eps, start, opts)?;
    let amp_hi = amplitude_at(s, mu_hi, eps, start, opts)?;
    if !(amp_lo > threshold && threshold > amp_hi) {
        return Err(NumericError::BadBracket {
            mu_lo,
            amp_lo,
            mu_hi,
            amp_hi,
            threshold,
        });
    }
    let mut above = (mu_lo, amp_lo); // relaxation side
    let mut below = (mu_hi, amp_hi); // small side
    let mut guard = 0;
    while (above.0 - below.0).abs() > resolution && guard < 128 {
        let mid = 0.5 * (above.0 + below.0);
        if mid == above.0 || mid == below.0 {
            break; // float resolution exhausted
        }
        let amp = amplitude_at(s, mid, eps, start, opts)?;
        if amp > threshold {
            above = (mid, amp);
        } else {
            below = (mid, amp);
        }
        guard += 1;
    }
    Ok(ExplosionResult {
        mu_star: 0.5 * (above.0 + below.0),
        bracket_width: (above.0 - below.0).abs(),
        amplitude_below: below.1,
        amplitude_above: above.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysmodel::vdp;

    #[test]
    fn degenerate_bracket_is_rejected() {
        // Both ends on the relaxation side.
        let s = vdp();
        let opts = CycleOptions {
            transient: Some(40.0),
            ..CycleOptions::default()
        };
        match locate_explosion(&s, 0.05, 0.85, 0.9, 2.0, 1e-6, (0.5, 0.0), &opts) {
            Err(NumericError::BadBracket { .. }) => {}
            other => panic!("expected BadBracket, got {:?}", other),
        }
    }

    #[test]
    fn explosion_at_eps_005_matches_series() {
        // Coarser eps keeps this test quick; the eps = 0.01 run lives in
        // the acceptance suite.
        let s = vdp();
        let opts = CycleOptions {
            transient: Some(120.0),
            ..CycleOptions::default()
        };
        let eps = 0.05;
        let r = locate_explosion(&s, eps, 0.95, 1.01, 2.0, 1e-9, (0.5, 0.0), &opts).unwrap();
        let series = 1.0 - eps / 8.0 - 3.0 * eps * eps / 32.0;
        assert!(
            (r.mu_star - series).abs() < 5e-3,
            "mu_star {} vs series {}",
            r.mu_star,
            series
        );
        assert!(r.bracket_width <= 1e-9);
        assert!(r.amplitude_above > 2.0 && r.amplitude_below < 2.0);
    }
}
