//! Double-precision integration of the stiff slow-time system,
//! limit-cycle characterization, and bisection location of the canard
//! explosion. The only module where floating point appears.

mod cycle;
mod explosion;
mod rk45;

pub use cycle::{limit_cycle, sweep, CycleOptions, LimitCycleSummary, SweepRow};
pub use explosion::{locate_explosion, ExplosionResult};
pub use rk45::{hermite, hermite_derivative, Step, Stepper, DEFAULT_MAX_STEP};

use thiserror::Error;

use crate::algebra::{rational_to_f64, Polynomial, Var};
use crate::sysmodel::SPSystem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("step size hit the hard floor at t = {t}; the problem is too stiff for the explicit pair at this tolerance")]
    StiffnessFloor { t: f64 },
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("orbit converges to equilibrium; no oscillation to measure")]
    NoOscillation,
    #[error("bracket endpoints do not straddle the amplitude threshold: amplitude({mu_lo}) = {amp_lo}, amplitude({mu_hi}) = {amp_hi}, threshold {threshold}")]
    BadBracket {
        mu_lo: f64,
        amp_lo: f64,
        mu_hi: f64,
        amp_hi: f64,
        threshold: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeScale {
    /// dx/dt = f/eps, dy/dt = g.
    Slow,
    /// dx/dt = f, dy/dt = eps*g.
    Fast,
}

#[derive(Debug, Clone, Copy)]
struct Term {
    c: f64,
    ax: i32,
    ay: i32,
}

/// Compiled evaluators for one (mu, eps) slice of a system.
#[derive(Debug, Clone)]
pub struct NumericSystem {
    f_terms: Vec<Term>,
    g_terms: Vec<Term>,
    pub mu: f64,
    pub eps: f64,
    pub scale: TimeScale,
}

fn compile_terms(p: &Polynomial, mu: f64, eps: f64) -> Vec<Term> {
    let mut terms = Vec::new();
    for (m, c) in p.iter() {
        debug_assert_eq!(m.exponent(Var::U), 0);
        let mut coeff = rational_to_f64(c);
        coeff *= mu.powi(m.exponent(Var::Mu) as i32);
        coeff *= eps.powi(m.exponent(Var::Eps) as i32);
        terms.push(Term {
            c: coeff,
            ax: m.exponent(Var::X) as i32,
            ay: m.exponent(Var::Y) as i32,
        });
    }
    terms
}

fn eval_terms(terms: &[Term], x: f64, y: f64) -> f64 {
    let mut sum = 0.0;
    for t in terms {
        sum += t.c * x.powi(t.ax) * y.powi(t.ay);
    }
    sum
}

impl NumericSystem {
    pub fn compile(s: &SPSystem, mu: f64, eps: f64, scale: TimeScale) -> NumericSystem {
        assert!(eps > 0.0, "eps must be positive");
        NumericSystem {
            f_terms: compile_terms(&s.f, mu, eps),
            g_terms: compile_terms(&s.g, mu, eps),
            mu,
            eps,
            scale,
        }
    }

    /// Raw (f, g) values at a state.
    pub fn f_g(&self, x: f64, y: f64) -> (f64, f64) {
        (
            eval_terms(&self.f_terms, x, y),
            eval_terms(&self.g_terms, x, y),
        )
    }

    /// Right-hand side in the configured time scale.
    pub fn rhs(&self, x: f64, y: f64) -> (f64, f64) {
        let (f, g) = self.f_g(x, y);
        match self.scale {
            TimeScale::Slow => (f / self.eps, g),
            TimeScale::Fast => (f, self.eps * g),
        }
    }
}

/// Orbit samples from adaptive integration, one row per accepted step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<[f64; 3]>,
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrate from `start` to exactly `t_end`, recording every accepted
/// step.
pub fn integrate(
    sys: &NumericSystem,
    start: (f64, f64),
    t_end: f64,
    tol: f64,
) -> Result<Trajectory, NumericError> {
    assert!(
        (1e-13..=1e-6).contains(&tol),
        "tolerance outside the supported range"
    );
    let mut stepper = Stepper::new(sys, start, tol);
    let mut samples = vec![[0.0, start.0, start.1]];
    while stepper.t < t_end {
        let step = stepper.step(t_end)?;
        samples.push([step.t1, step.y1[0], step.y1[1]]);
    }
    Ok(Trajectory {
        samples,
        accepted: stepper.accepted,
        rejected: stepper.rejected,
    })
}

/// Real parts of the Jacobian eigenvalues of the slow-time system at a
/// state (exact symbolic partials evaluated in doubles).
pub fn jacobian_real_parts(s: &SPSystem, mu: f64, eps: f64, at: (f64, f64)) -> (f64, f64) {
    let p = [at.0, at.1, mu, eps, 0.0];
    let fx = s.f.partial_derivative(Var::X).eval_f64(p) / eps;
    let fy = s.f.partial_derivative(Var::Y).eval_f64(p) / eps;
    let gx = s.g.partial_derivative(Var::X).eval_f64(p);
    let gy = s.g.partial_derivative(Var::Y).eval_f64(p);
    let tr = fx + gy;
    let det = fx * gy - fy * gx;
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let root = disc.sqrt();
        ((tr + root) / 2.0, (tr - root) / 2.0)
    } else {
        (tr / 2.0, tr / 2.0)
    }
}

/// Deterministic pseudo-random stream for reproducible probe points.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
