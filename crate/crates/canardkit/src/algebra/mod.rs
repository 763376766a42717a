//! Exact-arithmetic kernel: big rationals, sparse multivariate
//! polynomials over (x, y, mu, eps, u), reduced rational functions, and
//! truncated eps-series.
//!
//! Everything here is immutable after construction and safe to share.
//! Floating point never enters this module; the numerics module is the
//! only place doubles appear.

mod gcd;
mod monomial;
mod polynomial;
mod ratfunc;
mod series;

pub use gcd::{poly_gcd, poly_lcm, square_free_in};
pub use monomial::{Monomial, Var, VARS};
pub use polynomial::{rat, rat_int, rational_to_f64, Polynomial};
pub use ratfunc::{substitute_poly_rf, RationalFunction};
pub use series::{
    compose_polynomial, eps_limit, expand_polynomial, expand_rational, substitute_series,
    Assignment, EpsSeries,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    /// A substituted or constructed denominator vanished identically
    /// through the working truncation order.
    #[error("denominator is identically zero through the truncation order")]
    ZeroDenominator,
    /// The quotient has a pole at eps = 0: the numerator's leading eps
    /// power is strictly lower than the denominator's.
    #[error("divergent eps -> 0 limit (numerator valuation {num_valuation}, denominator valuation {den_valuation})")]
    DivergentLimit {
        num_valuation: usize,
        den_valuation: usize,
    },
    /// Evaluation point lies on the zero set of the denominator.
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
}
