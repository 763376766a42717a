//! Singularly perturbed planar systems: definition, parsing, the
//! order-zero critical manifold, and fold-point location.
//!
//! A system is the pair eps*x' = f(x, y, mu, eps), y' = g(x, y, mu, eps)
//! in slow time. All curvature and Lie-derivative work elsewhere uses the
//! fast-time field (f, eps*g), which keeps every jet polynomial.

mod parser;

pub use parser::{parse_expression, ParseError};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::algebra::{
    rational_to_f64, square_free_in, Polynomial, RationalFunction, Var,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("fast equation is not affine in y")]
    NotAffineInY,
    #[error("fast equation degenerates at eps = 0: the y-coefficient vanishes identically")]
    DegenerateFastEquation,
    #[error("critical manifold depends on mu at order zero; the expansion scheme requires mu-independence")]
    MuDependentCriticalManifold,
    #[error("provided critical manifold does not satisfy f(x, F0, mu, 0) = 0; residual = {residual}")]
    ManifoldResidualNonzero { residual: String },
    #[error("critical manifold is not a polynomial graph; fold search needs a constant denominator")]
    ManifoldNotPolynomial,
    #[error("F0' has no real root: no fold point")]
    NoFold,
    #[error("vector field must not mention the reserved symbol '{0}'")]
    ReservedVariable(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A singularly perturbed system eps*x' = f, y' = g.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SPSystem {
    pub name: String,
    pub f: Polynomial,
    pub g: Polynomial,
    pub affine_in_y: bool,
    /// User-supplied critical manifold for systems not affine in y;
    /// verified rather than solved for.
    pub f0_override: Option<RationalFunction>,
}

impl SPSystem {
    pub fn new(
        name: impl Into<String>,
        f: Polynomial,
        g: Polynomial,
        f0_override: Option<RationalFunction>,
    ) -> Result<SPSystem, ModelError> {
        for p in [&f, &g] {
            if p.contains_var(Var::U) {
                return Err(ModelError::ReservedVariable("u".into()));
            }
        }
        let affine_in_y = f.degree_in(Var::Y) <= 1;
        Ok(SPSystem {
            name: name.into(),
            f,
            g,
            affine_in_y,
            f0_override,
        })
    }

    /// The fast-time vector field (x' = f, y' = eps*g).
    pub fn fast_time_field(&self) -> (Polynomial, Polynomial) {
        let eps = Polynomial::var(Var::Eps);
        (self.f.clone(), &eps * &self.g)
    }
}

/// The Van der Pol oscillator with forcing parameter mu.
pub fn vdp() -> SPSystem {
    let f = parse_expression("x + y - x^3/3").expect("builtin parses");
    let g = parse_expression("mu - x").expect("builtin parses");
    SPSystem::new("vdp", f, g, None).expect("builtin is valid")
}

/// Parse a system definition file (JSON with expression strings).
pub fn parse_system(text: &str) -> Result<SPSystem, ModelError> {
    #[derive(Deserialize)]
    struct SystemFile {
        name: String,
        f: String,
        g: String,
        #[serde(rename = "F0")]
        f0: Option<String>,
    }
    let file: SystemFile = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let f = parse_expression(&file.f)?;
    let g = parse_expression(&file.g)?;
    let f0 = match file.f0 {
        Some(src) => Some(RationalFunction::from_poly(parse_expression(&src)?)),
        None => None,
    };
    SPSystem::new(file.name, f, g, f0)
}

/// Graph y = F0(x) of the order-zero manifold f(x, y, mu, 0) = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalManifold {
    pub f0: RationalFunction,
    pub validity: String,
}

/// Solve (or verify) the critical manifold.
///
/// For affine-in-y systems F0 = -b/a where f = a*y + b at eps = 0; the
/// result must be mu-free. Systems not affine in y must carry an
/// explicit `f0_override`, which is verified against f.
pub fn critical_manifold(s: &SPSystem) -> Result<CriticalManifold, ModelError> {
    let f_at0 = s.f.substitute(Var::Eps, &Polynomial::zero());
    if let Some(f0) = &s.f0_override {
        let residual = crate::algebra::substitute_poly_rf(&f_at0, Var::Y, f0);
        if !residual.is_zero() {
            return Err(ModelError::ManifoldResidualNonzero {
                residual: residual.to_string(),
            });
        }
        return Ok(CriticalManifold {
            f0: f0.clone(),
            validity: "user-provided graph, residual verified identically zero".into(),
        });
    }
    if !s.affine_in_y {
        return Err(ModelError::NotAffineInY);
    }
    let a = f_at0.partial_derivative(Var::Y);
    if a.is_zero() {
        return Err(ModelError::DegenerateFastEquation);
    }
    let b = &f_at0 - &(&a * &Polynomial::var(Var::Y));
    debug_assert!(!a.contains_var(Var::Y) && !b.contains_var(Var::Y));
    let f0 = RationalFunction::new(-&b, a);
    if f0.contains_var(Var::Mu) {
        return Err(ModelError::MuDependentCriticalManifold);
    }
    debug_assert!(
        crate::algebra::substitute_poly_rf(&f_at0, Var::Y, &f0).is_zero(),
        "critical manifold residual must vanish identically"
    );
    Ok(CriticalManifold {
        f0,
        validity: "solved from the affine fast equation at eps = 0".into(),
    })
}

/// A root of F0', exact when rational.
#[derive(Debug, Clone, PartialEq)]
pub enum FoldCoordinate {
    Exact(BigRational),
    Approx(f64),
}

impl FoldCoordinate {
    pub fn to_f64(&self) -> f64 {
        match self {
            FoldCoordinate::Exact(r) => rational_to_f64(r),
            FoldCoordinate::Approx(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            FoldCoordinate::Exact(r) => Some(r),
            FoldCoordinate::Approx(_) => None,
        }
    }
}

impl fmt::Display for FoldCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoldCoordinate::Exact(r) => write!(f, "{}", r),
            FoldCoordinate::Approx(v) => write!(f, "{:.12}", v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldPoint {
    pub x0: FoldCoordinate,
    pub y0: FoldCoordinate,
}

impl FoldPoint {
    pub fn exact_rational(x0: BigRational, m: &CriticalManifold) -> FoldPoint {
        let mut pt = BTreeMap::new();
        pt.insert(Var::X, x0.clone());
        let y0 = m
            .f0
            .eval(&pt)
            .expect("fold ordinate evaluation cannot hit a pole of a polynomial graph");
        FoldPoint {
            x0: FoldCoordinate::Exact(x0),
            y0: FoldCoordinate::Exact(y0),
        }
    }
}

/// All real roots of F0'(x) = 0, rational ones exact, irrational ones
/// bisected to 1e-12, sorted by x.
pub fn fold_points(m: &CriticalManifold) -> Result<Vec<FoldPoint>, ModelError> {
    let f0_poly = m
        .f0
        .as_polynomial()
        .ok_or(ModelError::ManifoldNotPolynomial)?;
    let derivative = f0_poly.partial_derivative(Var::X);
    if derivative.as_constant().is_some() {
        // Constant nonzero slope: no fold. Constant zero: flat graph,
        // treated as foldless as well.
        return Err(ModelError::NoFold);
    }
    let square_free = square_free_in(&derivative, Var::X);
    let mut rational_roots = rational_roots_of(&square_free);
    let deflated = deflate(&square_free, &rational_roots);
    let mut approx_roots = real_roots_bisection(&deflated);
    // Drop numeric copies of roots already known exactly.
    approx_roots.retain(|r| {
        rational_roots
            .iter()
            .all(|q| (rational_to_f64(q) - r).abs() > 1e-9)
    });

    rational_roots.sort();
    let mut folds: Vec<FoldPoint> = rational_roots
        .into_iter()
        .map(|x0| FoldPoint::exact_rational(x0, m))
        .collect();
    for r in approx_roots {
        let y0 = m.f0.eval_f64([r, 0.0, 0.0, 0.0, 0.0]);
        folds.push(FoldPoint {
            x0: FoldCoordinate::Approx(r),
            y0: FoldCoordinate::Approx(y0),
        });
    }
    folds.sort_by(|a, b| a.x0.to_f64().partial_cmp(&b.x0.to_f64()).unwrap());
    if folds.is_empty() {
        return Err(ModelError::NoFold);
    }
    Ok(folds)
}

/// Default fold selection: the fold with the largest x0.
pub fn default_fold(folds: &[FoldPoint]) -> &FoldPoint {
    folds.last().expect("fold list is nonempty")
}

/// Select the fold nearest a requested coordinate.
pub fn select_fold<'a>(folds: &'a [FoldPoint], near: f64) -> &'a FoldPoint {
    folds
        .iter()
        .min_by(|a, b| {
            let da = (a.x0.to_f64() - near).abs();
            let db = (b.x0.to_f64() - near).abs();
            da.partial_cmp(&db).unwrap()
        })
        .expect("fold list is nonempty")
}

/// Exact rational roots of a univariate-in-x polynomial, found by the
/// rational-root theorem with exact trial evaluation.
fn rational_roots_of(p: &Polynomial) -> Vec<BigRational> {
    let mut roots = Vec::new();
    let mut work = p.to_integer_primitive().1;
    // x = 0 roots first.
    loop {
        let uni = work.as_univariate(Var::X);
        if uni.contains_key(&0) || work.is_zero() {
            break;
        }
        roots.push(BigRational::zero());
        work = work
            .divide_exact(&Polynomial::var(Var::X))
            .expect("x divides");
        if roots.len() > 64 {
            break;
        }
    }
    if work.as_constant().is_some() {
        dedup_rationals(&mut roots);
        return roots;
    }
    let uni = work.as_univariate(Var::X);
    let lead = uni
        .values()
        .next_back()
        .and_then(|c| c.as_constant())
        .map(|c| c.numer().clone());
    let tail = uni
        .get(&0)
        .and_then(|c| c.as_constant())
        .map(|c| c.numer().clone());
    let (Some(lead), Some(tail)) = (lead, tail) else {
        return roots;
    };
    for p_div in divisors_bounded(&tail.abs()) {
        for q_div in divisors_bounded(&lead.abs()) {
            for sign in [1i64, -1] {
                let candidate = BigRational::new(&p_div * BigInt::from(sign), q_div.clone());
                let mut pt = BTreeMap::new();
                pt.insert(Var::X, candidate.clone());
                if work.eval(&pt).is_zero() && !roots.contains(&candidate) {
                    roots.push(candidate);
                }
            }
        }
    }
    dedup_rationals(&mut roots);
    roots
}

fn dedup_rationals(roots: &mut Vec<BigRational>) {
    roots.sort();
    roots.dedup();
}

/// Divisors by trial division, capped for enormous constants; the cap
/// only costs us exactness for coefficients far outside this toolkit's
/// problem sizes, and bisection still finds those roots numerically.
fn divisors_bounded(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let limit = n.to_u64().unwrap_or(u64::MAX).min(1_000_000);
    let mut d = 1u64;
    while d * d <= limit {
        if (n % BigInt::from(d)).is_zero() {
            out.push(BigInt::from(d));
            let q = n / BigInt::from(d);
            if q != BigInt::from(d) {
                out.push(q);
            }
        }
        d += 1;
    }
    if out.is_empty() {
        out.push(BigInt::one());
        out.push(n.abs());
    }
    out.sort();
    out.dedup();
    out
}

/// Divide out exact roots (x - r), with multiplicity.
fn deflate(p: &Polynomial, roots: &[BigRational]) -> Polynomial {
    let mut work = p.clone();
    for r in roots {
        loop {
            let factor = &Polynomial::var(Var::X) - &Polynomial::constant(r.clone());
            match work.divide_exact(&factor) {
                Some(q) => work = q,
                None => break,
            }
        }
    }
    work
}

/// Real roots of a square-free integer polynomial by sign-change
/// bisection on a Cauchy-bound interval.
fn real_roots_bisection(p: &Polynomial) -> Vec<f64> {
    if p.as_constant().is_some() {
        return Vec::new();
    }
    let uni = p.as_univariate(Var::X);
    let degree = *uni.keys().next_back().unwrap() as usize;
    let lead = uni
        .values()
        .next_back()
        .and_then(|c| c.as_constant())
        .map(|c| rational_to_f64(&c))
        .unwrap_or(1.0);
    let mut bound = 1.0f64;
    for c in uni.values() {
        if let Some(c) = c.as_constant() {
            bound = bound.max(1.0 + (rational_to_f64(&c) / lead).abs());
        }
    }
    let eval = |x: f64| p.eval_f64([x, 0.0, 0.0, 0.0, 0.0]);
    let samples = (degree.max(1) * 512).min(65_536);
    let mut roots = Vec::new();
    let mut prev_x = -bound;
    let mut prev_v = eval(prev_x);
    for k in 1..=samples {
        let x = -bound + 2.0 * bound * (k as f64) / (samples as f64);
        let v = eval(x);
        if prev_v == 0.0 {
            roots.push(prev_x);
        } else if prev_v * v < 0.0 {
            let (mut lo, mut hi) = (prev_x, x);
            let (mut flo, _) = (prev_v, v);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if hi - lo < 1e-13 * mid.abs().max(1.0) {
                    break;
                }
                let fm = eval(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_v = v;
    }
    if prev_v == 0.0 {
        roots.push(prev_x);
    }
    roots
}
