//! Order-by-order solver of the invariance equation
//! F'(x,eps) * f(x, F, mu(eps), eps) = eps * g(x, F, mu(eps), eps),
//! producing the canard expansion F0..FN together with the
//! bifurcation-parameter series mu0..mu_{N-1} by pole cancellation at
//! the fold.
//!
//! The generic order-k step substitutes the partial expansion with the
//! next parameter coefficient carried as the ring variable u, collects
//! the eps^k coefficient, solves the affine relation for Fk, and picks
//! u so the numerator of Fk vanishes at the fold.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{
    expand_polynomial, rational_to_f64, Assignment, EpsSeries, Polynomial, RationalFunction, Var,
    AlgebraError,
};
use crate::sysmodel::{
    critical_manifold, FoldCoordinate, FoldPoint, ModelError, SPSystem,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("the order-{order} relation is not affine in the parameter unknown (u-degree {degree})")]
    NonlinearParameterEntry { order: usize, degree: u16 },
    #[error("order-{order} singularity at the fold cannot be removed: the parameter unknown does not influence the numerator there")]
    UnremovableSingularity { order: usize },
    #[error("order-{order} coefficient has no singularity at the fold; the parameter is undetermined (g must depend on mu there)")]
    ParameterUnsolvable { order: usize },
    #[error("F'_{order} from the a10 route disagrees with d/dx of F_{order} from the a01 route")]
    DerivativeMismatch { order: usize },
    #[error("expansion requires an exact rational fold coordinate; got an approximate one")]
    InexactFold,
    #[error("the selected point is not a fold: F0' does not vanish there")]
    FoldMismatch,
    #[error("critical manifold has identically zero slope; no fold structure to expand around")]
    FlatCriticalManifold,
    #[error("linearization factor F0' * df/dy vanishes identically; implicit solve degenerates")]
    DegenerateLinearization,
    #[error("curvature index {requested} exceeds the configured maximum {maximum}")]
    CurvatureIndexTooLarge { requested: u32, maximum: u32 },
    #[error("series truncation kept collapsing while extracting order {order}; raw quotient stays divergent")]
    TruncationExhausted { order: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Gspm,
    Fcm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Gspm => "gspm",
            Method::Fcm => "fcm",
        }
    }
}

/// The lists F0..FN and mu0..mu_{N-1} with exact coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CanardExpansion {
    pub method: Method,
    pub f: Vec<RationalFunction>,
    pub mu: Vec<BigRational>,
    pub fold: FoldPoint,
}

impl CanardExpansion {
    pub fn order(&self) -> usize {
        self.f.len() - 1
    }

    /// Exact-string JSON export.
    pub fn to_json(&self) -> Value {
        json!({
            "method": self.method.as_str(),
            "order": self.order(),
            "mu": self.mu.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "F": self.f.iter().map(|rf| json!({
                "num": rf.num().to_string(),
                "den": rf.den().to_string(),
            })).collect::<Vec<_>>(),
        })
    }

    /// Horner evaluation of the mu series in double precision.
    pub fn mu_eval(&self, eps: f64) -> f64 {
        mu_series_eval(&self.mu, eps)
    }
}

pub fn mu_series_eval(mu: &[BigRational], eps: f64) -> f64 {
    let mut acc = 0.0;
    for c in mu.iter().rev() {
        acc = acc * eps + rational_to_f64(c);
    }
    acc
}

/// Residual of the invariance equation for a candidate series y = Y(x, eps):
/// Y_x * f(x, Y, M, eps) - eps * g(x, Y, M, eps), all through the
/// truncation order of Y. `mu` may be left symbolic.
pub fn residual_series(
    s: &SPSystem,
    y: &EpsSeries,
    mu: Option<&EpsSeries>,
    order: usize,
) -> EpsSeries {
    let y = y.truncate(order);
    let mu_assign = match mu {
        Some(m) => Assignment::Series(m),
        None => Assignment::Symbolic,
    };
    let mu_assign2 = match mu {
        Some(m) => Assignment::Series(m),
        None => Assignment::Symbolic,
    };
    let f_comp = expand_polynomial(&s.f, Assignment::Series(&y), mu_assign, order);
    let g_comp = expand_polynomial(&s.g, Assignment::Series(&y), mu_assign2, order);
    let y_x = y.derivative_in(Var::X);
    &(&y_x * &f_comp) - &g_comp.shift_up(1)
}

/// Pick the parameter unknown u so the fold singularity of `fk` is
/// removable, substitute it, and verify finiteness at the fold.
pub fn solve_removable(
    fk: &RationalFunction,
    x0: &BigRational,
    order: usize,
) -> Result<(BigRational, RationalFunction), SolverError> {
    let x0_poly = Polynomial::constant(x0.clone());
    let num_at_fold = fk.num().substitute(Var::X, &x0_poly);
    let den_at_fold = fk.den().substitute(Var::X, &x0_poly);

    if !den_at_fold.is_zero() {
        return Err(SolverError::ParameterUnsolvable { order });
    }
    // Reduced form: num and den cannot both vanish on x = x0.
    debug_assert!(!num_at_fold.is_zero());
    let u_degree = num_at_fold.degree_in(Var::U);
    if u_degree == 0 {
        return Err(SolverError::UnremovableSingularity { order });
    }
    if u_degree > 1 {
        return Err(SolverError::NonlinearParameterEntry {
            order,
            degree: u_degree,
        });
    }
    let c1 = num_at_fold.partial_derivative(Var::U);
    let c0 = num_at_fold.substitute(Var::U, &Polynomial::zero());
    let (Some(c1), Some(c0)) = (c1.as_constant(), c0.as_constant()) else {
        // Leftover variables at the fold mean the relation is not a
        // plain linear equation for u.
        return Err(SolverError::NonlinearParameterEntry {
            order,
            degree: u_degree,
        });
    };
    if c1.is_zero() {
        return Err(SolverError::UnremovableSingularity { order });
    }
    let u_star = -c0 / c1;
    let solved = fk
        .substitute(Var::U, &RationalFunction::constant(u_star.clone()))
        .map_err(SolverError::Algebra)?;
    let den_check = solved.den().substitute(Var::X, &x0_poly);
    if den_check.is_zero() {
        return Err(SolverError::UnremovableSingularity { order });
    }
    Ok((u_star, solved))
}

fn exact_fold_x(fold: &FoldPoint) -> Result<BigRational, SolverError> {
    match &fold.x0 {
        FoldCoordinate::Exact(r) => Ok(r.clone()),
        FoldCoordinate::Approx(_) => Err(SolverError::InexactFold),
    }
}

/// Build the eps-series for the partial expansion F0..F_{k-1} padded
/// with a zero coefficient at eps^k.
fn partial_sum_series(f: &[RationalFunction], order: usize) -> EpsSeries {
    let mut coeffs = vec![RationalFunction::zero(); order + 1];
    for (i, fi) in f.iter().enumerate().take(order + 1) {
        coeffs[i] = fi.clone();
    }
    EpsSeries::new(coeffs)
}

/// mu-series mu0 + ... + mu_{k-2} eps^{k-2} + u eps^{k-1}, padded to `order`.
fn mu_series_with_unknown(mu: &[BigRational], order: usize) -> EpsSeries {
    let mut coeffs = vec![RationalFunction::zero(); order + 1];
    for (i, m) in mu.iter().enumerate().take(order + 1) {
        coeffs[i] = RationalFunction::constant(m.clone());
    }
    if mu.len() <= order {
        coeffs[mu.len()] = RationalFunction::var(Var::U);
    }
    EpsSeries::new(coeffs)
}

/// Geometric-singular-perturbation expansion of order N >= 1 around the
/// given fold.
pub fn expand_canard(
    s: &SPSystem,
    n: usize,
    fold: &FoldPoint,
) -> Result<CanardExpansion, SolverError> {
    assert!(n >= 1, "expansion order must be at least 1");
    let x0 = exact_fold_x(fold)?;
    let manifold = critical_manifold(s)?;
    let f0 = manifold.f0.clone();
    let f0_prime = f0.partial_derivative(Var::X);
    if f0_prime.is_zero() {
        return Err(SolverError::FlatCriticalManifold);
    }
    // The chosen point must actually be a fold of the graph.
    let mut pt = BTreeMap::new();
    pt.insert(Var::X, x0.clone());
    match f0_prime.eval(&pt) {
        Ok(v) if v.is_zero() => {}
        _ => return Err(SolverError::FoldMismatch),
    }

    let mut f_list = vec![f0.clone()];
    let mut mu_list: Vec<BigRational> = Vec::new();

    for k in 1..=n {
        let y_series = partial_sum_series(&f_list, k);
        let mu_series = mu_series_with_unknown(&mu_list, k);
        let residual = residual_series(s, &y_series, Some(&mu_series), k);
        for j in 0..k {
            debug_assert!(
                residual.coeff(j).is_zero(),
                "already-solved residual order {j} must stay zero"
            );
        }
        let r_k = residual.coeff(k).clone();
        if r_k.num().degree_in(Var::U) > 1 {
            return Err(SolverError::NonlinearParameterEntry {
                order: k,
                degree: r_k.num().degree_in(Var::U),
            });
        }

        // Linearization factor F0' * df/dy evaluated on the order-0 data.
        let fy = s.f.partial_derivative(Var::Y);
        let fy0 = expand_polynomial(
            &fy,
            Assignment::Series(&y_series),
            Assignment::Series(&mu_series),
            0,
        )
        .coeff(0)
        .clone();
        let denom = &f0_prime * &fy0;
        if denom.is_zero() {
            return Err(SolverError::DegenerateLinearization);
        }
        let fk_unknown = &(-&r_k) / &denom;
        let (u_star, fk) = solve_removable(&fk_unknown, &x0, k)?;
        mu_list.push(u_star);
        f_list.push(fk);
    }

    Ok(CanardExpansion {
        method: Method::Gspm,
        f: f_list,
        mu: mu_list,
        fold: fold.clone(),
    })
}

/// Residual of Eq-style invariance for a finished expansion, reported
/// through order N+1 with the verified order.
#[derive(Debug, Clone)]
pub struct InvarianceResidual {
    pub series: EpsSeries,
    /// Largest k such that coefficients 0..k all vanish identically;
    /// `None` when even the constant coefficient is nonzero.
    pub verified_order: Option<usize>,
}

pub fn invariance_residual(s: &SPSystem, e: &CanardExpansion) -> InvarianceResidual {
    let order = e.order() + 1;
    let y = partial_sum_series(&e.f, order);
    let mu = if e.mu.is_empty() {
        None
    } else {
        let mut coeffs = vec![RationalFunction::zero(); order + 1];
        for (i, m) in e.mu.iter().enumerate().take(order + 1) {
            coeffs[i] = RationalFunction::constant(m.clone());
        }
        Some(EpsSeries::new(coeffs))
    };
    let series = residual_series(s, &y, mu.as_ref(), order);
    let mut verified_order = None;
    for k in 0..=order {
        if series.coeff(k).is_zero() {
            verified_order = Some(k);
        } else {
            break;
        }
    }
    InvarianceResidual {
        series,
        verified_order,
    }
}

/// Parse an expansion back from its JSON export.
pub fn expansion_from_json(value: &Value, fold: FoldPoint) -> Result<CanardExpansion, String> {
    let method = match value.get("method").and_then(Value::as_str) {
        Some("gspm") => Method::Gspm,
        Some("fcm") => Method::Fcm,
        other => return Err(format!("bad method field: {:?}", other)),
    };
    let mu = value
        .get("mu")
        .and_then(Value::as_array)
        .ok_or("missing mu array")?
        .iter()
        .map(|v| {
            v.as_str()
                .ok_or_else(|| "mu entries must be strings".to_string())
                .and_then(|s| s.parse::<BigRational>().map_err(|e| e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let f = value
        .get("F")
        .and_then(Value::as_array)
        .ok_or("missing F array")?
        .iter()
        .map(|entry| {
            let num = entry
                .get("num")
                .and_then(Value::as_str)
                .ok_or("missing num")?;
            let den = entry
                .get("den")
                .and_then(Value::as_str)
                .ok_or("missing den")?;
            let num = crate::sysmodel::parse_expression(num).map_err(|e| e.to_string())?;
            let den = crate::sysmodel::parse_expression(den).map_err(|e| e.to_string())?;
            if den.is_zero() {
                return Err("zero denominator".to_string());
            }
            Ok(RationalFunction::new(num, den))
        })
        .collect::<Result<Vec<_>, String>>()?;
    if f.is_empty() {
        return Err("expansion needs at least F0".into());
    }
    Ok(CanardExpansion {
        method,
        f,
        mu,
        fold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int};
    use crate::sysmodel::{fold_points, vdp};

    fn vdp_fold_plus() -> (SPSystem, FoldPoint) {
        let s = vdp();
        let m = critical_manifold(&s).unwrap();
        let folds = fold_points(&m).unwrap();
        (s, folds.last().unwrap().clone())
    }

    fn x() -> Polynomial {
        Polynomial::var(Var::X)
    }

    #[test]
    fn vdp_order_two_matches_known_coefficients() {
        let (s, fold) = vdp_fold_plus();
        let e = expand_canard(&s, 2, &fold).unwrap();
        assert_eq!(e.mu, vec![rat_int(1), rat(-1, 8)]);
        // F0 = x^3/3 - x
        assert_eq!(
            e.f[0],
            RationalFunction::from_poly(&x().pow(3).scale(&rat(1, 3)) - &x())
        );
        // F1 = -1/(1+x)
        assert_eq!(
            e.f[1],
            RationalFunction::new(-&Polynomial::one(), &Polynomial::one() + &x())
        );
        // F2 = -(x^2 + 4x + 7) / (8 (1+x)^4)
        let num = -&(&(&x().pow(2) + &x().scale(&rat_int(4))) + &Polynomial::from_int(7));
        let den = (&Polynomial::one() + &x()).pow(4).scale(&rat_int(8));
        assert_eq!(e.f[2], RationalFunction::new(num, den));
    }

    #[test]
    fn vdp_order_four_mu_series() {
        let (s, fold) = vdp_fold_plus();
        let e = expand_canard(&s, 4, &fold).unwrap();
        assert_eq!(
            e.mu,
            vec![rat_int(1), rat(-1, 8), rat(-3, 32), rat(-173, 1024)]
        );
    }

    #[test]
    fn mirrored_fold_negates_mu() {
        let s = vdp();
        let m = critical_manifold(&s).unwrap();
        let folds = fold_points(&m).unwrap();
        let e = expand_canard(&s, 2, &folds[0]).unwrap();
        assert_eq!(e.mu, vec![rat_int(-1), rat(1, 8)]);
        // F1 at the -1 fold: (mu0 - x)/(x^2-1) with mu0 = -1 -> 1/(1-x)
        assert_eq!(
            e.f[1],
            RationalFunction::new(-&Polynomial::one(), &x() - &Polynomial::one())
        );
    }

    #[test]
    fn mu_eval_reproduces_benoit_value() {
        let (s, fold) = vdp_fold_plus();
        let e = expand_canard(&s, 3, &fold).unwrap();
        let v = e.mu_eval(0.01);
        assert!((v - 0.99874).abs() < 5e-6, "mu(0.01) = {v}");
        let e4 = expand_canard(&s, 4, &fold).unwrap();
        assert!((e4.mu_eval(0.01) - 0.998740451).abs() < 1e-7);
        assert_eq!(e4.mu_eval(0.0), 1.0);
    }

    #[test]
    fn residual_vanishes_through_expansion_order() {
        let (s, fold) = vdp_fold_plus();
        for n in 1..=3 {
            let e = expand_canard(&s, n, &fold).unwrap();
            let r = invariance_residual(&s, &e);
            assert!(
                r.verified_order >= Some(n),
                "order {n}: verified {:?}",
                r.verified_order
            );
        }
    }

    #[test]
    fn order_zero_residual_with_free_mu() {
        let (s, fold) = vdp_fold_plus();
        let m = critical_manifold(&s).unwrap();
        let e = CanardExpansion {
            method: Method::Gspm,
            f: vec![m.f0],
            mu: vec![],
            fold,
        };
        let r = invariance_residual(&s, &e);
        assert!(r.series.coeff(0).is_zero());
        assert_eq!(r.verified_order, Some(0));
    }

    #[test]
    fn corrupted_coefficient_is_detected() {
        let (s, fold) = vdp_fold_plus();
        let mut e = expand_canard(&s, 2, &fold).unwrap();
        e.f[1] = &RationalFunction::zero() - &e.f[1]; // sign flip
        let r = invariance_residual(&s, &e);
        assert_eq!(r.verified_order, Some(0));
    }

    #[test]
    fn removability_is_sharp() {
        // Perturbing mu_{k-1} by any nonzero rational reintroduces the pole.
        let (s, fold) = vdp_fold_plus();
        let e = expand_canard(&s, 2, &fold).unwrap();
        for k in [1usize, 2] {
            let y_series = partial_sum_series(&e.f[..k], k);
            let mut mu_coeffs: Vec<RationalFunction> = e.mu[..k - 1]
                .iter()
                .map(|m| RationalFunction::constant(m.clone()))
                .collect();
            let perturbed = &e.mu[k - 1] + &rat(1, 7);
            mu_coeffs.push(RationalFunction::constant(perturbed));
            mu_coeffs.resize(k + 1, RationalFunction::zero());
            let mu_series = EpsSeries::new(mu_coeffs);
            let r = residual_series(&s, &y_series, Some(&mu_series), k);
            let fy = s.f.partial_derivative(Var::Y);
            let fy0 = expand_polynomial(
                &fy,
                Assignment::Series(&y_series),
                Assignment::Series(&mu_series),
                0,
            )
            .coeff(0)
            .clone();
            let f0p = e.f[0].partial_derivative(Var::X);
            let fk = &(-&r.coeff(k).clone()) / &(&f0p * &fy0);
            let mut pt = BTreeMap::new();
            pt.insert(Var::X, rat_int(1));
            let den_at = fk.den().substitute(Var::X, &Polynomial::one());
            assert!(den_at.is_zero(), "order {k}: pole must be back");
        }
    }

    #[test]
    fn json_round_trip() {
        let (s, fold) = vdp_fold_plus();
        let e = expand_canard(&s, 2, &fold).unwrap();
        let js = e.to_json();
        assert_eq!(js["mu"][1], "-1/8");
        let back = expansion_from_json(&js, e.fold.clone()).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn mu_independent_g_is_unsolvable() {
        // g has no mu: nothing can cancel the fold pole.
        let f = crate::sysmodel::parse_expression("x + y - x^3/3").unwrap();
        let g = crate::sysmodel::parse_expression("1 - x").unwrap();
        let s = SPSystem::new("nomu", f, g, None).unwrap();
        let m = critical_manifold(&s).unwrap();
        let folds = fold_points(&m).unwrap();
        let err = expand_canard(&s, 1, folds.last().unwrap()).unwrap_err();
        assert!(
            matches!(
                err,
                SolverError::ParameterUnsolvable { .. }
                    | SolverError::UnremovableSingularity { .. }
            ),
            "got {err:?}"
        );
    }
}
