//! Truncated power series in eps with rational-function coefficients.
//!
//! A series of order N represents c0 + c1*eps + ... + cN*eps^N plus an
//! unknown O(eps^{N+1}) tail. Coefficients are rational functions of the
//! remaining variables and must be eps-free. Division cancels the common
//! leading eps power of numerator and denominator; a genuinely divergent
//! quotient is an error, never a Laurent value.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use super::gcd::poly_lcm;
use super::monomial::Var;
use super::polynomial::Polynomial;
use super::ratfunc::RationalFunction;
use super::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsSeries {
    coeffs: Vec<RationalFunction>,
}

impl EpsSeries {
    pub fn new(coeffs: Vec<RationalFunction>) -> EpsSeries {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        for c in &coeffs {
            assert!(!c.contains_var(Var::Eps), "series coefficient contains eps");
        }
        EpsSeries { coeffs }
    }

    pub fn zero(order: usize) -> EpsSeries {
        EpsSeries {
            coeffs: vec![RationalFunction::zero(); order + 1],
        }
    }

    pub fn constant(c: RationalFunction, order: usize) -> EpsSeries {
        let mut coeffs = vec![RationalFunction::zero(); order + 1];
        coeffs[0] = c;
        EpsSeries::new(coeffs)
    }

    /// The series eps + O(eps^{order+1}).
    pub fn eps(order: usize) -> EpsSeries {
        let mut coeffs = vec![RationalFunction::zero(); order + 1];
        if order >= 1 {
            coeffs[1] = RationalFunction::one();
        }
        EpsSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &RationalFunction {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[RationalFunction] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> EpsSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        coeffs.resize(order + 1, RationalFunction::zero());
        EpsSeries { coeffs }
    }

    /// Multiply by eps^k, dropping what falls past the truncation order.
    pub fn shift_up(&self, k: usize) -> EpsSeries {
        let n = self.coeffs.len();
        let mut coeffs = vec![RationalFunction::zero(); n];
        for i in 0..n.saturating_sub(k) {
            coeffs[i + k] = self.coeffs[i].clone();
        }
        EpsSeries { coeffs }
    }

    /// Divide by eps^k; the first k coefficients must vanish. The
    /// truncation order drops by k.
    pub fn shift_down(&self, k: usize) -> EpsSeries {
        assert!(self.coeffs[..k].iter().all(|c| c.is_zero()));
        EpsSeries {
            coeffs: self.coeffs[k..].to_vec(),
        }
    }

    pub fn scale(&self, c: &RationalFunction) -> EpsSeries {
        EpsSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Coefficient-wise partial derivative (not with respect to eps).
    pub fn derivative_in(&self, v: Var) -> EpsSeries {
        assert!(v != Var::Eps);
        EpsSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.partial_derivative(v))
                .collect(),
        }
    }

    /// Truncated quotient after cancelling the common leading eps power.
    ///
    /// The result's order shrinks by the denominator's valuation.
    pub fn div(&self, den: &EpsSeries) -> Result<EpsSeries, AlgebraError> {
        let vd = den.valuation().ok_or(AlgebraError::ZeroDenominator)?;
        self.div_to(den, self.order() - vd)
    }

    /// Quotient computed only through `out_order`; higher coefficients
    /// are never formed or reduced.
    ///
    /// Internally the recursion runs denominator-free: both series are
    /// scaled by the lcm of their coefficient denominators, the quotient
    /// numerators p_k are built with polynomial arithmetic only
    /// (q_k = p_k / d0^{k+1}), and each output coefficient is reduced
    /// once at the end. Reduced-form arithmetic inside the recursion
    /// spends almost all its time in gcd calls on rapidly growing
    /// operands; this route avoids them.
    pub fn div_to(&self, den: &EpsSeries, out_order: usize) -> Result<EpsSeries, AlgebraError> {
        assert_eq!(self.order(), den.order(), "series order mismatch");
        let vd = den.valuation().ok_or(AlgebraError::ZeroDenominator)?;
        if !self.is_zero() {
            let vn = self.valuation().unwrap();
            if vn < vd {
                return Err(AlgebraError::DivergentLimit {
                    num_valuation: vn,
                    den_valuation: vd,
                });
            }
        }
        let num = self.shift_down(vd);
        let den = den.shift_down(vd);
        let n = out_order.min(num.order());

        let mut common = Polynomial::one();
        for c in num.coeffs().iter().chain(den.coeffs()) {
            common = poly_lcm(&common, c.den());
        }
        let clear = |s: &EpsSeries| -> Vec<Polynomial> {
            s.coeffs()
                .iter()
                .map(|c| {
                    let cofactor = common
                        .divide_exact(c.den())
                        .expect("lcm divides every denominator");
                    c.num() * &cofactor
                })
                .collect()
        };
        let nn = clear(&num);
        let dd = clear(&den);
        let d0 = dd[0].clone();
        debug_assert!(!d0.is_zero());

        // p_k = n_k d0^k - sum_{j<k} p_j d_{k-j} d0^{k-1-j}; q_k = p_k / d0^{k+1}.
        let mut d0_pows = vec![Polynomial::one()];
        for _ in 0..=n {
            d0_pows.push(d0_pows.last().unwrap() * &d0);
        }
        let mut p: Vec<Polynomial> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = &nn[k] * &d0_pows[k];
            for j in 0..k {
                acc = &acc - &(&(&p[j] * &dd[k - j]) * &d0_pows[k - 1 - j]);
            }
            p.push(acc);
        }
        let q = p
            .into_iter()
            .enumerate()
            .map(|(k, pk)| RationalFunction::from_power_quotient(pk, &d0, k as u32 + 1))
            .collect();
        Ok(EpsSeries { coeffs: q })
    }

    /// Horner evaluation in double precision at a numeric eps;
    /// coefficients are evaluated at the given (x, y, mu, u) point.
    pub fn eval_f64(&self, point: [f64; 5], eps: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * eps + c.eval_f64(point);
        }
        acc
    }
}

/// The eps -> 0 limit of a series quotient: cancel the common leading
/// eps power, then take the ratio of constant terms.
pub fn eps_limit(num: &EpsSeries, den: &EpsSeries) -> Result<RationalFunction, AlgebraError> {
    let q = num.div_to(den, 0)?;
    Ok(q.coeff(0).clone())
}

/// Per-variable substitution value used by [`expand_polynomial`].
pub enum Assignment<'a> {
    /// Leave the variable symbolic inside the coefficients.
    Symbolic,
    /// Replace the variable by a truncated series.
    Series(&'a EpsSeries),
}

/// Expand a polynomial into an eps-series, substituting series for `y`
/// and/or `mu` while `x` and `u` stay symbolic and `eps` becomes the
/// series variable.
pub fn expand_polynomial(
    p: &Polynomial,
    y: Assignment<'_>,
    mu: Assignment<'_>,
    order: usize,
) -> EpsSeries {
    let mut power_cache: BTreeMap<(usize, u16), EpsSeries> = BTreeMap::new();
    let mut acc = EpsSeries::zero(order);
    for (m, c) in p.iter() {
        // The eps-free symbolic residue of the monomial.
        let mut exps = m.0;
        let eps_pow = exps[Var::Eps.index()] as usize;
        exps[Var::Eps.index()] = 0;
        let mut sym = super::monomial::Monomial(exps);
        let y_pow = sym.exponent(Var::Y);
        if matches!(y, Assignment::Series(_)) {
            sym.0[Var::Y.index()] = 0;
        }
        let mu_pow = sym.exponent(Var::Mu);
        if matches!(mu, Assignment::Series(_)) {
            sym.0[Var::Mu.index()] = 0;
        }
        let base = RationalFunction::from_poly(Polynomial::monomial(sym, c.clone()));

        if eps_pow > order {
            continue;
        }
        let mut term = EpsSeries::constant(base, order);
        if let Assignment::Series(ys) = y {
            if y_pow > 0 {
                term = &term * &series_pow(&mut power_cache, 0, ys, y_pow, order);
            }
        }
        if let Assignment::Series(ms) = mu {
            if mu_pow > 0 {
                term = &term * &series_pow(&mut power_cache, 1, ms, mu_pow, order);
            }
        }
        if eps_pow > 0 {
            term = term.shift_up(eps_pow);
        }
        acc = &acc + &term;
    }
    acc
}

fn series_pow(
    cache: &mut BTreeMap<(usize, u16), EpsSeries>,
    slot: usize,
    base: &EpsSeries,
    k: u16,
    order: usize,
) -> EpsSeries {
    if let Some(v) = cache.get(&(slot, k)) {
        return v.clone();
    }
    let value = if k == 1 {
        base.truncate(order)
    } else {
        let prev = series_pow(cache, slot, base, k - 1, order);
        &prev * &base.truncate(order)
    };
    cache.insert((slot, k), value.clone());
    value
}

/// Expand a rational function as an eps-series (numerator and
/// denominator expanded separately, then divided with cancellation).
pub fn expand_rational(
    rf: &RationalFunction,
    y: Assignment<'_>,
    mu: Assignment<'_>,
    order: usize,
) -> Result<EpsSeries, AlgebraError> {
    let num = expand_polynomial(rf.num(), reborrow(&y), reborrow(&mu), order);
    let den = expand_polynomial(rf.den(), y, mu, order);
    num.div(&den)
}

/// Substitute a truncated series for one variable of a rational
/// function. A denominator that vanishes identically through the
/// truncation order is `ZeroDenominator`; a quotient with a pole at
/// eps = 0 is `DivergentLimit` (never a Laurent value).
pub fn substitute_series(
    rf: &RationalFunction,
    v: Var,
    value: &EpsSeries,
    order: usize,
) -> Result<EpsSeries, AlgebraError> {
    let num = compose_polynomial(rf.num(), v, value, order);
    let den = compose_polynomial(rf.den(), v, value, order);
    num.div(&den)
}

/// Horner composition of a polynomial with a series in variable `v`;
/// the remaining non-eps variables stay symbolic in the coefficients.
pub fn compose_polynomial(
    p: &Polynomial,
    v: Var,
    value: &EpsSeries,
    order: usize,
) -> EpsSeries {
    assert!(v != Var::Eps, "eps is the series variable itself");
    let uni = p.as_univariate(v);
    let mut acc = EpsSeries::zero(order);
    let value = value.truncate(order);
    let top = match uni.keys().next_back() {
        Some(&top) => top,
        None => return acc,
    };
    for k in (0..=top).rev() {
        acc = &acc * &value;
        if let Some(c) = uni.get(&k) {
            acc = &acc + &expand_polynomial(c, Assignment::Symbolic, Assignment::Symbolic, order);
        }
    }
    acc
}

fn reborrow<'a>(a: &Assignment<'a>) -> Assignment<'a> {
    match a {
        Assignment::Symbolic => Assignment::Symbolic,
        Assignment::Series(s) => Assignment::Series(s),
    }
}

impl Add for &EpsSeries {
    type Output = EpsSeries;
    fn add(self, rhs: &EpsSeries) -> EpsSeries {
        assert_eq!(self.order(), rhs.order(), "series order mismatch");
        EpsSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &EpsSeries {
    type Output = EpsSeries;
    fn sub(self, rhs: &EpsSeries) -> EpsSeries {
        assert_eq!(self.order(), rhs.order(), "series order mismatch");
        EpsSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &EpsSeries {
    type Output = EpsSeries;
    fn mul(self, rhs: &EpsSeries) -> EpsSeries {
        assert_eq!(self.order(), rhs.order(), "series order mismatch");
        let n = self.order();
        let mut coeffs = vec![RationalFunction::zero(); n + 1];
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if rhs.coeffs[j].is_zero() {
                    continue;
                }
                coeffs[i + j] = &coeffs[i + j] + &(&self.coeffs[i] * &rhs.coeffs[j]);
            }
        }
        EpsSeries { coeffs }
    }
}

impl fmt::Display for EpsSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                f.write_str(" + ")?;
            }
            match k {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "({})*eps", c)?,
                _ => write!(f, "({})*eps^{}", c, k)?,
            }
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        write!(f, " + O(eps^{})", self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::polynomial::rat_int;

    fn rf_int(n: i64) -> RationalFunction {
        RationalFunction::constant(rat_int(n))
    }

    fn x_rf() -> RationalFunction {
        RationalFunction::var(Var::X)
    }

    #[test]
    fn binomial_substitution() {
        // x^2 at x = 1 + eps, truncated at order 2 -> 1 + 2eps + eps^2.
        // Expressed through expand_polynomial by treating y as the series.
        let p = Polynomial::var_pow(Var::Y, 2);
        let one_plus_eps = &EpsSeries::constant(rf_int(1), 2) + &EpsSeries::eps(2);
        let s = expand_polynomial(&p, Assignment::Series(&one_plus_eps), Assignment::Symbolic, 2);
        assert_eq!(s.coeff(0), &rf_int(1));
        assert_eq!(s.coeff(1), &rf_int(2));
        assert_eq!(s.coeff(2), &rf_int(1));
    }

    #[test]
    fn limit_cancels_common_power() {
        // (eps*x)/(eps) -> x
        let num = EpsSeries::constant(x_rf(), 2).shift_up(1);
        let den = EpsSeries::eps(2);
        assert_eq!(eps_limit(&num, &den).unwrap(), x_rf());
        // (eps^2*(1+x))/(eps^2) -> 1+x
        let one_plus_x = &rf_int(1) + &x_rf();
        let num = EpsSeries::constant(one_plus_x.clone(), 3).shift_up(2);
        let den = EpsSeries::eps(3).shift_up(1);
        assert_eq!(eps_limit(&num, &den).unwrap(), one_plus_x);
    }

    #[test]
    fn divergent_quotient_is_an_error() {
        // eps / eps^2
        let num = EpsSeries::eps(3);
        let den = EpsSeries::eps(3).shift_up(1);
        match eps_limit(&num, &den) {
            Err(AlgebraError::DivergentLimit {
                num_valuation: 1,
                den_valuation: 2,
            }) => {}
            other => panic!("expected divergence, got {:?}", other),
        }
    }

    #[test]
    fn zero_denominator_is_an_error() {
        let num = EpsSeries::eps(2);
        let den = EpsSeries::zero(2);
        assert!(matches!(
            eps_limit(&num, &den),
            Err(AlgebraError::ZeroDenominator)
        ));
    }

    #[test]
    fn series_substitution_for_x() {
        // x^2 at x = 1 + eps -> 1 + 2eps + eps^2
        let sq = RationalFunction::from_poly(Polynomial::var_pow(Var::X, 2));
        let one_plus_eps = &EpsSeries::constant(rf_int(1), 2) + &EpsSeries::eps(2);
        let s = substitute_series(&sq, Var::X, &one_plus_eps, 2).unwrap();
        assert_eq!(s.coeffs(), &[rf_int(1), rf_int(2), rf_int(1)]);

        // 1/(x^2 - 1) at x = 1 + eps: denominator 2eps + eps^2 has a
        // pole at eps = 0, so the quotient is rejected as divergent.
        let pole = RationalFunction::new(
            Polynomial::one(),
            &Polynomial::var_pow(Var::X, 2) - &Polynomial::one(),
        );
        match substitute_series(&pole, Var::X, &one_plus_eps, 2) {
            Err(AlgebraError::DivergentLimit {
                num_valuation: 0,
                den_valuation: 1,
            }) => {}
            other => panic!("expected divergence, got {:?}", other),
        }

        // The substituted denominator expands to exactly 2eps + eps^2.
        let den_series = compose_polynomial(
            &(&Polynomial::var_pow(Var::X, 2) - &Polynomial::one()),
            Var::X,
            &one_plus_eps,
            2,
        );
        assert_eq!(den_series.coeffs(), &[rf_int(0), rf_int(2), rf_int(1)]);
    }

    #[test]
    fn substituting_the_manifold_graph_annihilates_f() {
        // x + y - x^3/3 with y = x^3/3 - x -> 0
        let x = Polynomial::var(Var::X);
        let f = &(&x + &Polynomial::var(Var::Y)) - &x.pow(3).scale(&crate::algebra::rat(1, 3));
        let f0 = RationalFunction::from_poly(&x.pow(3).scale(&crate::algebra::rat(1, 3)) - &x);
        let graph = EpsSeries::constant(f0, 2);
        let s = expand_polynomial(&f, Assignment::Series(&graph), Assignment::Symbolic, 2);
        assert!(s.is_zero());
    }

    #[test]
    fn truncated_division_matches_hand_expansion() {
        // 1 / (2eps + eps^2): divergent.
        let num = EpsSeries::constant(rf_int(1), 2);
        let den = &EpsSeries::eps(2).scale(&rf_int(2)) + &EpsSeries::eps(2).shift_up(1);
        assert!(matches!(
            num.div(&den),
            Err(AlgebraError::DivergentLimit { .. })
        ));
        // (2eps + eps^2) / (2eps + eps^2) = 1 after cancellation.
        let q = den.div(&den).unwrap();
        assert_eq!(q.coeff(0), &rf_int(1));
        assert!(q.coeffs()[1..].iter().all(|c| c.is_zero()));
    }
}
