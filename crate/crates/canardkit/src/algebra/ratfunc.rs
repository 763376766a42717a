//! Reduced rational functions.
//!
//! Canonical form: gcd(num, den) = 1, denominator integer-primitive with
//! positive leading coefficient. Value equality therefore coincides with
//! structural equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::Zero;

use super::gcd::poly_gcd;
use super::monomial::Var;
use super::polynomial::Polynomial;
use super::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> RationalFunction {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RationalFunction {
                num: Polynomial::zero(),
                den: Polynomial::one(),
            };
        }
        if den.as_constant().is_some() {
            return Self::finish(num, den);
        }
        let g = poly_gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.divide_exact(&g).expect("gcd divides numerator"),
                den.divide_exact(&g).expect("gcd divides denominator"),
            )
        };
        Self::finish(num, den)
    }

    /// Canonical form for an already-coprime pair: the denominator's
    /// rational content moves into the numerator.
    fn finish(num: Polynomial, den: Polynomial) -> RationalFunction {
        let (scale, den) = den.to_integer_primitive();
        let num = num.scale(&scale.recip());
        RationalFunction { num, den }
    }

    /// Reduced form of `num / base^exp`.
    ///
    /// Peels whole `base` factors by exact division, then strips the
    /// residual shared factors with gcds against `base` alone, so the
    /// expensive general gcd never sees the full power.
    pub fn from_power_quotient(num: Polynomial, base: &Polynomial, exp: u32) -> RationalFunction {
        assert!(!base.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RationalFunction::zero();
        }
        let mut num = num;
        let mut exp = exp;
        if base.as_constant().is_some() {
            return Self::finish(num, base.pow(exp));
        }
        while exp > 0 {
            match num.divide_exact(base) {
                Some(q) => {
                    num = q;
                    exp -= 1;
                }
                None => break,
            }
        }
        if exp == 0 {
            return RationalFunction::from_poly(num);
        }
        let mut den = base.pow(exp);
        loop {
            let g = poly_gcd(&num, base);
            if g.as_constant().is_some() {
                // No prime of base left in num, hence none in den.
                return Self::finish(num, den);
            }
            match (num.divide_exact(&g), den.divide_exact(&g)) {
                (Some(n), Some(d)) => {
                    num = n;
                    den = d;
                    if den.as_constant().is_some() {
                        return Self::finish(num, den);
                    }
                }
                // A prime of g is exhausted on one side; finish with the
                // general constructor on what remains.
                _ => return RationalFunction::new(num, den),
            }
        }
    }

    pub fn from_poly(p: Polynomial) -> RationalFunction {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn zero() -> RationalFunction {
        RationalFunction::from_poly(Polynomial::zero())
    }

    pub fn one() -> RationalFunction {
        RationalFunction::from_poly(Polynomial::one())
    }

    pub fn constant(c: BigRational) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::constant(c))
    }

    pub fn var(v: Var) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::var(v))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if !self.den.is_one() {
            return None;
        }
        self.num.as_constant()
    }

    /// The polynomial itself when the denominator is constant.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        self.den.is_one().then(|| self.num.clone())
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn recip(&self) -> RationalFunction {
        assert!(!self.is_zero(), "reciprocal of zero");
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, k: u32) -> RationalFunction {
        RationalFunction::new(self.num.pow(k), self.den.pow(k))
    }

    /// Quotient rule, re-reduced.
    pub fn partial_derivative(&self, v: Var) -> RationalFunction {
        let dn = self.num.partial_derivative(v);
        if self.den.is_one() {
            return RationalFunction::from_poly(dn);
        }
        let dd = self.den.partial_derivative(v);
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        let den = &self.den * &self.den;
        RationalFunction::new(num, den)
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &BTreeMap<Var, BigRational>) -> Result<BigRational, AlgebraError> {
        let den = self.den.eval(point);
        if den.is_zero() {
            return Err(AlgebraError::PoleAtPoint);
        }
        Ok(self.num.eval(point) / den)
    }

    pub fn eval_f64(&self, p: [f64; 5]) -> f64 {
        self.num.eval_f64(p) / self.den.eval_f64(p)
    }

    /// Substitute another rational function for a variable.
    ///
    /// Errors with `ZeroDenominator` when the substituted denominator
    /// vanishes identically.
    pub fn substitute(
        &self,
        v: Var,
        value: &RationalFunction,
    ) -> Result<RationalFunction, AlgebraError> {
        let num = substitute_poly_rf(&self.num, v, value);
        let den = substitute_poly_rf(&self.den, v, value);
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(&num / &den)
    }
}

/// Compose a polynomial with a rational value for one variable
/// (Horner in `v`; always well-defined).
pub fn substitute_poly_rf(p: &Polynomial, v: Var, value: &RationalFunction) -> RationalFunction {
    if !p.contains_var(v) {
        return RationalFunction::from_poly(p.clone());
    }
    let uni = p.as_univariate(v);
    let top = *uni.keys().next_back().unwrap();
    let mut acc = RationalFunction::zero();
    for k in (0..=top).rev() {
        acc = &acc * value;
        if let Some(c) = uni.get(&k) {
            acc = &acc + &RationalFunction::from_poly(c.clone());
        }
    }
    acc
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RationalFunction::new(num, den)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &-rhs
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        assert!(!rhs.is_zero(), "division by zero rational function");
        if self.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::polynomial::{rat, rat_int};

    fn x() -> Polynomial {
        Polynomial::var(Var::X)
    }

    fn one() -> Polynomial {
        Polynomial::one()
    }

    #[test]
    fn reduction_cancels_common_factor() {
        // (x^2 - 1)/(x - 1) = x + 1
        let num = &x().pow(2) - &one();
        let den = &x() - &one();
        let rf = RationalFunction::new(num, den);
        assert_eq!(rf, RationalFunction::from_poly(&x() + &one()));
    }

    #[test]
    fn denominator_normalization_moves_content() {
        // (6x) / 4 -> (3x/2) / 1
        let rf = RationalFunction::new(x().scale(&rat_int(6)), Polynomial::from_int(4));
        assert!(rf.is_polynomial());
        assert_eq!(rf.num(), &x().scale(&rat(3, 2)));
    }

    #[test]
    fn quotient_rule() {
        // d/dx 1/(1+x) = -1/(1+x)^2
        let rf = RationalFunction::new(one(), &one() + &x());
        let d = rf.partial_derivative(Var::X);
        let expect = RationalFunction::new(-&one(), (&one() + &x()).pow(2));
        assert_eq!(d, expect);
    }

    #[test]
    fn eval_hits_pole() {
        // 1/(x^2 - 1) at x = 1
        let rf = RationalFunction::new(one(), &x().pow(2) - &one());
        let mut pt = BTreeMap::new();
        pt.insert(Var::X, rat_int(1));
        assert!(matches!(rf.eval(&pt), Err(AlgebraError::PoleAtPoint)));
        pt.insert(Var::X, rat_int(2));
        assert_eq!(rf.eval(&pt).unwrap(), rat(1, 3));
        // -1/(1+x) at x = 1 -> -1/2
        let rf = RationalFunction::new(-&one(), &one() + &x());
        let mut pt = BTreeMap::new();
        pt.insert(Var::X, rat_int(1));
        assert_eq!(rf.eval(&pt).unwrap(), rat(-1, 2));
    }

    #[test]
    fn substitution_is_a_homomorphism() {
        let a = RationalFunction::new(&x() + &one(), &x().pow(2) + &one());
        let b = RationalFunction::new(x().clone(), &x() - &Polynomial::from_int(2));
        let val = RationalFunction::new(&x() + &Polynomial::from_int(3), &x() + &one());
        let lhs = (&a * &b).substitute(Var::X, &val).unwrap();
        let rhs = &a.substitute(Var::X, &val).unwrap() * &b.substitute(Var::X, &val).unwrap();
        assert_eq!(lhs, rhs);
    }
}
