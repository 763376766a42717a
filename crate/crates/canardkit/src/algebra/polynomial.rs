//! Sparse multivariate polynomials with exact big-rational coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by the graded-lex monomial order,
//! so every polynomial has exactly one representation and printing is
//! deterministic. No zero coefficient is ever stored.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::{Monomial, Var, VARS};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::ONE, c);
        }
        Polynomial { terms }
    }

    pub fn from_int(n: i64) -> Polynomial {
        Polynomial::constant(rat_int(n))
    }

    pub fn var(v: Var) -> Polynomial {
        Polynomial::monomial(Monomial::var(v), BigRational::one())
    }

    pub fn var_pow(v: Var, k: u16) -> Polynomial {
        Polynomial::monomial(Monomial::var_pow(v, k), BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Polynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `Some(c)` when the polynomial is the constant `c` (zero included).
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact formal partial derivative.
    pub fn partial_derivative(&self, v: Var) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let mut exps = m.0;
            exps[v.index()] = e - 1;
            out.add_term(Monomial(exps), c * rat_int(e as i64));
        }
        out
    }

    /// Antiderivative in `v` with zero constant term.
    pub fn antiderivative(&self, v: Var) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            let mut exps = m.0;
            exps[v.index()] = e + 1;
            out.add_term(Monomial(exps), c / rat_int(e as i64 + 1));
        }
        out
    }

    /// View as a univariate polynomial in `v` with polynomial coefficients.
    pub fn as_univariate(&self, v: Var) -> BTreeMap<u16, Polynomial> {
        let mut out: BTreeMap<u16, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            let mut exps = m.0;
            exps[v.index()] = 0;
            out.entry(e)
                .or_insert_with(Polynomial::zero)
                .add_term(Monomial(exps), c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    pub fn from_univariate(v: Var, coeffs: &BTreeMap<u16, Polynomial>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (e, p) in coeffs {
            out = &out + &p.mul_monomial(&Monomial::var_pow(v, *e), &BigRational::one());
        }
        out
    }

    /// Substitute a polynomial for a variable (Horner evaluation in `v`).
    pub fn substitute(&self, v: Var, value: &Polynomial) -> Polynomial {
        if !self.contains_var(v) {
            return self.clone();
        }
        let uni = self.as_univariate(v);
        let top = *uni.keys().next_back().unwrap();
        let mut acc = Polynomial::zero();
        for k in (0..=top).rev() {
            acc = &acc * value;
            if let Some(c) = uni.get(&k) {
                acc = &acc + c;
            }
        }
        acc
    }

    /// Exact evaluation; `point` must cover every variable that occurs.
    pub fn eval(&self, point: &BTreeMap<Var, BigRational>) -> BigRational {
        let mut sum = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for v in VARS {
                let e = m.exponent(v);
                if e == 0 {
                    continue;
                }
                let val = point
                    .get(&v)
                    .unwrap_or_else(|| panic!("eval point missing variable {}", v.name()));
                for _ in 0..e {
                    term *= val;
                }
            }
            sum += term;
        }
        sum
    }

    /// Double-precision evaluation at `(x, y, mu, eps, u)`.
    pub fn eval_f64(&self, p: [f64; 5]) -> f64 {
        let mut sum = 0.0;
        for (m, c) in &self.terms {
            let mut term = rational_to_f64(c);
            for i in 0..5 {
                let e = m.0[i];
                if e > 0 {
                    term *= p[i].powi(e as i32);
                }
            }
            sum += term;
        }
        sum
    }

    /// Rational content: gcd of coefficient numerators over lcm of
    /// denominators, with the sign of the leading coefficient.
    pub fn content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if self.leading().unwrap().1.is_negative() {
            content = -content;
        }
        content
    }

    /// Split into `scale * primitive` where the primitive part has
    /// coprime integer coefficients and positive leading coefficient.
    pub fn to_integer_primitive(&self) -> (BigRational, Polynomial) {
        if self.is_zero() {
            return (BigRational::one(), Polynomial::zero());
        }
        let content = self.content();
        let inv = content.recip();
        (content, self.scale(&inv))
    }

    /// Single-divisor multivariate division in the canonical order:
    /// `self = q * d + r` with no term of `r` divisible by the leading
    /// term of `d`.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let (lm, lc) = {
            let (m, c) = d.leading().unwrap();
            (*m, c.clone())
        };
        let mut q = Polynomial::zero();
        let mut r = Polynomial::zero();
        let mut work = self.clone();
        while let Some((m, c)) = work.leading().map(|(m, c)| (*m, c.clone())) {
            match m.div(&lm) {
                Some(qm) => {
                    let qc = &c / &lc;
                    q.add_term(qm, qc.clone());
                    work = &work - &d.mul_monomial(&qm, &qc);
                }
                None => {
                    r.add_term(m, c.clone());
                    work.terms.remove(&m);
                }
            }
        }
        (q, r)
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn divide_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        if self.is_zero() {
            return Some(Polynomial::zero());
        }
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Largest `k` with `eps^k` dividing every term, and the quotient.
    pub fn strip_eps_power(&self) -> (u32, Polynomial) {
        if self.is_zero() {
            return (0, Polynomial::zero());
        }
        let k = self
            .terms
            .keys()
            .map(|m| m.exponent(Var::Eps))
            .min()
            .unwrap();
        if k == 0 {
            return (0, self.clone());
        }
        let out = Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut exps = m.0;
                    exps[Var::Eps.index()] -= k;
                    (Monomial(exps), c.clone())
                })
                .collect(),
        };
        (k as u32, out)
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    // Good enough for the coefficient magnitudes this toolkit produces.
    let num = bigint_to_f64(r.numer());
    let den = bigint_to_f64(r.denom());
    num / den
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    // BigInt::to_f64 exists via ToPrimitive but loses precision the same
    // way; this keeps the dependency surface minimal.
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

/// Canonical printing: terms in descending graded-lex order, rational
/// coefficients rendered so that the output re-parses to the same
/// polynomial (e.g. `x^3/3 - x`, `-x^2/8 - x/2 - 7/8`).
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else if negative {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mag = c.abs();
            let numer = mag.numer();
            let denom = mag.denom();
            if m.is_one() {
                write!(f, "{}", numer)?;
            } else {
                if !numer.is_one() {
                    write!(f, "{}*", numer)?;
                }
                write!(f, "{}", m)?;
            }
            if !denom.is_one() {
                write!(f, "/{}", denom)?;
            }
        }
        Ok(())
    }
}
