//! Variables and monomials of the fixed five-variable ambient ring.

use std::cmp::Ordering;
use std::fmt;

/// The ring variables, in precedence order for the graded-lex comparison.
///
/// `U` is the transient unknown used while solving for the next
/// bifurcation-parameter coefficient; it never appears in user input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X = 0,
    Y = 1,
    Mu = 2,
    Eps = 3,
    U = 4,
}

pub const VARS: [Var; 5] = [Var::X, Var::Y, Var::Mu, Var::Eps, Var::U];

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Mu => "mu",
            Var::Eps => "eps",
            Var::U => "u",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "x" => Some(Var::X),
            "y" => Some(Var::Y),
            "mu" => Some(Var::Mu),
            "eps" => Some(Var::Eps),
            "u" => Some(Var::U),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent vector over (x, y, mu, eps, u).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial(pub [u16; 5]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; 5]);

    pub fn var(v: Var) -> Monomial {
        let mut e = [0u16; 5];
        e[v.index()] = 1;
        Monomial(e)
    }

    pub fn var_pow(v: Var, k: u16) -> Monomial {
        let mut e = [0u16; 5];
        e[v.index()] = k;
        Monomial(e)
    }

    pub fn exponent(&self, v: Var) -> u16 {
        self.0[v.index()]
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; 5]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = [0u16; 5];
        for i in 0..5 {
            e[i] = self.0[i].checked_add(other.0[i]).expect("monomial exponent overflow");
        }
        Monomial(e)
    }

    /// Exact quotient, or `None` when any exponent of `other` exceeds ours.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut e = [0u16; 5];
        for i in 0..5 {
            e[i] = self.0[i].checked_sub(other.0[i])?;
        }
        Some(Monomial(e))
    }
}

/// Graded-lexicographic: total degree first, then lexicographic with x
/// most significant. This is the canonical order used for iteration,
/// printing, and polynomial division.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for v in VARS {
            let e = self.exponent(v);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", v.name())?;
            } else {
                write!(f, "{}^{}", v.name(), e)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_is_total_and_graded() {
        let x = Monomial::var(Var::X);
        let y = Monomial::var(Var::Y);
        let x2 = Monomial::var_pow(Var::X, 2);
        let xy = x.mul(&y);
        assert!(x2 > xy, "same degree: lex on x decides");
        assert!(xy > x, "degree dominates");
        assert!(x > y);
        assert!(y > Monomial::ONE);
    }

    #[test]
    fn division_is_partial_inverse_of_multiplication() {
        let a = Monomial([3, 1, 0, 2, 0]);
        let b = Monomial([1, 1, 0, 0, 0]);
        let q = a.div(&b).unwrap();
        assert_eq!(q.mul(&b), a);
        assert_eq!(b.div(&a), None);
    }
}
