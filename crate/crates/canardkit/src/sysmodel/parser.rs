//! Recursive-descent parser for vector-field expressions.
//!
//! Grammar:
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := factor (("*" | "/") factor)*
//! factor   := "-"? base ("^" natural)?
//! base     := "x" | "y" | "mu" | "eps" | rational | "(" expr ")"
//! rational := integer ("/" positive-integer)?
//! ```
//!
//! Division is permitted only by nonzero rational constants, whitespace
//! is insignificant, and implicit multiplication is rejected. The unary
//! minus is a superset of the file grammar so canonical printing
//! round-trips.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{Polynomial, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("non-polynomial expression at line {line}, column {column}: {message}")]
    NonPolynomial {
        line: usize,
        column: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Number(BigInt),
    Ident(String),
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn advance_position(consumed: &[char], line: &mut usize, column: &mut usize) {
    for &ch in consumed {
        if ch == '\n' {
            *line += 1;
            *column = 1;
        } else {
            *column += 1;
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, column);
        let start = i;
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    _ => Tok::RParen,
                };
                i += 1;
                out.push(Spanned { tok, line: tline, column: tcol });
            }
            '0'..='9' => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let value: BigInt = digits.parse().expect("digit run parses");
                out.push(Spanned { tok: Tok::Number(value), line: tline, column: tcol });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let ident: String = chars[start..i].iter().collect();
                out.push(Spanned { tok: Tok::Ident(ident), line: tline, column: tcol });
            }
            other => {
                return Err(ParseError::Syntax {
                    line: tline,
                    column: tcol,
                    message: format!("unexpected character '{}'", other),
                });
            }
        }
        advance_position(&chars[start..i], &mut line, &mut column);
    }
    out.push(Spanned { tok: Tok::Eof, line, column });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, at: &Spanned, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: at.line,
            column: at.column,
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.next();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    acc = &acc * &self.factor()?;
                }
                Tok::Slash => {
                    let at = self.next();
                    let rhs = self.factor()?;
                    match rhs.as_constant() {
                        Some(c) if !c.is_zero() => {
                            acc = acc.scale(&c.recip());
                        }
                        Some(_) => {
                            return Err(ParseError::NonPolynomial {
                                line: at.line,
                                column: at.column,
                                message: "division by zero".into(),
                            });
                        }
                        None => {
                            return Err(ParseError::NonPolynomial {
                                line: at.line,
                                column: at.column,
                                message: "division by a non-constant expression".into(),
                            });
                        }
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.next();
            let inner = self.factor()?;
            return Ok(-&inner);
        }
        let base = self.base()?;
        if self.peek().tok == Tok::Caret {
            self.next();
            let at = self.peek().clone();
            match self.next().tok {
                Tok::Number(n) => {
                    let exp: u32 = n.try_into().map_err(|_| ParseError::Syntax {
                        line: at.line,
                        column: at.column,
                        message: "exponent out of range".into(),
                    })?;
                    if exp > 512 {
                        return self.syntax(&at, "exponent too large");
                    }
                    return Ok(base.pow(exp));
                }
                _ => return self.syntax(&at, "expected a natural-number exponent"),
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Polynomial, ParseError> {
        let at = self.peek().clone();
        match self.next().tok {
            Tok::Ident(name) => match Var::from_name(&name) {
                Some(v) if v != Var::U => Ok(Polynomial::var(v)),
                _ => self.syntax(&at, format!("unknown symbol '{}'", name)),
            },
            Tok::Number(n) => Ok(Polynomial::constant(BigRational::from_integer(n))),
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.next();
                if close.tok != Tok::RParen {
                    return self.syntax(&close, "expected ')'");
                }
                Ok(inner)
            }
            _ => self.syntax(&at, "expected a variable, number, or '('"),
        }
    }
}

/// Parse one expression into a polynomial in canonical form.
pub fn parse_expression(text: &str) -> Result<Polynomial, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser { toks, pos: 0 };
    let poly = parser.expr()?;
    let end = parser.peek().clone();
    if end.tok != Tok::Eof {
        return parser.syntax(&end, "trailing input");
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Polynomial, Var};

    fn x() -> Polynomial {
        Polynomial::var(Var::X)
    }
    fn y() -> Polynomial {
        Polynomial::var(Var::Y)
    }

    #[test]
    fn van_der_pol_fast_equation() {
        let p = parse_expression("x + y - x^3/3").unwrap();
        let expect = &(&x() + &y()) - &x().pow(3).scale(&rat(1, 3));
        assert_eq!(p, expect);
    }

    #[test]
    fn van_der_pol_slow_equation() {
        let p = parse_expression("mu - x").unwrap();
        let expect = &Polynomial::var(Var::Mu) - &x();
        assert_eq!(p, expect);
    }

    #[test]
    fn division_by_variable_is_rejected() {
        match parse_expression("x / y") {
            Err(ParseError::NonPolynomial { .. }) => {}
            other => panic!("expected NonPolynomial, got {:?}", other),
        }
    }

    #[test]
    fn division_by_zero_is_rejected() {
        assert!(matches!(
            parse_expression("x / 0"),
            Err(ParseError::NonPolynomial { .. })
        ));
    }

    #[test]
    fn rational_literals_are_exact() {
        let p = parse_expression("2/3 * x^2").unwrap();
        assert_eq!(p, x().pow(2).scale(&rat(2, 3)));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_expression("x +\n y $") {
            Err(ParseError::Syntax { line: 2, column, .. }) => assert_eq!(column, 4),
            other => panic!("expected positioned syntax error, got {:?}", other),
        }
        assert!(parse_expression("u + 1").is_err());
        assert!(parse_expression("x y").is_err(), "implicit multiplication");
    }

    #[test]
    fn unary_minus_binds_below_power() {
        let p = parse_expression("-x^2").unwrap();
        assert_eq!(p, -&x().pow(2));
    }

    #[test]
    fn print_parse_round_trip() {
        let p = parse_expression("x^3/3 - x + 7/2 * y - eps * mu^2").unwrap();
        let reparsed = parse_expression(&p.to_string()).unwrap();
        assert_eq!(p, reparsed);
    }
}
