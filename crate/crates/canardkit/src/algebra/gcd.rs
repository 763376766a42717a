//! Multivariate polynomial gcd over the rationals.
//!
//! Classical content/primitive-part recursion with a primitive
//! pseudo-remainder sequence in the main variable. Constants are units
//! over Q, so every content and every result is normalized to an
//! integer-primitive polynomial with positive leading coefficient.

use std::collections::BTreeMap;

use super::monomial::{Var, VARS};
use super::polynomial::Polynomial;

/// Gcd up to units in Q[x, y, mu, eps, u]: integer-primitive, positive
/// leading coefficient; `1` when the inputs share no nonconstant factor.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.to_integer_primitive().1;
    }
    if b.is_zero() {
        return a.to_integer_primitive().1;
    }
    gcd_prim(&a.to_integer_primitive().1, &b.to_integer_primitive().1)
}

/// Both inputs integer-primitive and nonzero.
fn gcd_prim(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let main = match main_variable(a, b) {
        Some(v) => v,
        None => return Polynomial::one(),
    };
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Polynomial::one();
    }

    let (cont_a, mut p) = split_content(&a.as_univariate(main));
    let (cont_b, mut q) = split_content(&b.as_univariate(main));
    let cont_gcd = gcd_prim(&cont_a, &cont_b);

    if degree(&p) < degree(&q) {
        std::mem::swap(&mut p, &mut q);
    }
    let part = subresultant_gcd_part(p, q);
    let pp = Polynomial::from_univariate(main, &split_content(&part).1);
    (&pp * &cont_gcd).to_integer_primitive().1
}

/// Subresultant pseudo-remainder sequence (Collins/Brown-Traub): each
/// remainder is divided exactly by the predicted factor g*h^delta, so
/// coefficients stay polynomially bounded without any per-round content
/// gcds. Returns the last nonzero element of the sequence; a constant
/// means the inputs are coprime in the main variable.
fn subresultant_gcd_part(mut p: Uni, mut q: Uni) -> Uni {
    debug_assert!(!p.is_empty() && !q.is_empty());
    let mut g = Polynomial::one();
    let mut h = Polynomial::one();
    loop {
        if degree(&q) == 0 {
            let mut one = BTreeMap::new();
            one.insert(0u16, Polynomial::one());
            return one;
        }
        let delta = degree(&p) - degree(&q);
        let r = pseudo_rem(&p, &q, delta);
        if r.is_empty() {
            return q;
        }
        let beta = &g * &h.pow(delta as u32);
        let reduced: Option<Uni> = r
            .iter()
            .map(|(e, c)| c.divide_exact(&beta).map(|d| (*e, d)))
            .collect::<Option<BTreeMap<_, _>>>();
        let r = match reduced {
            Some(r) => r,
            // The subresultant factor must divide exactly; fall back to
            // a plain content strip if it ever does not.
            None => split_content(&r).1,
        };
        p = q;
        q = r;
        g = leading(&p).clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => g
                .pow(delta as u32)
                .divide_exact(&h.pow(delta as u32 - 1))
                .unwrap_or_else(|| g.pow(delta as u32)),
        };
    }
}

fn main_variable(a: &Polynomial, b: &Polynomial) -> Option<Var> {
    VARS.iter()
        .rev()
        .copied()
        .find(|&v| a.contains_var(v) || b.contains_var(v))
}

type Uni = BTreeMap<u16, Polynomial>;

fn degree(p: &Uni) -> u16 {
    p.keys().next_back().copied().unwrap_or(0)
}

fn leading(p: &Uni) -> &Polynomial {
    p.values().next_back().unwrap()
}

/// Unit-normalized gcd of all coefficients (the content in the main
/// variable) and the coefficient-wise exact quotient by it.
fn split_content(p: &Uni) -> (Polynomial, Uni) {
    if p.is_empty() {
        return (Polynomial::one(), BTreeMap::new());
    }
    let mut content = Polynomial::zero();
    for c in p.values() {
        content = if content.is_zero() {
            c.to_integer_primitive().1
        } else {
            gcd_prim(&content, &c.to_integer_primitive().1)
        };
        if content.is_one() {
            break;
        }
    }
    if content.is_one() {
        return (content, p.clone());
    }
    let primitive: Uni = p
        .iter()
        .map(|(e, c)| {
            let q = c
                .divide_exact(&content)
                .expect("content must divide every coefficient");
            (*e, q)
        })
        .collect();
    (content, primitive)
}

/// Classical pseudo-remainder prem(a, b) = lc(b)^(delta+1) * a mod b in
/// the main variable: repeatedly forms `lc(b)*r - lc(r)*v^(dr-db)*b`,
/// topping up the missed lc(b) powers when the degree drops by more
/// than one, so the subresultant divisibility theory applies exactly.
fn pseudo_rem(a: &Uni, b: &Uni, delta: u16) -> Uni {
    let db = degree(b);
    let lb = leading(b).clone();
    let mut r = a.clone();
    let mut rounds = 0u16;
    while !r.is_empty() && degree(&r) >= db {
        let dr = degree(&r);
        let lr = leading(&r).clone();
        let mut next: Uni = BTreeMap::new();
        for (e, c) in &r {
            if *e == dr {
                continue; // leading terms cancel by construction
            }
            insert_term(&mut next, *e, &(c * &lb));
        }
        for (e, c) in b {
            if *e == db {
                continue;
            }
            insert_term(&mut next, e + dr - db, &-&(c * &lr));
        }
        r = next;
        rounds += 1;
    }
    if rounds < delta + 1 && !r.is_empty() {
        let top_up = lb.pow((delta + 1 - rounds) as u32);
        r = r.iter().map(|(e, c)| (*e, c * &top_up)).collect();
    }
    r
}

/// Least common multiple up to units: integer-primitive, positive
/// leading coefficient.
pub fn poly_lcm(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero();
    }
    let g = poly_gcd(a, b);
    let cofactor = b.divide_exact(&g).expect("gcd divides");
    (a * &cofactor).to_integer_primitive().1
}

fn insert_term(p: &mut Uni, e: u16, c: &Polynomial) {
    if c.is_zero() {
        return;
    }
    match p.get_mut(&e) {
        Some(existing) => {
            let sum = &*existing + c;
            if sum.is_zero() {
                p.remove(&e);
            } else {
                *existing = sum;
            }
        }
        None => {
            p.insert(e, c.clone());
        }
    }
}

/// Square-free part of a polynomial with respect to `v`: p / gcd(p, p').
pub fn square_free_in(p: &Polynomial, v: Var) -> Polynomial {
    let dp = p.partial_derivative(v);
    if dp.is_zero() {
        return p.to_integer_primitive().1;
    }
    let g = poly_gcd(p, &dp);
    let q = p.divide_exact(&g).expect("gcd must divide");
    q.to_integer_primitive().1
}
