//! Polynomial normal forms of basis expressions.
//!
//! An expression with no division by a state-dependent subexpression expands
//! into a sum of monomials `c · Π_q x_q^{d_q}`. The normal form is what makes
//! automatic bias correction decidable: moment corrections are applied per
//! monomial factor and extended by linearity.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::expr::BasisExpr;
use crate::math;

/// One term `coeff · Π_q x_q^{degrees[q]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub degrees: Vec<u32>,
}

impl Monomial {
    fn total_degree(&self) -> u32 {
        self.degrees.iter().sum()
    }

    /// Smallest state index with a nonzero exponent; `n_states` for constants
    /// so that they sort first via the key below.
    fn first_state(&self) -> Option<usize> {
        self.degrees.iter().position(|&d| d > 0)
    }
}

/// Canonically ordered monomial list over a fixed number of states.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    n_states: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero(n_states: usize) -> Self {
        Polynomial { n_states, terms: Vec::new() }
    }

    pub fn constant(c: f64, n_states: usize) -> Self {
        let mut p = Polynomial {
            n_states,
            terms: vec![Monomial { coeff: c, degrees: vec![0; n_states] }],
        };
        p.canonicalize();
        p
    }

    pub fn state(q: usize, n_states: usize) -> Self {
        let mut degrees = vec![0; n_states];
        degrees[q] = 1;
        Polynomial { n_states, terms: vec![Monomial { coeff: 1.0, degrees }] }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    /// Rebuilds from raw monomials, combining like terms.
    pub fn from_terms(n_states: usize, terms: Vec<Monomial>) -> Self {
        let mut p = Polynomial { n_states, terms };
        p.canonicalize();
        p
    }

    /// Sort graded by first referenced state, then total degree, then the
    /// exponent vector; constants first. Like terms are merged and exact
    /// zeros dropped, so equal polynomials have identical representations.
    fn canonicalize(&mut self) {
        self.terms.sort_by(|a, b| {
            let ka = (
                a.first_state().map(|q| q as i64 + 1).unwrap_or(0),
                a.total_degree(),
            );
            let kb = (
                b.first_state().map(|q| q as i64 + 1).unwrap_or(0),
                b.total_degree(),
            );
            ka.cmp(&kb).then_with(|| a.degrees.cmp(&b.degrees))
        });
        let mut merged: Vec<Monomial> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.degrees == t.degrees => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        self.terms = merged;
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Polynomial::from_terms(self.n_states, terms)
    }

    pub fn neg(&self) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|t| Monomial { coeff: -t.coeff, degrees: t.degrees.clone() })
            .collect();
        Polynomial { n_states: self.n_states, terms }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let degrees = a
                    .degrees
                    .iter()
                    .zip(&b.degrees)
                    .map(|(x, y)| x + y)
                    .collect();
                terms.push(Monomial { coeff: a.coeff * b.coeff, degrees });
            }
        }
        Polynomial::from_terms(self.n_states, terms)
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|t| Monomial { coeff: t.coeff * c, degrees: t.degrees.clone() })
            .collect();
        Polynomial::from_terms(self.n_states, terms)
    }

    pub fn powi(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::constant(1.0, self.n_states);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// `Some(c)` when the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 if self.terms[0].total_degree() == 0 => Some(self.terms[0].coeff),
            _ => None,
        }
    }

    /// Exact quotient by the single variable `x_q`, or `None` when some
    /// monomial has no `x_q` factor.
    pub fn divide_by_state(&self, q: usize) -> Option<Polynomial> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.degrees[q] == 0 {
                return None;
            }
            let mut degrees = t.degrees.clone();
            degrees[q] -= 1;
            terms.push(Monomial { coeff: t.coeff, degrees });
        }
        Some(Polynomial::from_terms(self.n_states, terms))
    }

    pub fn evaluate(&self, state: &[f64]) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            let mut v = t.coeff;
            for (q, &d) in t.degrees.iter().enumerate() {
                if d > 0 {
                    v *= math::powi(state[q], d);
                }
            }
            acc += v;
        }
        acc
    }

    /// Reassemble an expression that evaluates identically.
    pub fn to_expr(&self) -> BasisExpr {
        if self.terms.is_empty() {
            return BasisExpr::Const(0.0);
        }
        let mut acc: Option<BasisExpr> = None;
        for t in &self.terms {
            let mut factor: Option<BasisExpr> = None;
            for (q, &d) in t.degrees.iter().enumerate() {
                let var = match d {
                    0 => continue,
                    1 => BasisExpr::State(q),
                    _ => BasisExpr::Pow(Box::new(BasisExpr::State(q)), d),
                };
                factor = Some(match factor {
                    None => var,
                    Some(f) => BasisExpr::Mul(Box::new(f), Box::new(var)),
                });
            }
            let term = match factor {
                None => BasisExpr::Const(t.coeff),
                Some(f) if t.coeff == 1.0 => f,
                Some(f) => BasisExpr::Mul(Box::new(BasisExpr::Const(t.coeff)), Box::new(f)),
            };
            acc = Some(match acc {
                None => term,
                Some(a) => BasisExpr::Add(Box::new(a), Box::new(term)),
            });
        }
        acc.unwrap()
    }
}

/// Expand `expr` into monomials, or `None` when the expression divides by a
/// state-dependent subexpression (or by a zero constant).
pub fn polynomial_normal_form(expr: &BasisExpr, n_states: usize) -> Option<Polynomial> {
    match expr {
        BasisExpr::Const(c) => Some(Polynomial::constant(*c, n_states)),
        BasisExpr::State(q) => Some(Polynomial::state(*q, n_states)),
        BasisExpr::Add(l, r) => Some(
            polynomial_normal_form(l, n_states)?.add(&polynomial_normal_form(r, n_states)?),
        ),
        BasisExpr::Sub(l, r) => Some(
            polynomial_normal_form(l, n_states)?.sub(&polynomial_normal_form(r, n_states)?),
        ),
        BasisExpr::Mul(l, r) => Some(
            polynomial_normal_form(l, n_states)?.mul(&polynomial_normal_form(r, n_states)?),
        ),
        BasisExpr::Div(l, r) => {
            let divisor = polynomial_normal_form(r, n_states)?.as_constant()?;
            if divisor == 0.0 {
                return None;
            }
            Some(polynomial_normal_form(l, n_states)?.scale(1.0 / divisor))
        }
        BasisExpr::Neg(e) => Some(polynomial_normal_form(e, n_states)?.neg()),
        BasisExpr::Pow(e, n) => Some(polynomial_normal_form(e, n_states)?.powi(*n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::SmallRng;
    use rand::{Rng, SeedableRng};

    fn parse(text: &str, states: &[&str]) -> BasisExpr {
        BasisExpr::parse(text, states).unwrap()
    }

    #[test]
    fn fn_basis_normal_form() {
        let e = parse("V - V^3/3 + R", &["V", "R"]);
        let p = polynomial_normal_form(&e, 2).unwrap();
        let expected = vec![
            Monomial { coeff: 1.0, degrees: vec![1, 0] },
            Monomial { coeff: -1.0 / 3.0, degrees: vec![3, 0] },
            Monomial { coeff: 1.0, degrees: vec![0, 1] },
        ];
        assert_eq!(p.terms(), expected.as_slice());
    }

    #[test]
    fn logistic_basis_normal_form() {
        let e = parse("x*(1-x)", &["x"]);
        let p = polynomial_normal_form(&e, 1).unwrap();
        let expected = vec![
            Monomial { coeff: 1.0, degrees: vec![1] },
            Monomial { coeff: -1.0, degrees: vec![2] },
        ];
        assert_eq!(p.terms(), expected.as_slice());
    }

    #[test]
    fn state_division_is_non_polynomial() {
        let e = parse("1/x", &["x"]);
        assert!(polynomial_normal_form(&e, 1).is_none());
    }

    #[test]
    fn zero_constant_division_is_non_polynomial() {
        let e = parse("x/0", &["x"]);
        assert!(polynomial_normal_form(&e, 1).is_none());
    }

    #[test]
    fn normal_form_matches_evaluation_on_random_states() {
        let names = ["V", "R"];
        let exprs = [
            "V - V^3/3 + R",
            "(V + R)^3 - V*R",
            "-(1 - V)*(1 + V)",
            "V^2*R^2/4 + 2*V - 7",
        ];
        let mut rng = SmallRng::seed_from_u64(7);
        for text in exprs {
            let e = parse(text, &names);
            let p = polynomial_normal_form(&e, 2).unwrap();
            for _ in 0..100 {
                let x = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
                let direct = e.evaluate(&x).unwrap();
                let viapoly = p.evaluate(&x);
                let scale = direct.abs().max(1.0);
                assert!(
                    (direct - viapoly).abs() <= 1e-12 * scale,
                    "mismatch for {text} at {x:?}: {direct} vs {viapoly}"
                );
            }
        }
    }

    #[test]
    fn normal_form_is_idempotent() {
        let e = parse("(V + R)^2 - V^2 - R^2", &["V", "R"]);
        let p = polynomial_normal_form(&e, 2).unwrap();
        let back = p.to_expr();
        let p2 = polynomial_normal_form(&back, 2).unwrap();
        assert_eq!(p, p2);
    }

    #[test]
    fn cancellation_yields_zero() {
        let e = parse("x - x", &["x"]);
        let p = polynomial_normal_form(&e, 1).unwrap();
        assert_eq!(p.as_constant(), Some(0.0));
    }

    #[test]
    fn divide_by_state_exact_quotient() {
        let e = parse("x^2 - 2*x", &["x"]);
        let p = polynomial_normal_form(&e, 1).unwrap();
        let q = p.divide_by_state(0).unwrap();
        assert_eq!(q.evaluate(&[5.0]), 3.0);
        let with_const = parse("x^2 + 1", &["x"]);
        let p = polynomial_normal_form(&with_const, 1).unwrap();
        assert!(p.divide_by_state(0).is_none());
    }
}
