//! Basis-function expressions: the `h_{q,k}` terms of a vector field.
//!
//! Expressions are standard infix arithmetic over numeric literals and state
//! variables, with `^` for non-negative integer powers. `^` binds tighter
//! than unary minus, so `-V^2` reads as `-(V^2)`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::math;

/// AST over state variables. State references are indices into the owning
/// model's state list.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisExpr {
    Const(f64),
    State(usize),
    Add(Box<BasisExpr>, Box<BasisExpr>),
    Sub(Box<BasisExpr>, Box<BasisExpr>),
    Mul(Box<BasisExpr>, Box<BasisExpr>),
    Div(Box<BasisExpr>, Box<BasisExpr>),
    Neg(Box<BasisExpr>),
    Pow(Box<BasisExpr>, u32),
}

/// Syntax or name-resolution failure, with the byte offset it occurred at.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "parse error at position {}: {}", self.position, self.message)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParseError {}

/// Arithmetic failure while evaluating an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// The printed subexpression whose divisor evaluated to zero.
    DivisionByZero { subexpression: String },
    /// A state reference outside the supplied state vector.
    StateOutOfRange { index: usize, len: usize },
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::DivisionByZero { subexpression } => {
                write!(f, "division by zero in `{subexpression}`")
            }
            EvalError::StateOutOfRange { index, len } => {
                write!(f, "state index {index} out of range for {len} states")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EvalError {}

impl BasisExpr {
    /// Parse `text` with state variables resolved against `state_names`.
    pub fn parse<S: AsRef<str>>(text: &str, state_names: &[S]) -> Result<Self, ParseError> {
        let mut parser = Parser::new(text, state_names)?;
        let expr = parser.expression()?;
        parser.expect_end()?;
        Ok(expr)
    }

    /// Value of the expression at a state vector of length `s`.
    pub fn evaluate(&self, state: &[f64]) -> Result<f64, EvalError> {
        match self {
            BasisExpr::Const(c) => Ok(*c),
            BasisExpr::State(q) => state.get(*q).copied().ok_or(EvalError::StateOutOfRange {
                index: *q,
                len: state.len(),
            }),
            BasisExpr::Add(l, r) => Ok(l.evaluate(state)? + r.evaluate(state)?),
            BasisExpr::Sub(l, r) => Ok(l.evaluate(state)? - r.evaluate(state)?),
            BasisExpr::Mul(l, r) => Ok(l.evaluate(state)? * r.evaluate(state)?),
            BasisExpr::Div(l, r) => {
                let denom = r.evaluate(state)?;
                if denom == 0.0 {
                    return Err(EvalError::DivisionByZero {
                        subexpression: self.print_with_placeholders(),
                    });
                }
                Ok(l.evaluate(state)? / denom)
            }
            BasisExpr::Neg(e) => Ok(-e.evaluate(state)?),
            BasisExpr::Pow(e, n) => Ok(math::powi(e.evaluate(state)?, *n)),
        }
    }

    /// Largest state index referenced, if any state appears.
    pub fn max_state_index(&self) -> Option<usize> {
        match self {
            BasisExpr::Const(_) => None,
            BasisExpr::State(q) => Some(*q),
            BasisExpr::Add(l, r)
            | BasisExpr::Sub(l, r)
            | BasisExpr::Mul(l, r)
            | BasisExpr::Div(l, r) => core::cmp::max(l.max_state_index(), r.max_state_index()),
            BasisExpr::Neg(e) | BasisExpr::Pow(e, _) => e.max_state_index(),
        }
    }

    /// Marks `touched[q] = true` for every state the expression references.
    pub fn mark_states(&self, touched: &mut [bool]) {
        match self {
            BasisExpr::Const(_) => {}
            BasisExpr::State(q) => {
                if let Some(t) = touched.get_mut(*q) {
                    *t = true;
                }
            }
            BasisExpr::Add(l, r)
            | BasisExpr::Sub(l, r)
            | BasisExpr::Mul(l, r)
            | BasisExpr::Div(l, r) => {
                l.mark_states(touched);
                r.mark_states(touched);
            }
            BasisExpr::Neg(e) | BasisExpr::Pow(e, _) => e.mark_states(touched),
        }
    }

    /// Render the expression with the given state names. The output reparses
    /// to a structurally identical AST.
    pub fn print<S: AsRef<str>>(&self, state_names: &[S]) -> String {
        let mut out = String::new();
        self.fmt_prec(&mut out, 0, &|q| {
            state_names
                .get(q)
                .map(|s| s.as_ref().to_string())
                .unwrap_or_else(|| format!("x{}", q + 1))
        });
        out
    }

    fn print_with_placeholders(&self) -> String {
        let mut out = String::new();
        self.fmt_prec(&mut out, 0, &|q| format!("x{}", q + 1));
        out
    }

    fn prec(&self) -> u8 {
        match self {
            BasisExpr::Add(..) | BasisExpr::Sub(..) => 1,
            BasisExpr::Mul(..) | BasisExpr::Div(..) => 2,
            BasisExpr::Neg(..) => 3,
            BasisExpr::Pow(..) => 4,
            BasisExpr::Const(_) | BasisExpr::State(_) => 5,
        }
    }

    fn fmt_prec(&self, out: &mut String, min_prec: u8, name: &dyn Fn(usize) -> String) {
        let prec = self.prec();
        let parens = prec < min_prec;
        if parens {
            out.push('(');
        }
        match self {
            BasisExpr::Const(c) => {
                if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) {
                    // Negative literals print through Neg so they reparse.
                    out.push('-');
                    out.push_str(&format_f64(-*c));
                } else {
                    out.push_str(&format_f64(*c));
                }
            }
            BasisExpr::State(q) => out.push_str(&name(*q)),
            BasisExpr::Add(l, r) => {
                l.fmt_prec(out, 1, name);
                out.push_str(" + ");
                r.fmt_prec(out, 2, name);
            }
            BasisExpr::Sub(l, r) => {
                l.fmt_prec(out, 1, name);
                out.push_str(" - ");
                r.fmt_prec(out, 2, name);
            }
            BasisExpr::Mul(l, r) => {
                l.fmt_prec(out, 2, name);
                out.push('*');
                r.fmt_prec(out, 3, name);
            }
            BasisExpr::Div(l, r) => {
                l.fmt_prec(out, 2, name);
                out.push('/');
                r.fmt_prec(out, 3, name);
            }
            BasisExpr::Neg(e) => {
                out.push('-');
                e.fmt_prec(out, 3, name);
            }
            BasisExpr::Pow(e, n) => {
                e.fmt_prec(out, 5, name);
                out.push('^');
                out.push_str(&n.to_string());
            }
        }
        if parens {
            out.push(')');
        }
    }
}

fn format_f64(v: f64) -> String {
    // `{}` prints the shortest representation that round-trips.
    format!("{v}")
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
    states: Vec<String>,
}

impl Parser {
    fn new<S: AsRef<str>>(text: &str, state_names: &[S]) -> Result<Self, ParseError> {
        if text.trim().is_empty() {
            return Err(ParseError {
                position: 0,
                message: "empty expression".to_string(),
            });
        }
        let mut tokens = Vec::new();
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    tokens.push((Token::Plus, i));
                    i += 1;
                }
                '-' => {
                    tokens.push((Token::Minus, i));
                    i += 1;
                }
                '*' => {
                    tokens.push((Token::Star, i));
                    i += 1;
                }
                '/' => {
                    tokens.push((Token::Slash, i));
                    i += 1;
                }
                '^' => {
                    tokens.push((Token::Caret, i));
                    i += 1;
                }
                '(' => {
                    tokens.push((Token::LParen, i));
                    i += 1;
                }
                ')' => {
                    tokens.push((Token::RParen, i));
                    i += 1;
                }
                '0'..='9' | '.' => {
                    let start = i;
                    while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                        i += 1;
                    }
                    // Scientific notation: 1e-3, 2.5E+4.
                    if i < bytes.len() && matches!(bytes[i] as char, 'e' | 'E') {
                        let mut j = i + 1;
                        if j < bytes.len() && matches!(bytes[j] as char, '+' | '-') {
                            j += 1;
                        }
                        if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                            i = j;
                            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                                i += 1;
                            }
                        }
                    }
                    tokens.push((Token::Number(text[start..i].to_string()), start));
                }
                _ if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < bytes.len()
                        && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] as char == '_')
                    {
                        i += 1;
                    }
                    tokens.push((Token::Ident(text[start..i].to_string()), start));
                }
                _ => {
                    return Err(ParseError {
                        position: i,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            }
        }
        Ok(Parser {
            tokens,
            pos: 0,
            end: text.len(),
            states: state_names.iter().map(|s| s.as_ref().to_string()).collect(),
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(ParseError {
                position: self.here(),
                message: "unexpected trailing input".to_string(),
            })
        }
    }

    fn expression(&mut self) -> Result<BasisExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = BasisExpr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Token::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = BasisExpr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<BasisExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = BasisExpr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Token::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = BasisExpr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<BasisExpr, ParseError> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.bump();
            let inner = self.unary()?;
            return Ok(BasisExpr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<BasisExpr, ParseError> {
        let mut base = self.primary()?;
        while matches!(self.peek(), Some(Token::Caret)) {
            self.bump();
            let pos = self.here();
            match self.bump() {
                Some(Token::Number(text)) => {
                    let n: u32 = text.parse().map_err(|_| ParseError {
                        position: pos,
                        message: format!("exponent must be a non-negative integer, got `{text}`"),
                    })?;
                    base = BasisExpr::Pow(Box::new(base), n);
                }
                Some(Token::Minus) => {
                    return Err(ParseError {
                        position: pos,
                        message: "negative exponents are not supported".to_string(),
                    })
                }
                _ => {
                    return Err(ParseError {
                        position: pos,
                        message: "expected integer exponent after `^`".to_string(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<BasisExpr, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Token::Number(text)) => {
                let v: f64 = text.parse().map_err(|_| ParseError {
                    position: pos,
                    message: format!("invalid number `{text}`"),
                })?;
                Ok(BasisExpr::Const(v))
            }
            Some(Token::Ident(name)) => {
                match self.states.iter().position(|s| *s == name) {
                    Some(q) => Ok(BasisExpr::State(q)),
                    None => Err(ParseError {
                        position: pos,
                        message: format!("unknown identifier `{name}`"),
                    }),
                }
            }
            Some(Token::LParen) => {
                let inner = self.expression()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(ParseError {
                        position: self.here(),
                        message: "expected `)`".to_string(),
                    }),
                }
            }
            other => Err(ParseError {
                position: pos,
                message: match other {
                    Some(_) => "expected number, identifier, or `(`".to_string(),
                    None => "unexpected end of expression".to_string(),
                },
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn parse(text: &str, states: &[&str]) -> BasisExpr {
        BasisExpr::parse(text, states).unwrap()
    }

    #[test]
    fn logistic_basis_evaluates() {
        let e = parse("x*(1 - x)", &["x"]);
        assert_eq!(e.evaluate(&[2.0]).unwrap(), -2.0);
    }

    #[test]
    fn fn_basis_evaluates() {
        let e = parse("V - V^3/3 + R", &["V", "R"]);
        let v = e.evaluate(&[1.0, 0.0]).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        // Hand arithmetic at V=-1, R=1: -1 - (-1/3) + 1 = 1/3.
        let v = e.evaluate(&[-1.0, 1.0]).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn double_star_is_a_syntax_error() {
        let err = BasisExpr::parse("V ** 3", &["V"]).unwrap_err();
        assert_eq!(err.position, 3);
    }

    #[test]
    fn unknown_identifier_reports_position() {
        let err = BasisExpr::parse("V + w", &["V"]).unwrap_err();
        assert_eq!(err.position, 4);
        assert!(err.message.contains("w"));
    }

    #[test]
    fn exponent_rules() {
        assert!(BasisExpr::parse("x^2", &["x"]).is_ok());
        assert!(BasisExpr::parse("x^0", &["x"]).is_ok());
        assert!(BasisExpr::parse("x^2.5", &["x"]).is_err());
        assert!(BasisExpr::parse("x^-1", &["x"]).is_err());
    }

    #[test]
    fn caret_binds_tighter_than_unary_minus() {
        let e = parse("-x^2", &["x"]);
        assert_eq!(e.evaluate(&[3.0]).unwrap(), -9.0);
    }

    #[test]
    fn division_by_zero_carries_subexpression() {
        let e = parse("1/(x - 1)", &["x"]);
        match e.evaluate(&[1.0]) {
            Err(EvalError::DivisionByZero { subexpression }) => {
                assert!(subexpression.contains('/'));
            }
            other => panic!("expected division error, got {other:?}"),
        }
    }

    #[test]
    fn constant_basis_is_identity() {
        let e = parse("1", &["x"]);
        assert_eq!(e.evaluate(&[123.0]).unwrap(), 1.0);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(BasisExpr::parse("  ", &["x"]).is_err());
    }

    #[test]
    fn print_parse_round_trip_samples() {
        let names = ["V", "R"];
        for text in [
            "V - V^3/3 + R",
            "-(V + R)*2",
            "1e-3*V^2 - R/(V + 2)",
            "-V^2",
            "V/R/2",
            "V - (R - 1)",
        ] {
            let ast = parse(text, &names);
            let printed = ast.print(&names);
            let reparsed = parse(&printed, &names);
            assert_eq!(ast, reparsed, "round trip failed for `{text}` -> `{printed}`");
        }
    }

    #[test]
    fn mark_states_tracks_references() {
        let e = parse("V^2 + 1", &["V", "R"]);
        let mut touched = vec![false, false];
        e.mark_states(&mut touched);
        assert_eq!(touched, vec![true, false]);
    }
}
