//! Polynomial expression parsing and printing.
//!
//! Grammar: expr := ['-'] term (('+'|'-') term)*; term := factor (('*'|'/')
//! factor)*; factor := base ('^' int)?; base := int | var | '(' expr ')'.
//! Division is accepted only by a variable power (the `1/x` notation) and is
//! rewritten as a negative exponent.

use crate::ring::{ExpVec, LaurentPoly};
use num_bigint::BigInt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at offset {0}: {1}")]
    Syntax(usize, String),
    #[error("undeclared variable `{0}` at offset {1}")]
    UndeclaredVariable(String, usize),
    #[error("division by a non-monomial at offset {0}")]
    BadDivision(usize),
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    vars: &'a [String],
}

type Poly = LaurentPoly<BigInt>;

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let n = self.vars.len();
        let mut acc = Poly::zero(n);
        let mut sign = 1i64;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            sign = -1;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        loop {
            let term = self.term()?;
            acc = if sign > 0 { acc.add(&term) } else { acc.sub(&term) };
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let divisor = self.factor()?;
                    acc = acc.mul(&invert_monomial(&divisor).ok_or(ParseError::BadDivision(at))?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.int()?;
            if e >= 0 {
                return Ok(base.pow(e as u64, None));
            }
            let at = self.pos;
            let inv = invert_monomial(&base).ok_or(ParseError::BadDivision(at))?;
            return Ok(inv.pow((-e) as u64, None));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Poly, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(ParseError::Syntax(self.pos, "expected `)`".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.int()?;
                Ok(Poly::monomial(ExpVec::zero(self.vars.len()), BigInt::from(v)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.input.len()
                    && (self.input[self.pos].is_ascii_alphanumeric() || self.input[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
                let idx = self
                    .vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| ParseError::UndeclaredVariable(name.to_string(), start))?;
                let mut e = ExpVec::zero(self.vars.len());
                e.0[idx] = 1;
                Ok(Poly::monomial(e, BigInt::from(1)))
            }
            _ => Err(ParseError::Syntax(
                self.pos,
                "expected integer, variable or `(`".into(),
            )),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.input.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(ParseError::Syntax(start, "expected integer".into()));
        }
        std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| ParseError::Syntax(start, "integer out of range".into()))
    }
}

/// Inverse of a single-term polynomial x^e or c (|c| = 1); `None` otherwise.
fn invert_monomial(p: &Poly) -> Option<Poly> {
    if p.num_terms() != 1 {
        return None;
    }
    let (e, c) = p.terms().next().unwrap();
    if *c != BigInt::from(1) && *c != BigInt::from(-1) {
        return None;
    }
    Some(Poly::monomial(e.neg(), c.clone()))
}

pub fn parse_poly(text: &str, vars: &[String]) -> Result<LaurentPoly<BigInt>, ParseError> {
    let mut parser = Parser {
        input: text.as_bytes(),
        pos: 0,
        vars,
    };
    let poly = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.input.len() {
        return Err(ParseError::Syntax(parser.pos, "trailing input".into()));
    }
    Ok(poly)
}

/// Canonical variable names x1..xn used for persisted scheme sources.
pub fn canonical_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Deterministic printer; `parse_poly(pretty(p, v), v) == p`.
pub fn pretty(poly: &LaurentPoly<BigInt>, vars: &[String]) -> String {
    if poly.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (e, c) in poly.terms() {
        let negative = c < &BigInt::from(0);
        let abs = if negative { -c } else { c.clone() };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let mut parts: Vec<String> = Vec::new();
        if abs != BigInt::from(1) || e.is_zero() {
            parts.push(abs.to_string());
        }
        for (i, &k) in e.0.iter().enumerate() {
            match k {
                0 => {}
                1 => parts.push(vars[i].clone()),
                _ => parts.push(format!("{}^{}", vars[i], k)),
            }
        }
        out.push_str(&parts.join("*"));
    }
    out
}
