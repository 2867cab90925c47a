//! Exact closed-form index expressions: finite sums `p_b(x) * b^x` with rational
//! polynomials `p_b` and integer bases `b >= 1`.
//!
//! Grammar (one variable, named by the caller):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*        division only by constants
//! unary  := '-' unary | power
//! power  := atom ('^' (integer | variable))?   `b^x` needs an integer base
//! atom   := integer | variable | '(' expr ')'
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unexpected `{found}` at position {pos} in `{text}`")]
    Unexpected { text: String, found: String, pos: usize },
    #[error("unknown variable `{name}` (expected `{expected}`)")]
    UnknownVariable { name: String, expected: String },
    #[error("division by a non-constant or zero expression")]
    BadDivision,
    #[error("exponent must be a small nonnegative integer or the variable")]
    BadExponent,
    #[error("expression must be a polynomial, found exponential term with base {0}")]
    NotPolynomial(u64),
}

/// Univariate polynomial with exact rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<BigRational>);

impl Poly {
    pub fn zero() -> Poly {
        Poly(Vec::new())
    }

    pub fn constant(c: BigRational) -> Poly {
        Poly(vec![c]).normalized()
    }

    pub fn from_int(c: i64) -> Poly {
        Poly::constant(BigRational::from_integer(c.into()))
    }

    /// The polynomial `x`.
    pub fn x() -> Poly {
        Poly(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_coefficients(c: Vec<BigRational>) -> Poly {
        Poly(c).normalized()
    }

    fn normalized(mut self) -> Poly {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial at 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.0.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.0[0].clone()),
            _ => None,
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let len = self.0.len().max(o.0.len());
        let zero = BigRational::zero();
        Poly((0..len)
            .map(|i| self.0.get(i).unwrap_or(&zero) + o.0.get(i).unwrap_or(&zero))
            .collect())
        .normalized()
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).normalized()
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        Poly(self.0.iter().map(|a| a * c).collect()).normalized()
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::from_int(1), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, x: i64) -> BigRational {
        self.eval(&BigRational::from_integer(x.into()))
    }

    /// `p(x + a)`.
    pub fn shift(&self, a: i64) -> Poly {
        let xa = Poly(vec![BigRational::from_integer(a.into()), BigRational::one()]);
        self.0.iter().rev().fold(Poly::zero(), |acc, c| acc.mul(&xa).add(&Poly::constant(c.clone())))
    }

    /// `p(a*x + b)`.
    pub fn compose_affine(&self, a: i64, b: i64) -> Poly {
        let inner = Poly::from_coefficients(vec![BigRational::from_integer(b.into()), BigRational::from_integer(a.into())]);
        self.0.iter().rev().fold(Poly::zero(), |acc, c| acc.mul(&inner).add(&Poly::constant(c.clone())))
    }

    /// True when every coefficient of `p(x + a)` is nonnegative, which proves
    /// `p(x) >= 0` for all real `x >= a`.
    pub fn shifted_nonnegative(&self, a: i64) -> bool {
        self.shift(a).0.iter().all(|c| !c.is_negative())
    }

    /// Smallest integer `t` in `[from, from + limit]` such that `p(i) >= 0` for every
    /// integer `i >= from`: values below `t` are checked directly and the Taylor
    /// shift certifies the rest.
    pub fn nonnegative_from(&self, from: i64, limit: i64) -> Option<i64> {
        if self.leading().is_negative() {
            return None;
        }
        for t in from..=from + limit {
            if self.eval_int(t - 1).is_negative() && t > from {
                return None;
            }
            if self.shifted_nonnegative(t) {
                return Some(t);
            }
        }
        None
    }

    /// Smallest `t` in `[from, from + limit]` with `p(x) >= 0` for all real `x >= t`.
    pub fn eventually_nonnegative(&self, from: i64, limit: i64) -> Option<i64> {
        if self.leading().is_negative() {
            return None;
        }
        (from..=from + limit).find(|&t| self.shifted_nonnegative(t))
    }

    /// Integer-valued on all integers; a degree-d polynomial is if it is on d+1
    /// consecutive integers.
    pub fn integer_valued(&self) -> bool {
        (0..=self.degree() as i64).all(|x| self.eval_int(x).is_integer())
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (d, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let coeff = fmt_rational(&a);
            match d {
                0 => write!(f, "{coeff}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{coeff}*")?;
                    }
                    if d == 1 {
                        f.write_str("x")?;
                    } else {
                        write!(f, "x^{d}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// `sum_b p_b(x) * b^x`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpPoly {
    terms: BTreeMap<u64, Poly>,
}

impl ExpPoly {
    pub fn poly(p: Poly) -> ExpPoly {
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(1, p);
        }
        ExpPoly { terms }
    }

    pub fn exponential(base: u64) -> ExpPoly {
        let mut terms = BTreeMap::new();
        terms.insert(base, Poly::from_int(1));
        ExpPoly { terms }
    }

    pub fn terms(&self) -> &BTreeMap<u64, Poly> {
        &self.terms
    }

    pub fn as_poly(&self) -> Result<Poly, ExprError> {
        match self.terms.keys().find(|&&b| b != 1) {
            Some(&b) => Err(ExprError::NotPolynomial(b)),
            None => Ok(self.terms.get(&1).cloned().unwrap_or_default()),
        }
    }

    /// Largest base with a nonzero polynomial, with that polynomial.
    pub fn dominant(&self) -> Option<(u64, &Poly)> {
        self.terms.iter().next_back().map(|(b, p)| (*b, p))
    }

    fn add(&self, o: &ExpPoly) -> ExpPoly {
        let mut terms = self.terms.clone();
        for (b, p) in &o.terms {
            let sum = terms.get(b).map_or_else(|| p.clone(), |q| q.add(p));
            if sum.is_zero() {
                terms.remove(b);
            } else {
                terms.insert(*b, sum);
            }
        }
        ExpPoly { terms }
    }

    fn neg(&self) -> ExpPoly {
        ExpPoly { terms: self.terms.iter().map(|(b, p)| (*b, p.neg())).collect() }
    }

    fn mul(&self, o: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::default();
        for (b, p) in &self.terms {
            for (c, q) in &o.terms {
                let mut t = BTreeMap::new();
                t.insert(b * c, p.mul(q));
                out = out.add(&ExpPoly { terms: t });
            }
        }
        out
    }

    fn scale(&self, c: &BigRational) -> ExpPoly {
        let mut out = ExpPoly::default();
        for (b, p) in &self.terms {
            let mut t = BTreeMap::new();
            t.insert(*b, p.scale(c));
            out = out.add(&ExpPoly { terms: t });
        }
        out
    }

    fn as_constant(&self) -> Option<BigRational> {
        self.as_poly().ok()?.as_constant()
    }

    pub fn eval(&self, x: u64) -> BigRational {
        let xr = BigRational::from_integer(x.into());
        self.terms
            .iter()
            .map(|(b, p)| p.eval(&xr) * BigRational::from_integer(BigInt::from(*b).pow(x as u32)))
            .fold(BigRational::zero(), |a, v| a + v)
    }
}

/// Parses `text` with the single variable `var`.
pub fn parse_expr(text: &str, var: &str) -> Result<ExpPoly, ExprError> {
    let tokens = lex(text)?;
    let mut p = Parser { text, tokens, pos: 0, var };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.unexpected());
    }
    Ok(e)
}

/// Parses a polynomial in `var`.
pub fn parse_poly(text: &str, var: &str) -> Result<Poly, ExprError> {
    parse_expr(text, var)?.as_poly()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|x| x.1).collect();
            out.push((Tok::Int(s.parse().expect("digits")), pos));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().map(|x| x.1).collect()), pos));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), pos));
            i += 1;
        } else {
            return Err(ExprError::Unexpected { text: text.into(), found: c.to_string(), pos });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    var: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.0)
    }

    fn unexpected(&self) -> ExprError {
        match self.tokens.get(self.pos) {
            Some((t, pos)) => ExprError::Unexpected {
                text: self.text.into(),
                found: match t {
                    Tok::Int(v) => v.to_string(),
                    Tok::Ident(s) => s.clone(),
                    Tok::Sym(c) => c.to_string(),
                },
                pos: *pos,
            },
            None => ExprError::Unexpected {
                text: self.text.into(),
                found: "end of input".into(),
                pos: self.text.len(),
            },
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ExpPoly, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.add(&self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ExpPoly, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?.as_constant().filter(|c| !c.is_zero()).ok_or(ExprError::BadDivision)?;
                acc = acc.scale(&d.recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ExpPoly, ExprError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExpPoly, ExprError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        match self.tokens.get(self.pos).map(|t| t.0.clone()) {
            Some(Tok::Int(e)) => {
                self.pos += 1;
                let e = e.to_u32().filter(|&e| e <= 64).ok_or(ExprError::BadExponent)?;
                Ok((0..e).fold(ExpPoly::poly(Poly::from_int(1)), |acc, _| acc.mul(&base)))
            }
            Some(Tok::Ident(name)) if name == self.var => {
                self.pos += 1;
                let b = base
                    .as_constant()
                    .filter(|c| c.is_integer() && c.is_positive())
                    .and_then(|c| c.to_integer().to_u64())
                    .ok_or(ExprError::BadExponent)?;
                Ok(ExpPoly::exponential(b))
            }
            _ => Err(self.unexpected()),
        }
    }

    fn atom(&mut self) -> Result<ExpPoly, ExprError> {
        match self.tokens.get(self.pos).map(|t| t.0.clone()) {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(ExpPoly::poly(Poly::constant(BigRational::from_integer(v))))
            }
            Some(Tok::Ident(name)) => {
                if name != self.var {
                    return Err(ExprError::UnknownVariable { name, expected: self.var.into() });
                }
                self.pos += 1;
                Ok(ExpPoly::poly(Poly::x()))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.unexpected());
                }
                Ok(e)
            }
            _ => Err(self.unexpected()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn parses_polynomials() {
        let p = parse_poly("2*s^2", "s").unwrap();
        assert_eq!(p.eval_int(3), r(18));
        let q = parse_poly("(s+1)^2", "s").unwrap();
        assert_eq!(q.coefficients(), &[r(1), r(2), r(1)]);
        let h = parse_poly("i*(i+1)/2", "i").unwrap();
        assert_eq!(h.eval_int(4), r(10));
        assert!(h.integer_valued());
        assert!(!parse_poly("i/2", "i").unwrap().integer_valued());
        assert_eq!(parse_poly("-(i - 4)", "i").unwrap().eval_int(1), r(3));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_poly("2*k", "i"), Err(ExprError::UnknownVariable { .. })));
        assert!(matches!(parse_poly("1/i", "i"), Err(ExprError::BadDivision)));
        assert!(matches!(parse_poly("2^i", "i"), Err(ExprError::NotPolynomial(2))));
        assert!(matches!(parse_poly("(1+i", "i"), Err(ExprError::Unexpected { .. })));
        assert!(matches!(parse_poly("1 $ 2", "i"), Err(ExprError::Unexpected { .. })));
    }

    #[test]
    fn exponentials() {
        let e = parse_expr("i*2^i + 3", "i").unwrap();
        assert_eq!(e.eval(3), r(27));
        assert_eq!(e.dominant().unwrap().0, 2);
        let f = parse_expr("2^i * 3^i", "i").unwrap();
        assert_eq!(f.dominant().unwrap().0, 6);
    }

    #[test]
    fn nonnegativity() {
        let p = parse_poly("i^2 - 3*i + 3", "i").unwrap();
        let t = p.sub(&Poly::from_int(1)).nonnegative_from(1, 50).unwrap();
        assert!(t >= 1);
        assert_eq!(parse_poly("i - 5", "i").unwrap().nonnegative_from(1, 50), None);
        assert_eq!(parse_poly("i - 5", "i").unwrap().nonnegative_from(5, 50), Some(5));
        assert_eq!(parse_poly("0", "i").unwrap().nonnegative_from(0, 0), Some(0));
        assert_eq!(Poly::from_int(3).to_string(), "3");
        assert_eq!(parse_poly("2*x^2 - x + 1/2", "x").unwrap().to_string(), "2*x^2 - x + 1/2");
    }
}
