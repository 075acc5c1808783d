//! Recursive-descent parser for polynomial text.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := number | var | 'i' | '(' expr ')'
//! var    := 'q'|'p'|'h'|'lq'|'lp' | ('q'|'p'|'lq'|'lp') uint
//! number := uint | uint '.' digits | uint '/' uint
//! ```

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{PolySymbol, VariableId};
use crate::rational::{ComplexRational, Rational};

pub fn parse_poly(text: &str, dim: usize) -> Result<PolySymbol> {
    if dim == 0 {
        return Err(Error::Precondition("N must be positive".into()));
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, dim };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err(format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<PolySymbol> {
        let negate = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<PolySymbol> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<PolySymbol> {
        let base = self.base()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek() {
            Some(b'-') => return Err(self.err("negative exponent")),
            Some(c) if c.is_ascii_digit() => {}
            _ => return Err(self.err("expected exponent")),
        }
        let digits = self.digits();
        if matches!(self.src.get(self.pos), Some(b'.') | Some(b'/')) {
            return Err(self.err("non-integer exponent"));
        }
        let e: u32 = digits.parse().map_err(|_| self.err("exponent too large"))?;
        Ok(base.pow(e))
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn base(&mut self) -> Result<PolySymbol> {
        let c = self.peek().ok_or_else(|| self.err("unexpected end of input"))?;
        match c {
            b'(' => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            b'0'..=b'9' => self.number(),
            b'i' => {
                self.pos += 1;
                Ok(PolySymbol::constant(self.dim, ComplexRational::i()))
            }
            b'h' => {
                self.pos += 1;
                Ok(PolySymbol::hbar(self.dim))
            }
            b'q' | b'p' | b'l' => self.variable(),
            _ => Err(self.err(format!("unexpected '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<PolySymbol> {
        let int = self.digits();
        let int: BigInt = int.parse().expect("digits");
        let value = match self.src.get(self.pos) {
            Some(b'.') => {
                self.pos += 1;
                let frac = self.digits();
                if frac.is_empty() {
                    return Err(self.err("expected digits after '.'"));
                }
                let scale = BigInt::from(10u32).pow(frac.len() as u32);
                let f: BigInt = frac.parse().expect("digits");
                Rational::new(int * &scale + f, scale)
            }
            Some(b'/') => {
                self.pos += 1;
                let den = self.digits();
                if den.is_empty() {
                    return Err(self.err("expected denominator"));
                }
                let den: BigInt = den.parse().expect("digits");
                if den.is_zero() {
                    return Err(self.err("zero denominator"));
                }
                Rational::new(int, den)
            }
            _ => Rational::new(int, BigInt::one()),
        };
        Ok(PolySymbol::constant(self.dim, ComplexRational::real(value)))
    }

    fn variable(&mut self) -> Result<PolySymbol> {
        let start = self.pos;
        let lambda = self.src[self.pos] == b'l';
        if lambda {
            self.pos += 1;
        }
        let is_q = match self.src.get(self.pos) {
            Some(b'q') => true,
            Some(b'p') => false,
            _ => {
                self.pos = start;
                return Err(self.err("unknown variable"));
            }
        };
        self.pos += 1;
        let sub = self.digits();
        let index = if sub.is_empty() {
            if self.dim != 1 {
                self.pos = start;
                return Err(self.err(format!("variable needs a subscript for N = {}", self.dim)));
            }
            0
        } else {
            let k: usize = sub.parse().map_err(|_| self.err("subscript too large"))?;
            if k == 0 || k > self.dim {
                self.pos = start;
                return Err(self.err(format!("subscript {k} out of range for N = {}", self.dim)));
            }
            k - 1
        };
        if self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphabetic()) {
            return Err(self.err("unknown variable"));
        }
        let slot = if is_q { index } else { self.dim + index };
        let v = if lambda { VariableId::Lambda(slot) } else { VariableId::Phase(slot) };
        Ok(PolySymbol::var(self.dim, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_forms() {
        let a = parse_poly("0.5*p^2 + 0.25*q^4", 1).unwrap();
        let b = parse_poly("1/2*p^2 + 1/4*q^4", 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_poly("q^2", 1).unwrap().to_string(), "q^2");
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(matches!(parse_poly("q^-1", 1), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse_poly("q^1.5", 1), Err(Error::Parse { .. })));
    }

    #[test]
    fn subscripts() {
        assert!(parse_poly("q", 2).is_err());
        assert!(parse_poly("q3", 2).is_err());
        let x = parse_poly("q1*p2 - lq2", 2).unwrap();
        assert_eq!(x.to_string(), "q1*p2 - lq2");
        assert!(parse_poly("x", 1).is_err());
        assert!(parse_poly("(q", 1).is_err());
        assert!(parse_poly("q p", 1).is_err());
    }

    #[test]
    fn renders_back() {
        for s in ["lq*p - lp*q", "q*p + 1/2*i*h", "9*q^2*p^2 - 3/2*h^2", "(1/2 - 3*i)*q", "-i*h"] {
            assert_eq!(parse_poly(s, 1).unwrap().to_string(), s);
        }
    }
}
