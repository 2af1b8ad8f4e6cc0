//! Text grammar for scalars.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' ('{' int '}' | int))?
//! atom   := integer | 'q' | '(' expr ')'
//! int    := '-'? digits
//! ```
//!
//! Whitespace is ignored. Printing always yields a string this grammar reads
//! back to the same value.

use std::str::FromStr;

use num_bigint::BigInt;

use super::function::Scalar;
use super::laurent::Rational;
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {}", self.pos))
    }

    fn expr(&mut self) -> Result<Scalar> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.eat(b'/') {
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                acc = acc / d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Scalar> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let braced = self.eat(b'{');
        let neg = self.eat(b'-');
        let digits = self.digits()?;
        let mut e: i64 = digits
            .parse()
            .map_err(|_| self.err("exponent out of range"))?;
        if neg {
            e = -e;
        }
        if braced && !self.eat(b'}') {
            return Err(self.err("expected '}'"));
        }
        pow(&base, e)
    }

    fn digits(&mut self) -> Result<String> {
        self.peek();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<Scalar> {
        match self.peek() {
            Some(b'q') => {
                self.pos += 1;
                Ok(Scalar::q())
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits()?;
                let n: BigInt = d.parse().map_err(|_| self.err("bad integer"))?;
                Ok(Scalar::from_rational(Rational::from_integer(n)))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

fn pow(base: &Scalar, e: i64) -> Result<Scalar> {
    if let Some(p) = base.as_laurent() {
        if p.num_terms() == 1 {
            let (k, c) = p.terms().next().expect("one term");
            if e < 0 && c.numer().sign() == num_bigint::Sign::NoSign {
                return Err(Error::DivisionByZero);
            }
            let c = if e >= 0 {
                num_traits::pow(c.clone(), e as usize)
            } else {
                num_traits::pow(c.recip(), (-e) as usize)
            };
            return Ok(Scalar::from_laurent(
                super::LaurentPoly::monomial(c, k * e),
            ));
        }
    }
    let b = if e < 0 { base.inv()? } else { base.clone() };
    let mut acc = Scalar::one();
    for _ in 0..e.unsigned_abs() {
        acc = &acc * &b;
    }
    Ok(acc)
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
    };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_scalar(s)
    }
}
