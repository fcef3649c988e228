//! Text syntax: `3/5`, `sqrt(2)/2`, `(1+2*sqrt(5))/4`, `~0.7390851`.

use num_bigint::BigInt;
use num_traits::Signed;

use super::highprec::parse_decimal;
use super::{ExactError, Scalar};

pub(super) fn parse_scalar(text: &str) -> Result<Scalar, ExactError> {
    let t = text.trim();
    if let Some(lit) = t.strip_prefix('~') {
        return Scalar::high_prec(lit.trim());
    }
    let mut p = Parser { src: t, pos: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != t.len() {
        return Err(p.err());
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self) -> ExactError {
        ExactError::Parse(self.src.to_string())
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Scalar, ExactError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ExactError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?)?;
            } else if self.eat('/') {
                acc = acc.div(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, ExactError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Scalar, ExactError> {
        if self.eat('(') {
            let v = self.expr()?;
            if !self.eat(')') {
                return Err(self.err());
            }
            return Ok(v);
        }
        self.skip_ws();
        let rest = &self.src[self.pos..];
        if rest.starts_with("sqrt") {
            self.pos += 4;
            if !self.eat('(') {
                return Err(self.err());
            }
            let arg = self.expr()?;
            if !self.eat(')') {
                return Err(self.err());
            }
            return self.sqrt_of(&arg);
        }
        let len = rest
            .find(|c: char| !(c.is_ascii_digit() || c == '.'))
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err());
        }
        let lit = &rest[..len];
        self.pos += len;
        parse_decimal(lit).map(Scalar::from_rational).ok_or_else(|| self.err())
    }

    /// `√(a/b) = √(ab)/b` for a non-negative rational argument.
    fn sqrt_of(&self, arg: &Scalar) -> Result<Scalar, ExactError> {
        let r = arg.as_rational().ok_or_else(|| self.err())?;
        if r.is_negative() {
            return Err(self.err());
        }
        let prod: BigInt = r.numer() * r.denom();
        let d: u64 = prod.try_into().map_err(|_| self.err())?;
        Scalar::quad_big(0.into(), 1.into(), d, r.denom().clone())
    }
}
