use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::ball::{sin_cos, Ball};
use super::Scalar;

/// How a high-precision value was obtained, kept so it can be re-evaluated
/// at a finer precision when a decision is too close to call.
#[derive(Debug)]
pub(super) enum Expr {
    Exact(Scalar),
    Literal { text: String, value: BigRational },
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
}

const GUARD_BITS: u32 = 16;

impl Expr {
    fn eval(&self, prec: u32) -> Ball {
        let w = prec + GUARD_BITS;
        let b = match self {
            Expr::Exact(s) => s.exact_ball(w),
            Expr::Literal { value, .. } => Ball::from_ratio(value.numer(), value.denom(), w),
            Expr::Sin(x) => sin_cos(&x.eval(w), w).0,
            Expr::Cos(x) => sin_cos(&x.eval(w), w).1,
            Expr::Add(a, b) => a.eval(w).add(&b.eval(w), w),
            Expr::Sub(a, b) => a.eval(w).sub(&b.eval(w), w),
            Expr::Mul(a, b) => a.eval(w).mul(&b.eval(w), w),
            Expr::Neg(a) => a.eval(w).neg(),
        };
        b.round(prec)
    }
}

/// A real number known to `precision_bits` bits, with an explicit error radius.
#[derive(Clone, Debug)]
pub struct HighPrec {
    expr: Arc<Expr>,
    ball: Ball,
    prec: u32,
}

impl PartialEq for HighPrec {
    fn eq(&self, other: &Self) -> bool {
        self.prec == other.prec && self.ball == other.ball
    }
}

impl HighPrec {
    fn from_expr(expr: Expr, prec: u32) -> Self {
        let ball = expr.eval(prec);
        HighPrec { expr: Arc::new(expr), ball, prec }
    }

    fn from_arc(expr: Arc<Expr>, prec: u32) -> Self {
        let ball = expr.eval(prec);
        HighPrec { expr, ball, prec }
    }

    /// A decimal literal such as `0.7390851` or `-1.5`, taken as an exact decimal.
    pub fn literal(text: &str, prec: u32) -> Option<Self> {
        let value = parse_decimal(text)?;
        Some(Self::from_expr(Expr::Literal { text: text.to_string(), value }, prec))
    }

    pub fn from_exact(s: &Scalar, prec: u32) -> Self {
        match s {
            Scalar::HighPrec(h) => h.refine(prec),
            exact => Self::from_expr(Expr::Exact(exact.clone()), prec),
        }
    }

    pub fn precision_bits(&self) -> u32 {
        self.prec
    }

    /// Re-evaluates from the defining expression at `prec` bits.
    pub fn refine(&self, prec: u32) -> Self {
        if prec == self.prec {
            return self.clone();
        }
        Self::from_arc(self.expr.clone(), prec)
    }

    pub(super) fn ball_at(&self, prec: u32) -> Ball {
        if prec <= self.prec {
            self.ball.clone()
        } else {
            self.expr.eval(prec)
        }
    }

    pub fn sin(&self) -> Self {
        Self::from_expr(Expr::Sin(self.expr.clone()), self.prec)
    }

    pub fn cos(&self) -> Self {
        Self::from_expr(Expr::Cos(self.expr.clone()), self.prec)
    }

    pub(super) fn combine(&self, other: &HighPrec, op: super::ArithOp) -> Self {
        let prec = self.prec.max(other.prec);
        let (a, b) = (self.expr.clone(), other.expr.clone());
        let expr = match op {
            super::ArithOp::Add => Expr::Add(a, b),
            super::ArithOp::Sub => Expr::Sub(a, b),
            super::ArithOp::Mul => Expr::Mul(a, b),
            super::ArithOp::Neg => Expr::Neg(a),
        };
        Self::from_expr(expr, prec)
    }

    pub(super) fn negate(&self) -> Self {
        HighPrec {
            expr: Arc::new(Expr::Neg(self.expr.clone())),
            ball: self.ball.neg(),
            prec: self.prec,
        }
    }

    #[cfg(test)]
    pub(super) fn ball(&self) -> &Ball {
        &self.ball
    }
}

impl fmt::Display for HighPrec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Expr::Literal { text, .. } = self.expr.as_ref() {
            return write!(f, "~{text}");
        }
        let digits = self.ball.accurate_digits().min(600);
        write!(f, "~{}", self.ball.to_decimal(digits))
    }
}

/// Parses `[-]digits[.digits]` into an exact rational.
pub(super) fn parse_decimal(text: &str) -> Option<BigRational> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = if digits.is_empty() { BigInt::from(0) } else { digits.parse().ok()? };
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    let v = BigRational::new(num, den);
    Some(if neg { -v } else { v })
}
