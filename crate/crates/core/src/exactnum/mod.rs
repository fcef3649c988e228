//! Exact and adaptive-precision scalars.
//!
//! [`Scalar`] is either an exact rational, an exact quadratic irrational
//! `(p + q√d)/den`, or a [`HighPrec`] value carrying an error radius. Floor,
//! fractional-part and comparison decisions on exact values are always
//! correct; on high-precision values they escalate precision (doubling up to
//! [`PRECISION_CAP_BITS`]) and report [`ExactError::UndecidableAtPrecision`]
//! rather than guess.

mod ball;
mod highprec;
mod parse;
mod quad;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub(crate) use ball::Ball;
pub use highprec::HighPrec;
pub use quad::QuadIrr;

pub const DEFAULT_PRECISION_BITS: u32 = 128;
pub const PRECISION_CAP_BITS: u32 = 2048;

static DEFAULT_PRECISION: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION_BITS);

/// Starting precision for new high-precision values and for decisions.
pub fn default_precision_bits() -> u32 {
    DEFAULT_PRECISION.load(AtomicOrdering::Relaxed)
}

/// Clamped to `[32, PRECISION_CAP_BITS]`.
pub fn set_default_precision_bits(bits: u32) {
    DEFAULT_PRECISION.store(bits.clamp(32, PRECISION_CAP_BITS), AtomicOrdering::Relaxed);
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("incompatible quadratic fields Q(sqrt({0})) and Q(sqrt({1}))")]
    IncompatibleField(u64, u64),
    #[error("cannot decide: value within rounding distance of a boundary at the {cap}-bit precision cap")]
    UndecidableAtPrecision { cap: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Rational(BigRational),
    Quad(QuadIrr),
    HighPrec(HighPrec),
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (Scalar::Quad(a), Scalar::Quad(b)) => a == b,
            (Scalar::HighPrec(a), Scalar::HighPrec(b)) => a == b,
            _ => false,
        }
    }
}

/// `(p, q, d, den)` for `(p + q√d)/den`; `d` absent for rationals (`q = 0`).
type Parts = (BigInt, BigInt, Option<u64>, BigInt);

impl Scalar {
    pub fn int(n: i64) -> Scalar {
        Scalar::Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Scalar {
        Scalar::int(0)
    }

    pub fn one() -> Scalar {
        Scalar::int(1)
    }

    pub fn ratio(num: i64, den: i64) -> Result<Scalar, ExactError> {
        if den == 0 {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Scalar::Rational(BigRational::new(num.into(), den.into())))
    }

    pub fn from_rational(r: BigRational) -> Scalar {
        Scalar::Rational(r)
    }

    /// `(p + q√d)/den`, canonicalized: square factors of `d` move into `q`,
    /// a vanishing irrational part yields a rational, and `gcd(p, q, den)`
    /// is divided out with `den > 0`.
    pub fn quad(p: i64, q: i64, d: u64, den: i64) -> Result<Scalar, ExactError> {
        Scalar::quad_big(p.into(), q.into(), d, den.into())
    }

    pub fn quad_big(p: BigInt, q: BigInt, d: u64, den: BigInt) -> Result<Scalar, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let (k, d0) = if d == 0 { (0, 1) } else { quad::squarefree_split(d) };
        let q = q * BigInt::from(k);
        if d0 == 1 {
            // √d is the integer k, already folded into q
            return Ok(Scalar::Rational(BigRational::new(p + q, den)));
        }
        if q.is_zero() {
            return Ok(Scalar::Rational(BigRational::new(p, den)));
        }
        let (mut p, mut q, mut den) = (p, q, den);
        if den.is_negative() {
            p = -p;
            q = -q;
            den = -den;
        }
        let g = quad::gcd3(&p, &q, &den);
        Ok(Scalar::Quad(QuadIrr { p: p / &g, q: q / &g, d: d0, den: den / &g }))
    }

    /// High-precision value from a decimal literal at the default precision.
    pub fn high_prec(text: &str) -> Result<Scalar, ExactError> {
        HighPrec::literal(text, default_precision_bits())
            .map(Scalar::HighPrec)
            .ok_or_else(|| ExactError::Parse(format!("~{text}")))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::HighPrec(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_quad(&self) -> Option<&QuadIrr> {
        match self {
            Scalar::Quad(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_high_prec(&self) -> Option<&HighPrec> {
        match self {
            Scalar::HighPrec(h) => Some(h),
            _ => None,
        }
    }

    /// The discriminant `d` when the value is a quadratic irrational.
    pub fn field(&self) -> Option<u64> {
        self.as_quad().map(QuadIrr::d)
    }

    fn exact_parts(&self) -> Option<Parts> {
        match self {
            Scalar::Rational(r) => Some((r.numer().clone(), BigInt::zero(), None, r.denom().clone())),
            Scalar::Quad(q) => Some((q.p.clone(), q.q.clone(), Some(q.d), q.den.clone())),
            Scalar::HighPrec(_) => None,
        }
    }

    fn from_parts((p, q, d, den): Parts) -> Result<Scalar, ExactError> {
        Scalar::quad_big(p, q, d.unwrap_or(0), den)
    }

    fn merge_field(a: Option<u64>, b: Option<u64>) -> Result<Option<u64>, ExactError> {
        match (a, b) {
            (Some(x), Some(y)) if x != y => Err(ExactError::IncompatibleField(x, y)),
            (Some(x), _) | (_, Some(x)) => Ok(Some(x)),
            _ => Ok(None),
        }
    }

    fn to_high(&self, prec: u32) -> HighPrec {
        HighPrec::from_exact(self, prec)
    }

    pub(crate) fn exact_ball(&self, prec: u32) -> Ball {
        match self {
            Scalar::Rational(r) => Ball::from_ratio(r.numer(), r.denom(), prec),
            Scalar::Quad(qi) => {
                let w = prec + 8;
                let root = Ball::sqrt_int(qi.d, w);
                let num = Ball::exact_int(qi.q.clone())
                    .mul(&root, w)
                    .add(&Ball::exact_int(qi.p.clone()), w);
                num.div_int(&qi.den, prec)
            }
            Scalar::HighPrec(h) => h.ball_at(prec),
        }
    }

    fn ball_at(&self, prec: u32) -> Ball {
        match self {
            Scalar::HighPrec(h) => h.ball_at(prec),
            exact => exact.exact_ball(prec),
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Result<Scalar, ExactError> {
        arith(self, rhs, ArithOp::Add)
    }

    pub fn sub(&self, rhs: &Scalar) -> Result<Scalar, ExactError> {
        arith(self, rhs, ArithOp::Sub)
    }

    pub fn mul(&self, rhs: &Scalar) -> Result<Scalar, ExactError> {
        arith(self, rhs, ArithOp::Mul)
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Quad(q) => Scalar::Quad(QuadIrr {
                p: -&q.p,
                q: -&q.q,
                d: q.d,
                den: q.den.clone(),
            }),
            Scalar::HighPrec(h) => Scalar::HighPrec(h.negate()),
        }
    }

    pub fn mul_int(&self, k: i64) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r * BigInt::from(k)),
            Scalar::Quad(q) => {
                Scalar::quad_big(&q.p * k, &q.q * k, q.d, q.den.clone()).expect("nonzero den")
            }
            h => h.mul(&Scalar::int(k)).expect("rational factor is always compatible"),
        }
    }

    /// `self − rhs`, exact when the fields are compatible and a
    /// [`HighPrec`] value otherwise.
    pub fn sub_any(&self, rhs: &Scalar) -> Scalar {
        self.sub(rhs).unwrap_or_else(|_| {
            let prec = default_precision_bits();
            Scalar::HighPrec(HighPrec::from_exact(self, prec).combine(&HighPrec::from_exact(rhs, prec), ArithOp::Sub))
        })
    }

    /// `self + rhs`, see [`Scalar::sub_any`].
    pub fn add_any(&self, rhs: &Scalar) -> Scalar {
        self.sub_any(&rhs.neg())
    }

    /// Exact division; the divisor must be exact and nonzero.
    pub fn div(&self, rhs: &Scalar) -> Result<Scalar, ExactError> {
        let Some((p2, q2, d2, n2)) = rhs.exact_parts() else {
            return Err(ExactError::Parse("division by a high-precision value".into()));
        };
        let d = d2.unwrap_or(0);
        // 1/((p + q√d)/n) = n(p − q√d)/(p² − q²d)
        let norm = &p2 * &p2 - &q2 * &q2 * BigInt::from(d);
        if norm.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let inv = Scalar::quad_big(&n2 * &p2, -(&n2 * &q2), d, norm)?;
        self.mul(&inv)
    }

    /// `⌊s⌋`, provably correct.
    pub fn floor_exact(&self) -> Result<BigInt, ExactError> {
        match self {
            Scalar::Rational(r) => Ok(r.numer().div_floor(r.denom())),
            Scalar::Quad(q) => Ok(q.floor()),
            Scalar::HighPrec(_) => decide(&[self], |b| b[0].floor()),
        }
    }

    /// Truncation toward zero.
    pub fn trunc_exact(&self) -> Result<BigInt, ExactError> {
        match self {
            Scalar::HighPrec(_) => decide(&[self], |b| {
                b[0].monotone_int(|m, e| {
                    if e >= 0 {
                        m << (e as u64)
                    } else {
                        // integer division truncates toward zero
                        m / (BigInt::one() << ((-e) as u64))
                    }
                })
            }),
            exact => {
                let f = exact.floor_exact()?;
                if exact.signum()? == Ordering::Less && Scalar::from_rational(f.clone().into()) != *exact {
                    Ok(f + 1)
                } else {
                    Ok(f)
                }
            }
        }
    }

    pub fn signum(&self) -> Result<Ordering, ExactError> {
        match self {
            Scalar::Rational(r) => Ok(r.numer().sign().cmp(&num_bigint::Sign::NoSign)),
            Scalar::Quad(q) => Ok(q.signum()),
            Scalar::HighPrec(_) => decide(&[self], |b| b[0].cmp(&Ball::zero())),
        }
    }

    pub fn compare(&self, other: &Scalar) -> Result<Ordering, ExactError> {
        if self.is_exact() && other.is_exact() {
            return self.sub(other)?.signum();
        }
        decide(&[self, other], |b| b[0].cmp(&b[1]))
    }

    /// Whether `{s} = s − ⌊s⌋` lies in the interval from `lo` to `hi`.
    pub fn frac_in(
        &self,
        lo: &Scalar,
        hi: &Scalar,
        lo_closed: bool,
        hi_closed: bool,
    ) -> Result<bool, ExactError> {
        let accept = |lo_ord: Ordering, hi_ord: Ordering| {
            let lo_ok = lo_ord == Ordering::Greater || (lo_closed && lo_ord == Ordering::Equal);
            let hi_ok = hi_ord == Ordering::Less || (hi_closed && hi_ord == Ordering::Equal);
            lo_ok && hi_ok
        };
        if self.is_exact() && lo.is_exact() && hi.is_exact() {
            let f = self.frac()?;
            return Ok(accept(f.compare(lo)?, f.compare(hi)?));
        }
        decide(&[self, lo, hi], |b| {
            let fl = b[0].floor()?;
            let f = b[0].sub_int(&fl);
            Some(accept(f.cmp(&b[1])?, f.cmp(&b[2])?))
        })
    }

    /// Exact fractional part; high-precision values get the floor decided first.
    pub fn frac(&self) -> Result<Scalar, ExactError> {
        let f = self.floor_exact()?;
        self.sub(&Scalar::from_rational(f.into()))
    }

    /// Nearest `f64`, for reporting only.
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            _ => {
                let b = self.ball_at(64);
                b.to_decimal(20).parse().unwrap_or(f64::NAN)
            }
        }
    }
}

/// `lhs op rhs`; `rhs` is ignored for [`ArithOp::Neg`].
pub fn arith(lhs: &Scalar, rhs: &Scalar, op: ArithOp) -> Result<Scalar, ExactError> {
    if op == ArithOp::Neg {
        return Ok(lhs.neg());
    }
    match (lhs.exact_parts(), rhs.exact_parts()) {
        (Some((p1, q1, d1, n1)), Some((p2, q2, d2, n2))) => {
            let d = Scalar::merge_field(d1, d2)?;
            let parts = match op {
                ArithOp::Add => (&p1 * &n2 + &p2 * &n1, &q1 * &n2 + &q2 * &n1, d, &n1 * &n2),
                ArithOp::Sub => (&p1 * &n2 - &p2 * &n1, &q1 * &n2 - &q2 * &n1, d, &n1 * &n2),
                ArithOp::Mul => {
                    let dd = BigInt::from(d.unwrap_or(0));
                    (&p1 * &p2 + &q1 * &q2 * dd, &p1 * &q2 + &p2 * &q1, d, &n1 * &n2)
                }
                ArithOp::Neg => unreachable!(),
            };
            Scalar::from_parts(parts)
        }
        _ => {
            let prec = [lhs, rhs]
                .iter()
                .filter_map(|s| s.as_high_prec().map(HighPrec::precision_bits))
                .max()
                .unwrap_or_else(default_precision_bits);
            let a = lhs.to_high(prec);
            let b = rhs.to_high(prec);
            Ok(Scalar::HighPrec(a.combine(&b, op)))
        }
    }
}

/// Runs a ball-level decision, doubling the precision until it is decided or
/// the cap is reached.
fn decide<T>(vals: &[&Scalar], f: impl Fn(&[Ball]) -> Option<T>) -> Result<T, ExactError> {
    let mut prec = vals
        .iter()
        .filter_map(|s| s.as_high_prec().map(HighPrec::precision_bits))
        .max()
        .unwrap_or_else(default_precision_bits);
    loop {
        let balls: Vec<Ball> = vals.iter().map(|s| s.ball_at(prec)).collect();
        if let Some(t) = f(&balls) {
            return Ok(t);
        }
        if prec >= PRECISION_CAP_BITS {
            return Err(ExactError::UndecidableAtPrecision { cap: PRECISION_CAP_BITS });
        }
        prec = (prec * 2).min(PRECISION_CAP_BITS);
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Quad(qi) => {
                let root = format!("sqrt({})", qi.d);
                let qterm = if qi.q.is_one() {
                    root
                } else if qi.q == -BigInt::one() {
                    format!("-{root}")
                } else {
                    format!("{}*{root}", qi.q)
                };
                let num = if qi.p.is_zero() {
                    qterm
                } else if qi.q.is_negative() {
                    format!("{}{qterm}", qi.p)
                } else {
                    format!("{}+{qterm}", qi.p)
                };
                if qi.den.is_one() {
                    write!(f, "{num}")
                } else if qi.p.is_zero() {
                    write!(f, "{num}/{}", qi.den)
                } else {
                    write!(f, "({num})/{}", qi.den)
                }
            }
            Scalar::HighPrec(h) => write!(f, "{h}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse_scalar(s)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
