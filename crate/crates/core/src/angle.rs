//! Angle specifications, their exact sines and cosines, and the arithmetic
//! classification that decides which growth regime the censuses fall into.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::{default_precision_bits, ExactError, HighPrec, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AngleError {
    #[error("invalid angle: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Which leg of the primitive triple carries the sine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// `sin = ±(u² − v²)/q`, `cos = ±2uv/q`
    SinOdd,
    /// `sin = ±2uv/q`, `cos = ±(u² − v²)/q`
    SinEven,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn apply(self, v: i64) -> i64 {
        match self {
            Sign::Plus => v,
            Sign::Minus => -v,
        }
    }

    fn of(v: i64) -> Sign {
        if v < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AngleSpec {
    /// `num·π/den` with `den ∈ {1, 2, 3, 4, 6}` after reduction.
    PiMultiple { num: i64, den: i64 },
    Pythagorean { u: i64, v: i64, orientation: Orientation, sin_sign: Sign, cos_sign: Sign },
    QuadField { sin: Scalar, cos: Scalar },
    Numeric { radians: HighPrec },
}

/// Position of an angle in the case analysis of the censuses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AngleClass {
    /// A multiple `k·π/2`, `k` taken mod 4.
    CardinalMultiple { k: i64 },
    /// `sin = p1/q`, `cos = p2/q`.
    RationalPythagorean { p1: BigInt, p2: BigInt, q: BigInt },
    /// `cos = r1·sin + r2` with `sin` irrational (roles exchanged when `swapped`).
    LinearRelation { r1: BigRational, r2: BigRational, exceptional: bool, swapped: bool },
    /// 1, sin and cos are linearly independent over the rationals.
    GenericIndependent,
    UnknownNumeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quadrant {
    /// `sin > 0`, `cos > 0`
    First,
    /// `sin > 0`, `cos < 0`
    Second,
    /// `sin < 0`, `cos < 0`
    Third,
    /// `sin < 0`, `cos > 0`
    Fourth,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AngleContext {
    pub spec: AngleSpec,
    pub sin: Scalar,
    pub cos: Scalar,
    pub class: AngleClass,
}

impl AngleContext {
    pub fn is_cardinal(&self) -> bool {
        matches!(self.class, AngleClass::CardinalMultiple { .. })
    }

    /// `None` on the axes (sin or cos zero).
    pub fn quadrant(&self) -> Result<Option<Quadrant>, ExactError> {
        let s = self.sin.signum()?;
        let c = self.cos.signum()?;
        Ok(match (s, c) {
            (Ordering::Greater, Ordering::Greater) => Some(Quadrant::First),
            (Ordering::Greater, Ordering::Less) => Some(Quadrant::Second),
            (Ordering::Less, Ordering::Less) => Some(Quadrant::Third),
            (Ordering::Less, Ordering::Greater) => Some(Quadrant::Fourth),
            _ => None,
        })
    }

    pub fn label(&self) -> String {
        self.spec.to_string()
    }
}

pub fn resolve(spec: AngleSpec) -> Result<AngleContext, AngleError> {
    let (spec, sin, cos) = match spec {
        AngleSpec::PiMultiple { num, den } => {
            let (num, den) = reduce_pi_multiple(num, den)?;
            let t = (num * (12 / den)).rem_euclid(24);
            let sin = sin_fifteen(t);
            let cos = sin_fifteen((t + 6) % 24);
            (AngleSpec::PiMultiple { num, den }, sin, cos)
        }
        AngleSpec::Pythagorean { u, v, orientation, sin_sign, cos_sign } => {
            if !(u > v && v >= 1) || u.gcd(&v) != 1 || (u - v) % 2 == 0 {
                return Err(AngleError::InvalidSpec(format!(
                    "(u, v) = ({u}, {v}) must satisfy u > v ≥ 1, gcd 1, opposite parity"
                )));
            }
            let odd = u * u - v * v;
            let even = 2 * u * v;
            let q = u * u + v * v;
            let (s, c) = match orientation {
                Orientation::SinOdd => (odd, even),
                Orientation::SinEven => (even, odd),
            };
            let sin = Scalar::ratio(sin_sign.apply(s), q)?;
            let cos = Scalar::ratio(cos_sign.apply(c), q)?;
            (AngleSpec::Pythagorean { u, v, orientation, sin_sign, cos_sign }, sin, cos)
        }
        AngleSpec::QuadField { sin, cos } => {
            if !sin.is_exact() || !cos.is_exact() {
                return Err(AngleError::InvalidSpec("quad angle needs exact sin and cos".into()));
            }
            if !is_unit(&sin, &cos)? {
                return Err(AngleError::InvalidSpec(format!("sin² + cos² ≠ 1 for sin={sin}, cos={cos}")));
            }
            (AngleSpec::QuadField { sin: sin.clone(), cos: cos.clone() }, sin, cos)
        }
        AngleSpec::Numeric { radians } => {
            let sin = Scalar::HighPrec(radians.sin());
            let cos = Scalar::HighPrec(radians.cos());
            (AngleSpec::Numeric { radians }, sin, cos)
        }
    };
    let class = classify(&sin, &cos);
    Ok(AngleContext { spec, sin, cos, class })
}

fn reduce_pi_multiple(num: i64, den: i64) -> Result<(i64, i64), AngleError> {
    if den == 0 {
        return Err(AngleError::InvalidSpec("zero denominator".into()));
    }
    let g = num.gcd(&den).max(1);
    let (mut n, mut d) = (num / g, den / g);
    if d < 0 {
        n = -n;
        d = -d;
    }
    if n == 0 {
        d = 1;
    }
    if ![1, 2, 3, 4, 6].contains(&d) {
        return Err(AngleError::InvalidSpec(format!(
            "pi multiples need a denominator in {{1,2,3,4,6}}, got {d}"
        )));
    }
    Ok((n, d))
}

/// Exact `sin(15°·t)` for `t` a multiple of 2 or 3.
fn sin_fifteen(t: i64) -> Scalar {
    let t = t.rem_euclid(24);
    if t >= 12 {
        return sin_fifteen(t - 12).neg();
    }
    let t = if t > 6 { 12 - t } else { t };
    let q = |p, q, d, den| Scalar::quad(p, q, d, den).expect("table entry");
    match t {
        0 => Scalar::zero(),
        2 => q(1, 0, 1, 2),
        3 => q(0, 1, 2, 2),
        4 => q(0, 1, 3, 2),
        6 => Scalar::one(),
        _ => unreachable!("denominators restricted to 1, 2, 3, 4, 6"),
    }
}

fn is_unit(sin: &Scalar, cos: &Scalar) -> Result<bool, ExactError> {
    let s2 = sin.mul(sin)?;
    let c2 = cos.mul(cos)?;
    match s2.add(&c2) {
        Ok(sum) => Ok(sum == Scalar::one()),
        // squares in different quadratic fields cannot sum to a rational
        Err(ExactError::IncompatibleField(..)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Irrational coefficient `q/den` of a quadratic irrational.
fn irrational_part(s: &Scalar) -> Option<BigRational> {
    s.as_quad().map(|q| BigRational::new(q.q().clone(), q.den().clone()))
}

pub fn classify(sin: &Scalar, cos: &Scalar) -> AngleClass {
    if !sin.is_exact() || !cos.is_exact() {
        return AngleClass::UnknownNumeric;
    }
    match (sin.as_rational(), cos.as_rational()) {
        (Some(s), Some(c)) => {
            if s.is_zero() {
                let k = if c.is_positive() { 0 } else { 2 };
                return AngleClass::CardinalMultiple { k };
            }
            if c.is_zero() {
                let k = if s.is_positive() { 1 } else { 3 };
                return AngleClass::CardinalMultiple { k };
            }
            let q = s.denom().lcm(c.denom());
            let p1 = s.numer() * (&q / s.denom());
            let p2 = c.numer() * (&q / c.denom());
            AngleClass::RationalPythagorean { p1, p2, q }
        }
        (None, Some(c)) => AngleClass::LinearRelation {
            r1: BigRational::zero(),
            r2: c.clone(),
            exceptional: false,
            swapped: false,
        },
        (Some(s), None) => AngleClass::LinearRelation {
            r1: BigRational::zero(),
            r2: s.clone(),
            exceptional: false,
            swapped: true,
        },
        (None, None) => {
            if sin.field() != cos.field() {
                return AngleClass::GenericIndependent;
            }
            let (Some(is), Some(ic)) = (irrational_part(sin), irrational_part(cos)) else {
                return AngleClass::GenericIndependent;
            };
            let r1 = ic / is;
            let r1s = Scalar::from_rational(r1.clone());
            let rest = cos.sub(&sin.mul(&r1s).expect("same field")).expect("same field");
            let r2 = rest
                .as_rational()
                .cloned()
                .expect("matching irrational parts leave a rational");
            let exceptional = r1.abs() == BigRational::from_integer(1.into());
            AngleClass::LinearRelation { r1, r2, exceptional, swapped: false }
        }
    }
}

impl AngleClass {
    pub fn name(&self) -> &'static str {
        match self {
            AngleClass::CardinalMultiple { .. } => "cardinal_multiple",
            AngleClass::RationalPythagorean { .. } => "rational_pythagorean",
            AngleClass::LinearRelation { .. } => "linear_relation",
            AngleClass::GenericIndependent => "generic_independent",
            AngleClass::UnknownNumeric => "unknown_numeric",
        }
    }

    /// Whether the class is the one for which linear rather than quadratic
    /// census growth is claimed.
    pub fn is_exceptional(&self) -> bool {
        matches!(self, AngleClass::LinearRelation { exceptional: true, .. })
    }
}

fn ser_int<S: SerializeStruct>(st: &mut S, key: &'static str, v: &BigInt) -> Result<(), S::Error> {
    match v.to_i64() {
        Some(i) => st.serialize_field(key, &i),
        None => st.serialize_field(key, &v.to_string()),
    }
}

fn ratio_text(r: &BigRational) -> String {
    Scalar::from_rational(r.clone()).to_string()
}

impl Serialize for AngleClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            AngleClass::CardinalMultiple { k } => {
                let mut st = serializer.serialize_struct("AngleClass", 2)?;
                st.serialize_field("kind", self.name())?;
                st.serialize_field("k", k)?;
                st.end()
            }
            AngleClass::RationalPythagorean { p1, p2, q } => {
                let mut st = serializer.serialize_struct("AngleClass", 4)?;
                st.serialize_field("kind", self.name())?;
                ser_int(&mut st, "p1", p1)?;
                ser_int(&mut st, "p2", p2)?;
                ser_int(&mut st, "q", q)?;
                st.end()
            }
            AngleClass::LinearRelation { r1, r2, exceptional, swapped } => {
                let mut st = serializer.serialize_struct("AngleClass", 5)?;
                st.serialize_field("kind", self.name())?;
                st.serialize_field("r1", &ratio_text(r1))?;
                st.serialize_field("r2", &ratio_text(r2))?;
                st.serialize_field("exceptional", exceptional)?;
                st.serialize_field("swapped", swapped)?;
                st.end()
            }
            AngleClass::GenericIndependent | AngleClass::UnknownNumeric => {
                let mut st = serializer.serialize_struct("AngleClass", 1)?;
                st.serialize_field("kind", self.name())?;
                st.end()
            }
        }
    }
}

impl Serialize for AngleContext {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("AngleContext", 4)?;
        st.serialize_field("spec", &self.spec.to_string())?;
        st.serialize_field("sin", &self.sin)?;
        st.serialize_field("cos", &self.cos)?;
        st.serialize_field("class", &self.class)?;
        st.end()
    }
}

impl fmt::Display for AngleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngleSpec::PiMultiple { num, den } => {
                if *num == 0 {
                    return write!(f, "0");
                }
                let sign = if *num < 0 { "-" } else { "" };
                let n = num.abs();
                let head = if n == 1 { "pi".to_string() } else { format!("pi*{n}") };
                if *den == 1 {
                    write!(f, "{sign}{head}")
                } else {
                    write!(f, "{sign}{head}/{den}")
                }
            }
            AngleSpec::Pythagorean { u, v, orientation, sin_sign, cos_sign } => {
                let odd = u * u - v * v;
                let even = 2 * u * v;
                let (s, c) = match orientation {
                    Orientation::SinOdd => (odd, even),
                    Orientation::SinEven => (even, odd),
                };
                write!(f, "pyth:{},{},{}", sin_sign.apply(s), cos_sign.apply(c), u * u + v * v)
            }
            AngleSpec::QuadField { sin, cos } => write!(f, "quad:sin={sin},cos={cos}"),
            AngleSpec::Numeric { radians } => write!(f, "rad:{radians}"),
        }
    }
}

impl FromStr for AngleSpec {
    type Err = AngleError;

    /// `pi/4`, `pi*3/4`, `-pi/2`, `3*pi/2`, `0`, `pyth:3,4,5`,
    /// `quad:sin=sqrt(2)/2,cos=sqrt(2)/2`, `rad:~1.0`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        AngleSpec::parse_with_precision(text, default_precision_bits())
    }
}

impl AngleSpec {
    /// Like `str::parse`, with `rad:` literals held to `prec` bits.
    pub fn parse_with_precision(text: &str, prec: u32) -> Result<Self, AngleError> {
        let t = text.trim();
        let bad = || AngleError::InvalidSpec(t.to_string());
        if let Some(rest) = t.strip_prefix("pyth:") {
            let legs: Vec<i64> = rest
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|_| bad())?;
            let [s, c, q] = legs[..] else { return Err(bad()) };
            return pythagorean_from_legs(s, c, q);
        }
        if let Some(rest) = t.strip_prefix("quad:") {
            let rest = rest.strip_prefix("sin=").ok_or_else(bad)?;
            let (s, c) = rest.split_once(",cos=").ok_or_else(bad)?;
            let sin: Scalar = s.parse()?;
            let cos: Scalar = c.parse()?;
            return Ok(AngleSpec::QuadField { sin, cos });
        }
        if let Some(rest) = t.strip_prefix("rad:") {
            let lit = rest.trim();
            let lit = lit.strip_prefix('~').unwrap_or(lit);
            let radians = HighPrec::literal(lit, prec).ok_or_else(bad)?;
            return Ok(AngleSpec::Numeric { radians });
        }
        parse_pi_multiple(t).ok_or_else(bad)
    }
}

fn parse_pi_multiple(t: &str) -> Option<AngleSpec> {
    let compact: String = t.chars().filter(|c| !c.is_whitespace()).collect();
    if compact == "0" {
        return Some(AngleSpec::PiMultiple { num: 0, den: 1 });
    }
    let (neg, body) = match compact.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, compact.as_str()),
    };
    let (head, den) = match body.split_once('/') {
        Some((h, d)) => (h, d.parse::<i64>().ok()?),
        None => (body, 1),
    };
    let num = if head == "pi" {
        1
    } else {
        head.strip_prefix("pi*").or_else(|| head.strip_suffix("*pi"))?.parse::<i64>().ok()?
    };
    let num = if neg { -num } else { num };
    let (num, den) = reduce_pi_multiple(num, den).ok()?;
    Some(AngleSpec::PiMultiple { num, den })
}

/// `(sin numerator, cos numerator, hypotenuse)` of a signed primitive triple.
fn pythagorean_from_legs(s: i64, c: i64, q: i64) -> Result<AngleSpec, AngleError> {
    let bad = |why: &str| AngleError::InvalidSpec(format!("pyth:{s},{c},{q}: {why}"));
    if q <= 0 || s == 0 || c == 0 {
        return Err(bad("legs must be nonzero and the hypotenuse positive"));
    }
    let sq = |x: i64| (x as i128) * (x as i128);
    if sq(s) + sq(c) != sq(q) {
        return Err(bad("not a Pythagorean triple"));
    }
    if s.abs().gcd(&q) != 1 {
        return Err(bad("triple is not primitive"));
    }
    let (odd, orientation) = if s % 2 != 0 {
        (s.abs(), Orientation::SinOdd)
    } else {
        (c.abs(), Orientation::SinEven)
    };
    let u = isqrt_exact((q + odd) / 2).ok_or_else(|| bad("no (u, v) parameterization"))?;
    let v = isqrt_exact((q - odd) / 2).ok_or_else(|| bad("no (u, v) parameterization"))?;
    Ok(AngleSpec::Pythagorean { u, v, orientation, sin_sign: Sign::of(s), cos_sign: Sign::of(c) })
}

fn isqrt_exact(n: i64) -> Option<i64> {
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(text: &str) -> AngleContext {
        resolve(text.parse().unwrap()).unwrap()
    }

    fn q(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn resolve_examples() {
        let c = ctx("pi/2");
        assert_eq!((c.sin.clone(), c.cos.clone()), (Scalar::one(), Scalar::zero()));
        assert_eq!(c.class, AngleClass::CardinalMultiple { k: 1 });

        let spec = AngleSpec::Pythagorean {
            u: 2,
            v: 1,
            orientation: Orientation::SinOdd,
            sin_sign: Sign::Plus,
            cos_sign: Sign::Plus,
        };
        let c = resolve(spec).unwrap();
        assert_eq!((c.sin.clone(), c.cos.clone()), (q("3/5"), q("4/5")));
        assert_eq!(
            c.class,
            AngleClass::RationalPythagorean { p1: 3.into(), p2: 4.into(), q: 5.into() }
        );

        let c = ctx("pi/4");
        assert_eq!(c.sin, q("sqrt(2)/2"));
        assert_eq!(c.cos, q("sqrt(2)/2"));
        assert!(c.class.is_exceptional());
        assert_eq!(
            c.class,
            AngleClass::LinearRelation {
                r1: BigRational::from_integer(1.into()),
                r2: BigRational::zero(),
                exceptional: true,
                swapped: false
            }
        );
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(&q("3/5"), &q("4/5")),
            AngleClass::RationalPythagorean { p1: 3.into(), p2: 4.into(), q: 5.into() }
        );
        match classify(&q("1/2"), &q("sqrt(3)/2")) {
            AngleClass::LinearRelation { swapped, exceptional, .. } => {
                assert!(swapped);
                assert!(!exceptional);
            }
            other => panic!("{other:?}"),
        }
        match classify(&q("sqrt(3)/2"), &q("1/2")) {
            AngleClass::LinearRelation { swapped, exceptional, r1, .. } => {
                assert!(!swapped && !exceptional && r1.is_zero());
            }
            other => panic!("{other:?}"),
        }
        // 3π/4: cos = −sin, still exceptional
        assert!(ctx("pi*3/4").class.is_exceptional());
        // √3/3 and √6/3 live in different fields
        assert_eq!(classify(&q("sqrt(3)/3"), &q("sqrt(6)/3")), AngleClass::GenericIndependent);
        assert_eq!(ctx("rad:~1.0").class, AngleClass::UnknownNumeric);
    }

    #[test]
    fn cardinal_multiples() {
        for k in -8i64..=8 {
            for den in [1i64, 2] {
                let c = resolve(AngleSpec::PiMultiple { num: k, den }).unwrap();
                let quarter_turns = k * (2 / den);
                let expect = AngleClass::CardinalMultiple { k: quarter_turns.rem_euclid(4) };
                assert_eq!(c.class, expect, "{k}π/{den}");
            }
        }
        assert!(!ctx("pi/3").is_cardinal());
    }

    #[test]
    fn unit_circle_exact() {
        for t in ["0", "pi/6", "pi/4", "pi/3", "pi/2", "pi*2/3", "pi*5/6", "pi*7/4", "-pi/3", "pyth:-5,12,13"] {
            let c = ctx(t);
            let one = c.sin.mul(&c.sin).unwrap().add(&c.cos.mul(&c.cos).unwrap()).unwrap();
            assert_eq!(one, Scalar::one(), "{t}");
        }
    }

    #[test]
    fn grammar_round_trip() {
        for t in ["0", "pi", "pi/4", "pi*3/4", "-pi/2", "pi*3/2", "pyth:3,4,5", "pyth:-12,5,13",
                  "quad:sin=sqrt(2)/2,cos=sqrt(2)/2", "rad:~1.0"] {
            let spec: AngleSpec = t.parse().unwrap();
            assert_eq!(spec.to_string(), t);
        }
        assert_eq!("3*pi/2".parse::<AngleSpec>().unwrap().to_string(), "pi*3/2");
        assert_eq!("pi*2/4".parse::<AngleSpec>().unwrap().to_string(), "pi/2");
    }

    #[test]
    fn invalid_specs() {
        for t in ["pyth:3,4,6", "pyth:6,8,10", "pi/5", "pi/12", "quad:sin=1/2,cos=1/2", "rad:x", "tau"] {
            let r = t.parse::<AngleSpec>().and_then(resolve);
            assert!(r.is_err(), "{t}");
        }
        let bad = AngleSpec::Pythagorean {
            u: 3,
            v: 1,
            orientation: Orientation::SinOdd,
            sin_sign: Sign::Plus,
            cos_sign: Sign::Plus,
        };
        assert!(matches!(resolve(bad), Err(AngleError::InvalidSpec(_))));
    }

    #[test]
    fn orientation_inferred() {
        match "pyth:4,3,5".parse::<AngleSpec>().unwrap() {
            AngleSpec::Pythagorean { u, v, orientation, .. } => {
                assert_eq!((u, v, orientation), (2, 1, Orientation::SinEven));
            }
            other => panic!("{other:?}"),
        }
        let c = ctx("pyth:-3,4,5");
        assert_eq!(c.quadrant().unwrap(), Some(Quadrant::Fourth));
        assert_eq!(ctx("pyth:3,-4,5").quadrant().unwrap(), Some(Quadrant::Second));
    }
}
