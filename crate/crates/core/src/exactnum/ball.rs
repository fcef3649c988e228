//! Mid-radius dyadic balls.
//!
//! A [`Ball`] encloses a real number in `[(mid − rad)·2^exp, (mid + rad)·2^exp]`.
//! Every operation returns a ball that contains all results of the exact
//! operation applied to members of the operand balls.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Ball {
    mid: BigInt,
    rad: BigUint,
    exp: i64,
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// `⌈n / 2^k⌉` for non-negative `n`.
fn shr_ceil(n: &BigUint, k: u64) -> BigUint {
    if k == 0 {
        return n.clone();
    }
    let q = n >> k;
    if (&q << k) == *n {
        q
    } else {
        q + 1u32
    }
}

fn floor_shift(n: &BigInt, exp: i64) -> BigInt {
    if exp >= 0 {
        n << (exp as u64)
    } else {
        n.div_floor(&pow2((-exp) as u64))
    }
}

impl Ball {
    pub fn exact_int(n: BigInt) -> Self {
        Ball { mid: n, rad: BigUint::zero(), exp: 0 }
    }

    pub fn zero() -> Self {
        Self::exact_int(BigInt::zero())
    }

    #[cfg(test)]
    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Encloses `num / den` (`den > 0`) with about `prec` significant bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        debug_assert!(den.is_positive());
        if num.is_zero() {
            return Self::zero();
        }
        let k = prec as i64 + 2 - (num.bits() as i64 - den.bits() as i64);
        let (scaled_num, scaled_den) = if k >= 0 {
            (num << (k as u64), den.clone())
        } else {
            (num.clone(), den << ((-k) as u64))
        };
        let (q, r) = scaled_num.div_mod_floor(&scaled_den);
        let rad = if r.is_zero() { BigUint::zero() } else { BigUint::one() };
        Ball { mid: q, rad, exp: -k }.round(prec)
    }

    /// Encloses `√d` for a non-negative integer `d`.
    pub fn sqrt_int(d: u64, prec: u32) -> Self {
        if d == 0 {
            return Self::zero();
        }
        let dbits = 64 - d.leading_zeros() as i64;
        let k = (prec as i64 + 2 - dbits / 2).max(0) as u64;
        let scaled = BigInt::from(d) << (2 * k);
        let s = scaled.sqrt();
        let rad = if &s * &s == scaled { BigUint::zero() } else { BigUint::one() };
        Ball { mid: s, rad, exp: -(k as i64) }
    }

    /// Rounds the midpoint to at most `prec + 1` significant bits, widening the radius.
    pub fn round(self, prec: u32) -> Self {
        let bits = self.mid.bits().max(self.rad.bits());
        let keep = prec as u64 + 1;
        if bits <= keep + 2 {
            return self;
        }
        let k = bits - keep;
        let (q, r) = self.mid.div_mod_floor(&pow2(k));
        let extra = if r.is_zero() { 0u32 } else { 1u32 };
        Ball {
            mid: q,
            rad: shr_ceil(&self.rad, k) + extra,
            exp: self.exp + k as i64,
        }
    }

    fn align(&self, other: &Ball) -> (BigInt, BigUint, BigInt, BigUint, i64) {
        let e = self.exp.min(other.exp);
        let s1 = (self.exp - e) as u64;
        let s2 = (other.exp - e) as u64;
        (&self.mid << s1, &self.rad << s1, &other.mid << s2, &other.rad << s2, e)
    }

    pub fn add(&self, other: &Ball, prec: u32) -> Ball {
        let (m1, r1, m2, r2, e) = self.align(other);
        Ball { mid: m1 + m2, rad: r1 + r2, exp: e }.round(prec)
    }

    pub fn sub(&self, other: &Ball, prec: u32) -> Ball {
        self.add(&other.neg(), prec)
    }

    /// Exact difference, no rounding.
    fn sub_exact(&self, other: &Ball) -> Ball {
        let (m1, r1, m2, r2, e) = self.align(other);
        Ball { mid: m1 - m2, rad: r1 + r2, exp: e }
    }

    pub fn neg(&self) -> Ball {
        Ball { mid: -&self.mid, rad: self.rad.clone(), exp: self.exp }
    }

    pub fn mul(&self, other: &Ball, prec: u32) -> Ball {
        let a1 = self.mid.magnitude();
        let a2 = other.mid.magnitude();
        let rad = a1 * &other.rad + a2 * &self.rad + &self.rad * &other.rad;
        Ball {
            mid: &self.mid * &other.mid,
            rad,
            exp: self.exp + other.exp,
        }
        .round(prec)
    }

    /// Divides by a positive integer.
    pub fn div_int(&self, den: &BigInt, prec: u32) -> Ball {
        debug_assert!(den.is_positive());
        let s = den.bits() + prec as u64 + 4;
        let num = &self.mid << s;
        let (q, r) = num.div_mod_floor(den);
        let extra = if r.is_zero() { 0u32 } else { 1u32 };
        let den_u = den.magnitude();
        let rs = &self.rad << s;
        let (rq, rr) = rs.div_mod_floor(den_u);
        let rad = rq + if rr.is_zero() { 0u32 } else { 1u32 } + extra;
        Ball { mid: q, rad, exp: self.exp - s as i64 }.round(prec)
    }

    fn lower(&self) -> BigInt {
        &self.mid - BigInt::from_biguint(Sign::Plus, self.rad.clone())
    }

    fn upper(&self) -> BigInt {
        &self.mid + BigInt::from_biguint(Sign::Plus, self.rad.clone())
    }

    /// Floor of the enclosed number, if every member shares it.
    pub fn floor(&self) -> Option<BigInt> {
        let lo = floor_shift(&self.lower(), self.exp);
        let hi = floor_shift(&self.upper(), self.exp);
        (lo == hi).then_some(lo)
    }

    /// Applies a monotone integer-valued map to both endpoints.
    pub fn monotone_int(&self, f: impl Fn(&BigInt, i64) -> BigInt) -> Option<BigInt> {
        let lo = f(&self.lower(), self.exp);
        let hi = f(&self.upper(), self.exp);
        (lo == hi).then_some(lo)
    }

    /// Subtracts an exact integer.
    pub fn sub_int(&self, n: &BigInt) -> Ball {
        self.sub_exact(&Ball::exact_int(n.clone()))
    }

    pub fn cmp(&self, other: &Ball) -> Option<Ordering> {
        let d = self.sub_exact(other);
        if d.rad.is_zero() {
            return Some(match d.mid.sign() {
                Sign::Minus => Ordering::Less,
                Sign::NoSign => Ordering::Equal,
                Sign::Plus => Ordering::Greater,
            });
        }
        if d.lower().is_positive() {
            Some(Ordering::Greater)
        } else if d.upper().is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Radius relative to `|mid|`, as `(rad, |mid|)` in common units.
    #[cfg(test)]
    pub fn rad_mid(&self) -> (&BigUint, BigUint) {
        (&self.rad, self.mid.magnitude().clone())
    }

    /// Midpoint and radius as a fixed-point pair at scale `2^-scale`.
    /// The returned radius covers the conversion error.
    pub fn to_fixed(&self, scale: u32) -> (BigInt, BigUint) {
        let shift = self.exp + scale as i64;
        if shift >= 0 {
            (&self.mid << (shift as u64), &self.rad << (shift as u64))
        } else {
            let k = (-shift) as u64;
            let mid = self.mid.div_floor(&pow2(k));
            (mid, shr_ceil(&self.rad, k) + 1u32)
        }
    }

    /// Decimal rendering of the midpoint with `digits` fractional digits (truncated).
    pub fn to_decimal(&self, digits: usize) -> String {
        let ten_pow = BigInt::from(10u32).pow(digits as u32);
        let scaled = if self.exp >= 0 {
            (&self.mid << (self.exp as u64)) * &ten_pow
        } else {
            let v = &self.mid * &ten_pow;
            let p = pow2((-self.exp) as u64);
            // truncate toward zero so the printed digits are a prefix of the value
            let (q, _) = v.magnitude().div_rem(p.magnitude());
            if v.is_negative() {
                -BigInt::from(q)
            } else {
                BigInt::from(q)
            }
        };
        let neg = scaled.is_negative() || (self.mid.is_negative() && scaled.is_zero());
        let s = scaled.magnitude().to_string();
        let s = if s.len() <= digits {
            format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
        } else {
            s
        };
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// Number of decimal digits after the point that the radius leaves meaningful.
    pub fn accurate_digits(&self) -> usize {
        if self.rad.is_zero() {
            return 40;
        }
        let rad_bits = self.rad.bits() as i64 + self.exp;
        if rad_bits >= 0 {
            0
        } else {
            ((-rad_bits) as f64 * std::f64::consts::LOG10_2).floor() as usize
        }
    }
}

/// Encloses `(sin x, cos x)` for every `x` in the input ball.
pub(crate) fn sin_cos(x: &Ball, prec: u32) -> (Ball, Ball) {
    if x.mid.is_zero() && x.rad.is_zero() {
        return (Ball::zero(), Ball::exact_int(BigInt::one()));
    }
    // |mid·2^exp| < 2^mag
    let mag = x.mid.bits() as i64 + x.exp;
    // halve until |y| ≤ 1/2
    let halvings = (mag + 1).max(0) as u64;
    let frac_bits = prec as u64 + 2 * halvings + 64;
    let one = pow2(frac_bits);

    // y = mid·2^(exp − halvings) as fixed point with `frac_bits` fractional bits
    let shift = x.exp - halvings as i64 + frac_bits as i64;
    let y = floor_shift(&x.mid, shift);
    let y2 = (&y * &y) >> frac_bits;

    let mut s = y.clone();
    let mut c = one.clone();
    let mut ts = y;
    let mut tc = one;
    let mut n: u64 = 1;
    let mut terms: u64 = 0;
    loop {
        ts = -((&ts * &y2) >> frac_bits) / BigInt::from((2 * n) * (2 * n + 1));
        tc = -((&tc * &y2) >> frac_bits) / BigInt::from((2 * n - 1) * (2 * n));
        terms += 1;
        if ts.is_zero() && tc.is_zero() {
            break;
        }
        s += &ts;
        c += &tc;
        n += 1;
    }
    // per-term truncation and the conversion of y each cost at most a few ulps
    let err = BigUint::from(4 * terms + 8);
    let work = frac_bits as u32;
    let mut sb = Ball { mid: s, rad: err.clone(), exp: -(frac_bits as i64) };
    let mut cb = Ball { mid: c, rad: err, exp: -(frac_bits as i64) };
    let two = Ball::exact_int(BigInt::from(2));
    let unit = Ball::exact_int(BigInt::one());
    for _ in 0..halvings {
        let s2 = two.mul(&sb, work).mul(&cb, work);
        let c2 = unit.sub(&two.mul(&sb.mul(&sb, work), work), work);
        sb = s2;
        cb = c2;
    }
    // sin and cos are 1-Lipschitz: absorb the input radius
    let widen = |b: Ball| -> Ball {
        if x.rad.is_zero() {
            return b;
        }
        let r = Ball { mid: BigInt::zero(), rad: x.rad.clone(), exp: x.exp };
        let (m1, r1, _, r2, e) = b.align(&r);
        Ball { mid: m1, rad: r1 + r2, exp: e }
    };
    (widen(sb).round(prec), widen(cb).round(prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contains_f64(b: &Ball, v: f64) -> bool {
        // coarse check through f64, used only on well-separated values
        let scale = 2f64.powi(b.exp as i32);
        let mid = b.mid.to_string().parse::<f64>().unwrap() * scale;
        let rad = b.rad.to_string().parse::<f64>().unwrap() * scale;
        (mid - v).abs() <= rad + 1e-15
    }

    #[test]
    fn ratio_enclosure() {
        let b = Ball::from_ratio(&BigInt::from(1), &BigInt::from(3), 64);
        assert!(contains_f64(&b, 1.0 / 3.0));
        let b = Ball::from_ratio(&BigInt::from(-7), &BigInt::from(2), 64);
        assert!(b.is_exact());
        assert_eq!(b.floor(), Some(BigInt::from(-4)));
    }

    #[test]
    fn sqrt_enclosure() {
        let b = Ball::sqrt_int(2, 128);
        assert!(contains_f64(&b, 2f64.sqrt()));
        assert_eq!(b.floor(), Some(BigInt::one()));
        assert!(Ball::sqrt_int(16, 64).is_exact());
    }

    #[test]
    fn sin_cos_of_one() {
        let x = Ball::exact_int(BigInt::one());
        let (s, c) = sin_cos(&x, 128);
        assert!(contains_f64(&s, 1f64.sin()));
        assert!(contains_f64(&c, 1f64.cos()));
        // known digits of sin(1) and cos(1)
        assert!(s.to_decimal(30).starts_with("0.841470984807896506652502321630"));
        assert!(c.to_decimal(30).starts_with("0.540302305868139717400936607442"));
    }

    #[test]
    fn sin_cos_large_argument() {
        let x = Ball::exact_int(BigInt::from(100));
        let (s, c) = sin_cos(&x, 128);
        assert!(contains_f64(&s, 100f64.sin()));
        assert!(contains_f64(&c, 100f64.cos()));
        assert!(s.accurate_digits() >= 30);
    }

    #[test]
    fn floor_straddle_is_undecided() {
        let b = Ball { mid: BigInt::from(8), rad: BigUint::one(), exp: -3 };
        assert_eq!(b.floor(), None);
        let b = Ball { mid: BigInt::from(12), rad: BigUint::one(), exp: -3 };
        assert_eq!(b.floor(), Some(BigInt::one()));
    }

    #[test]
    fn decimal_rendering() {
        let b = Ball::from_ratio(&BigInt::from(-1), &BigInt::from(4), 64);
        assert_eq!(b.to_decimal(3), "-0.250");
        let b = Ball::exact_int(BigInt::from(12));
        assert_eq!(b.to_decimal(2), "12.00");
    }
}
