use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Quadratic irrational `(p + q·√d) / den`.
///
/// Always held in canonical form: `d` squarefree and at least 2, `q ≠ 0`,
/// `den > 0` and `gcd(p, q, den) = 1`. Values whose irrational part vanishes
/// are never represented here; they collapse to rationals during
/// construction (see [`super::Scalar::quad`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadIrr {
    pub(super) p: BigInt,
    pub(super) q: BigInt,
    pub(super) d: u64,
    pub(super) den: BigInt,
}

impl QuadIrr {
    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    /// `⌊(p + q√d) / den⌋`, decided with integer square roots only.
    pub fn floor(&self) -> BigInt {
        let t = floor_q_sqrt(&self.q, self.d);
        // q√d is never an integer, so ⌊(p + q√d)/den⌋ = ⌊(p + ⌊q√d⌋)/den⌋.
        (&self.p + t).div_floor(&self.den)
    }

    pub fn signum(&self) -> Ordering {
        sign_p_q_sqrt(&self.p, &self.q, self.d)
    }
}

/// `⌊q·√d⌋` for non-square `d`.
pub(super) fn floor_q_sqrt(q: &BigInt, d: u64) -> BigInt {
    let sq = q * q * BigInt::from(d);
    let r = sq.sqrt();
    if q.is_negative() {
        -r - 1
    } else {
        r
    }
}

/// Sign of `p + q·√d` for non-square `d`.
pub(super) fn sign_p_q_sqrt(p: &BigInt, q: &BigInt, d: u64) -> Ordering {
    let sp = p.sign();
    let sq = q.sign();
    use num_bigint::Sign::*;
    match (sp, sq) {
        (NoSign, NoSign) => Ordering::Equal,
        (_, NoSign) => sign_to_ord(sp),
        (NoSign, _) => sign_to_ord(sq),
        (a, b) if a == b => sign_to_ord(a),
        _ => {
            let pp = p * p;
            let qq = q * q * BigInt::from(d);
            match pp.cmp(&qq) {
                Ordering::Greater => sign_to_ord(sp),
                Ordering::Less => sign_to_ord(sq),
                // p² = q²d is impossible for non-square d and q ≠ 0
                Ordering::Equal => unreachable!("non-square discriminant"),
            }
        }
    }
}

fn sign_to_ord(s: num_bigint::Sign) -> Ordering {
    match s {
        num_bigint::Sign::Minus => Ordering::Less,
        num_bigint::Sign::NoSign => Ordering::Equal,
        num_bigint::Sign::Plus => Ordering::Greater,
    }
}

/// Splits `d` into `(k, s)` with `d = k²·s` and `s` squarefree.
pub(super) fn squarefree_split(mut d: u64) -> (u64, u64) {
    let mut k = 1u64;
    let mut f = 2u64;
    while f.saturating_mul(f) <= d {
        let ff = f * f;
        while d.is_multiple_of(ff) {
            d /= ff;
            k *= f;
        }
        f += 1;
    }
    (k, d)
}

pub(super) fn gcd3(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    let g = a.gcd(b).gcd(c);
    if g.is_zero() {
        BigInt::one()
    } else {
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_split(8), (2, 2));
        assert_eq!(squarefree_split(12), (2, 3));
        assert_eq!(squarefree_split(5), (1, 5));
        assert_eq!(squarefree_split(72), (6, 2));
        assert_eq!(squarefree_split(49), (7, 1));
    }

    #[test]
    fn floor_of_multiples_of_sqrt2() {
        // brute-force oracle: largest n with n² ≤ 2q² (q > 0)
        for q in -40i64..=40 {
            if q == 0 {
                continue;
            }
            let x = q as f64 * 2f64.sqrt();
            let expect = x.floor() as i64;
            assert_eq!(floor_q_sqrt(&BigInt::from(q), 2), BigInt::from(expect), "q={q}");
        }
    }

    #[test]
    fn sign_with_cancellation() {
        let s = |p: i64, q: i64, d| sign_p_q_sqrt(&p.into(), &q.into(), d);
        assert_eq!(s(-1, 1, 2), Ordering::Greater);
        assert_eq!(s(-2, 1, 2), Ordering::Less);
        assert_eq!(s(3, -2, 2), Ordering::Greater);
        assert_eq!(s(0, 0, 2), Ordering::Equal);
    }
}
