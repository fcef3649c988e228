//! Fast evaluation of the linear form `x = a·cos φ − b·sin φ` at integer
//! points. Both rotated coordinates are of this form, since
//! `a·sin φ + b·cos φ = L(b, −a)`.
//!
//! Exact angles run on i128 integers in `ℚ(√d)`; numeric angles run on i128
//! fixed point with an explicit error radius. Anything the fast path cannot
//! decide (overflow, or a fixed-point ball straddling the decision point) is
//! recomputed with [`Scalar`] arithmetic, so every answer is exact.

use std::cmp::Ordering;

use num_integer::{Integer, Roots};
use num_traits::{ToPrimitive, Zero};

use crate::angle::AngleContext;
use crate::exactnum::{ExactError, Scalar};
use crate::rotation::RoundingMode;

/// Fractional bits of the fixed-point path.
const FRAC_BITS: u32 = 96;
/// Largest coordinate magnitude the fixed-point path accepts.
const FIXED_COORD_LIMIT: i64 = 1 << 28;

#[derive(Clone, Debug)]
enum Fast {
    /// `cos = (cp + cq√d)/den`, `sin = (sp + sq√d)/den`; `d = 0` when rational.
    Field { cp: i128, cq: i128, sp: i128, sq: i128, d: i128, den: i128 },
    /// `cos ∈ c ± rc`, `sin ∈ s ± rs`, in units of `2^-FRAC_BITS`.
    Fixed { c: i128, rc: i128, s: i128, rs: i128 },
    None,
}

#[derive(Clone, Debug)]
pub(crate) struct LinearForm {
    fast: Fast,
    cos: Scalar,
    sin: Scalar,
}

impl LinearForm {
    pub fn new(ctx: &AngleContext) -> Self {
        let fast = field_parts(&ctx.cos, &ctx.sin)
            .or_else(|| fixed_parts(&ctx.cos, &ctx.sin))
            .unwrap_or(Fast::None);
        LinearForm { fast, cos: ctx.cos.clone(), sin: ctx.sin.clone() }
    }

    /// Forces the exact [`Scalar`] path; used to cross-check the fast path.
    #[cfg(test)]
    pub fn slow(ctx: &AngleContext) -> Self {
        LinearForm { fast: Fast::None, cos: ctx.cos.clone(), sin: ctx.sin.clone() }
    }

    /// `⌊a cos − b sin⌋`
    pub fn floor(&self, a: i64, b: i64) -> Result<i64, ExactError> {
        self.quantize(a, b, RoundingMode::Floor)
    }

    pub fn quantize(&self, a: i64, b: i64, mode: RoundingMode) -> Result<i64, ExactError> {
        let fast = match mode {
            RoundingMode::Floor => self.fast_floor(a, b, false),
            RoundingMode::Round => self.fast_floor(a, b, true),
            RoundingMode::Trunc => self.fast_floor(a, b, false).and_then(|f| {
                // truncation rounds negative non-integers up
                match self.fast_cmp_int(a, b, f)? {
                    Ordering::Greater if f < 0 => Some(f + 1),
                    _ => Some(f),
                }
            }),
        };
        match fast {
            Some(v) => Ok(v),
            None => self.slow_quantize(a, b, mode),
        }
    }

    /// Sign of `a cos − b sin − n`.
    pub fn cmp_int(&self, a: i64, b: i64, n: i64) -> Result<Ordering, ExactError> {
        match self.fast_cmp_int(a, b, n) {
            Some(o) => Ok(o),
            None => self.value(a, b).sub(&Scalar::int(n))?.signum(),
        }
    }

    /// `a cos − b sin` as a [`Scalar`].
    pub fn value(&self, a: i64, b: i64) -> Scalar {
        self.cos.mul_int(a).sub_any(&self.sin.mul_int(b))
    }

    fn slow_quantize(&self, a: i64, b: i64, mode: RoundingMode) -> Result<i64, ExactError> {
        crate::rotation::quantize_scalar(&self.value(a, b), mode)
    }

    fn fast_floor(&self, a: i64, b: i64, half: bool) -> Option<i64> {
        match self.fast {
            Fast::Field { cp, cq, sp, sq, d, den } => {
                let (a, b) = (a as i128, b as i128);
                let p = a.checked_mul(cp)?.checked_sub(b.checked_mul(sp)?)?;
                let q = a.checked_mul(cq)?.checked_sub(b.checked_mul(sq)?)?;
                let v = if half {
                    // ⌊x + 1/2⌋ = ⌊(2p + den + 2q√d)/(2den)⌋
                    let num = p.checked_mul(2)?.checked_add(den)?.checked_add(floor_q_sqrt(q.checked_mul(2)?, d)?)?;
                    Integer::div_floor(&num, &den.checked_mul(2)?)
                } else {
                    Integer::div_floor(&p.checked_add(floor_q_sqrt(q, d)?)?, &den)
                };
                v.to_i64()
            }
            Fast::Fixed { .. } => {
                let (x, err) = self.fixed_value(a, b)?;
                let x = if half { x.checked_add(1i128 << (FRAC_BITS - 1))? } else { x };
                let lo = x.checked_sub(err)? >> FRAC_BITS;
                let hi = x.checked_add(err)? >> FRAC_BITS;
                (lo == hi).then(|| lo.to_i64()).flatten()
            }
            Fast::None => None,
        }
    }

    fn fast_cmp_int(&self, a: i64, b: i64, n: i64) -> Option<Ordering> {
        match self.fast {
            Fast::Field { cp, cq, sp, sq, d, den } => {
                let (a, b) = (a as i128, b as i128);
                let p = a.checked_mul(cp)?.checked_sub(b.checked_mul(sp)?)?;
                let q = a.checked_mul(cq)?.checked_sub(b.checked_mul(sq)?)?;
                let p = p.checked_sub((n as i128).checked_mul(den)?)?;
                sign_p_q_sqrt(p, q, d)
            }
            Fast::Fixed { .. } => {
                let (x, err) = self.fixed_value(a, b)?;
                let t = (n as i128).checked_mul(1i128 << FRAC_BITS)?;
                if err == 0 {
                    // only the origin evaluates without error
                    Some(x.cmp(&t))
                } else if x.checked_sub(err)? > t {
                    Some(Ordering::Greater)
                } else if x.checked_add(err)? < t {
                    Some(Ordering::Less)
                } else {
                    None
                }
            }
            Fast::None => None,
        }
    }

    /// Fixed-point midpoint and error bound of `a cos − b sin`.
    fn fixed_value(&self, a: i64, b: i64) -> Option<(i128, i128)> {
        let Fast::Fixed { c, rc, s, rs } = self.fast else { return None };
        if a.abs() >= FIXED_COORD_LIMIT || b.abs() >= FIXED_COORD_LIMIT {
            return None;
        }
        let (a, b) = (a as i128, b as i128);
        let x = a.checked_mul(c)?.checked_sub(b.checked_mul(s)?)?;
        let err = a.abs().checked_mul(rc)?.checked_add(b.abs().checked_mul(rs)?)?;
        Some((x, err))
    }
}

/// `⌊q√d⌋`; `√d` is irrational whenever `d ≥ 2` is squarefree.
fn floor_q_sqrt(q: i128, d: i128) -> Option<i128> {
    if q == 0 || d == 0 {
        return Some(0);
    }
    let sq = q.checked_mul(q)?.checked_mul(d)?;
    let r = (sq as u128).sqrt() as i128;
    Some(if q > 0 { r } else { -r - 1 })
}

/// Sign of `p + q√d`.
fn sign_p_q_sqrt(p: i128, q: i128, d: i128) -> Option<Ordering> {
    if q == 0 || d == 0 {
        return Some(p.cmp(&0));
    }
    if p >= 0 && q > 0 {
        return Some(Ordering::Greater);
    }
    if p <= 0 && q < 0 {
        return Some(Ordering::Less);
    }
    let p2 = p.checked_mul(p)?;
    let q2d = q.checked_mul(q)?.checked_mul(d)?;
    // p and q have opposite signs, and p² ≠ q²d since √d is irrational
    Some(if p > 0 { p2.cmp(&q2d) } else { q2d.cmp(&p2) })
}

fn field_parts(cos: &Scalar, sin: &Scalar) -> Option<Fast> {
    let parts = |s: &Scalar| -> Option<(i128, i128, u64, i128)> {
        match s {
            Scalar::Rational(r) => Some((r.numer().to_i128()?, 0, 0, r.denom().to_i128()?)),
            Scalar::Quad(q) => Some((q.p().to_i128()?, q.q().to_i128()?, q.d(), q.den().to_i128()?)),
            Scalar::HighPrec(_) => None,
        }
    };
    let (cp, cq, cd, cden) = parts(cos)?;
    let (sp, sq, sd, sden) = parts(sin)?;
    let d = match (cd, sd) {
        (0, x) | (x, 0) => x,
        (x, y) if x == y => x,
        _ => return None,
    };
    let den = cden.lcm(&sden);
    let (fc, fs) = (den / cden, den / sden);
    Some(Fast::Field {
        cp: cp.checked_mul(fc)?,
        cq: cq.checked_mul(fc)?,
        sp: sp.checked_mul(fs)?,
        sq: sq.checked_mul(fs)?,
        d: d as i128,
        den,
    })
}

fn fixed_parts(cos: &Scalar, sin: &Scalar) -> Option<Fast> {
    // exact values from two different fields also land here
    let prec = [cos, sin]
        .iter()
        .filter_map(|s| s.as_high_prec().map(|h| h.precision_bits()))
        .max()
        .unwrap_or(0)
        .max(FRAC_BITS + 32);
    let conv = |s: &Scalar| -> Option<(i128, i128)> {
        let (mid, rad) = s.exact_ball(prec).to_fixed(FRAC_BITS);
        let rad = rad.to_i128()?.checked_add(1)?;
        if rad.is_zero() {
            return None;
        }
        Some((mid.to_i128()?, rad))
    };
    let (c, rc) = conv(cos)?;
    let (s, rs) = conv(sin)?;
    Some(Fast::Fixed { c, rc, s, rs })
}
