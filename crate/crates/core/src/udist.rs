//! Counting lattice points whose rotated fractional parts fall in a box
//! `[0,t1) × [0,t2)`, and the residue-class reduction for Pythagorean angles.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::angle::{AngleClass, AngleContext, Orientation};
use crate::exactnum::{ExactError, Scalar};
use crate::kernel::LinearForm;
use crate::par::{map_rows, Exec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UdistError {
    #[error("box side must satisfy 0 < t ≤ 1, got {0}")]
    InvalidBox(String),
    #[error("angle {0} is not a rational (Pythagorean) angle")]
    NotPythagorean(String),
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityBox {
    pub t1: Scalar,
    pub t2: Scalar,
}

impl InequalityBox {
    pub fn new(t1: Scalar, t2: Scalar) -> Result<Self, UdistError> {
        for t in [&t1, &t2] {
            let pos = t.signum()? == Ordering::Greater;
            if !pos || t.compare(&Scalar::one())? == Ordering::Greater {
                return Err(UdistError::InvalidBox(t.to_string()));
            }
        }
        Ok(InequalityBox { t1, t2 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    All,
    /// Both coordinates odd.
    OddOdd,
}

impl Parity {
    pub fn name(self) -> &'static str {
        match self {
            Parity::All => "all",
            Parity::OddOdd => "odd_odd",
        }
    }

    /// Number of pairs in `|x1|, |x2| ≤ M` with this parity.
    pub fn candidates(self, m: i64) -> u64 {
        let side = match self {
            Parity::All => 2 * m + 1,
            // odd integers in [−M, M]
            Parity::OddOdd => 2 * ((m + 1) / 2),
        } as u64;
        side * side
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Parity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "all" => Ok(Parity::All),
            "odd_odd" | "oddodd" | "odd" => Ok(Parity::OddOdd),
            _ => Err(format!("unknown parity `{s}` (all, odd-odd)")),
        }
    }
}

/// `{L} < t` for `L = a cos − b sin`.
fn frac_below(form: &LinearForm, a: i64, b: i64, t: &Threshold) -> Result<bool, ExactError> {
    match t {
        Threshold::Whole => Ok(true),
        // {L} < p/q  ⟺  q·L < q·⌊L⌋ + p
        Threshold::Ratio(p, q) => {
            let f = form.floor(a, b)?;
            let (qa, qb) = (a.checked_mul(*q), b.checked_mul(*q));
            match (qa, qb, f.checked_mul(*q).and_then(|v| v.checked_add(*p))) {
                (Some(qa), Some(qb), Some(n)) => Ok(form.cmp_int(qa, qb, n)? == Ordering::Less),
                _ => Ok(form.value(a, b).frac()?.compare(&Scalar::ratio(*p, *q)?)? == Ordering::Less),
            }
        }
        Threshold::General(t) => Ok(form.value(a, b).frac()?.compare(t)? == Ordering::Less),
    }
}

enum Threshold {
    Whole,
    Ratio(i64, i64),
    General(Scalar),
}

impl Threshold {
    fn new(t: &Scalar) -> Threshold {
        if *t == Scalar::one() {
            return Threshold::Whole;
        }
        match t.as_rational().and_then(|r| Some((r.numer().to_i64()?, r.denom().to_i64()?))) {
            Some((p, q)) => Threshold::Ratio(p, q),
            None => Threshold::General(t.clone()),
        }
    }
}

fn odd_or_all(parity: Parity, x: i64) -> bool {
    parity == Parity::All || x.rem_euclid(2) == 1
}

/// Pairs `|x1|, |x2| ≤ M` (both odd for [`Parity::OddOdd`]) with
/// `{L1} ∈ [0,t1)` and `{L2} ∈ [0,t2)`, where `L1 = x1 cos − x2 sin` and
/// `L2 = x1 sin + x2 cos`; scanned directly.
pub fn count_solutions(
    ctx: &AngleContext,
    bx: &InequalityBox,
    m: i64,
    parity: Parity,
    exec: Exec,
) -> Result<u64, UdistError> {
    if m < 0 {
        return Err(UdistError::InvalidInput(format!("M must be non-negative, got {m}")));
    }
    let form = LinearForm::new(ctx);
    let (t1, t2) = (Threshold::new(&bx.t1), Threshold::new(&bx.t2));
    let rows = map_rows(-m, m, exec, |x2| -> Result<u64, ExactError> {
        if !odd_or_all(parity, x2) {
            return Ok(0);
        }
        let mut n = 0;
        for x1 in -m..=m {
            // L2(x1, x2) = L(x2, −x1)
            if odd_or_all(parity, x1) && frac_below(&form, x1, x2, &t1)? && frac_below(&form, x2, -x1, &t2)? {
                n += 1;
            }
        }
        Ok(n)
    })?;
    Ok(rows.into_iter().sum())
}

/// `sin = p1/q`, `cos = p2/q` of a rational angle.
fn rational_parts(ctx: &AngleContext) -> Result<(i64, i64, i64), UdistError> {
    let not = || UdistError::NotPythagorean(ctx.label());
    match &ctx.class {
        AngleClass::RationalPythagorean { p1, p2, q } => {
            Ok((p1.to_i64().ok_or_else(not)?, p2.to_i64().ok_or_else(not)?, q.to_i64().ok_or_else(not)?))
        }
        _ => Err(not()),
    }
}

/// The same count as [`count_solutions`] for a rational angle, through the
/// residue `d1 = (x1 − h·x2) mod q`: `{L1} = {p2·d1/q}` and `{L2} = {p1·d1/q}`,
/// so it is enough to decide each class once and count its lattice points.
pub fn count_solutions_by_residue(
    ctx: &AngleContext,
    bx: &InequalityBox,
    m: i64,
    parity: Parity,
) -> Result<u64, UdistError> {
    if m < 0 {
        return Err(UdistError::InvalidInput(format!("M must be non-negative, got {m}")));
    }
    let (p1, p2, q) = rational_parts(ctx)?;
    let h = inverse_ratio(p1, p2, q).ok_or_else(|| UdistError::NotPythagorean(ctx.label()))?;
    let frac = |k: i64| Scalar::ratio(k.rem_euclid(q), q);
    let mut total = 0u64;
    for d1 in 0..q {
        let in1 = frac((p2 as i128 * d1 as i128).rem_euclid(q as i128) as i64)?.compare(&bx.t1)? == Ordering::Less;
        let in2 = frac((p1 as i128 * d1 as i128).rem_euclid(q as i128) as i64)?.compare(&bx.t2)? == Ordering::Less;
        if !(in1 && in2) {
            continue;
        }
        for x2 in -m..=m {
            if !odd_or_all(parity, x2) {
                continue;
            }
            // x1 ≡ d1 + h·x2 (mod q), and odd when required (q is odd, so mod 2q)
            let r = (d1 as i128 + h as i128 * x2 as i128).rem_euclid(q as i128) as i64;
            total += match parity {
                Parity::All => count_congruent(-m, m, r, q),
                Parity::OddOdd => {
                    let r2 = if r % 2 == 1 { r } else { r + q };
                    count_congruent(-m, m, r2, 2 * q)
                }
            };
        }
    }
    Ok(total)
}

/// Integers `x ∈ [lo, hi]` with `x ≡ r (mod k)`.
fn count_congruent(lo: i64, hi: i64, r: i64, k: i64) -> u64 {
    if hi < lo {
        return 0;
    }
    let upto = |x: i64| Integer::div_floor(&(x - r), &k);
    (upto(hi) - upto(lo - 1)) as u64
}

/// `num · den⁻¹ mod q`, if `den` is invertible.
fn inverse_ratio(num: i64, den: i64, q: i64) -> Option<i64> {
    let g = den.rem_euclid(q).extended_gcd(&q);
    if g.gcd != 1 {
        return None;
    }
    Some(((num as i128 * g.x as i128).rem_euclid(q as i128)) as i64)
}

/// A primitive Pythagorean triple with the residue multiplier `h`, defined
/// by `p2·h ≡ p1 (mod q)` where `sin = p1/q` and `cos = p2/q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PythTriple {
    pub u: i64,
    pub v: i64,
    pub p1: i64,
    pub p2: i64,
    pub q: i64,
    pub h: i64,
}

impl PythTriple {
    /// `SinOdd`: `p1 = u² − v²`, `p2 = 2uv`; `SinEven` swaps them.
    pub fn new(u: i64, v: i64, orientation: Orientation) -> Result<Self, UdistError> {
        if !(u > v && v >= 1) || u.gcd(&v) != 1 || (u - v) % 2 == 0 {
            return Err(UdistError::InvalidInput(format!(
                "(u, v) = ({u}, {v}) must satisfy u > v ≥ 1, gcd 1, opposite parity"
            )));
        }
        let (odd, even, q) = (u * u - v * v, 2 * u * v, u * u + v * v);
        let (p1, p2) = match orientation {
            Orientation::SinOdd => (odd, even),
            Orientation::SinEven => (even, odd),
        };
        let h = inverse_ratio(p1, p2, q).expect("legs of a primitive triple are prime to q");
        Ok(PythTriple { u, v, p1, p2, q, h })
    }

    pub fn orientation(&self) -> Orientation {
        if self.p1 % 2 != 0 {
            Orientation::SinOdd
        } else {
            Orientation::SinEven
        }
    }
}

/// All primitive triples with `q = u² + v² ≤ q_max`, odd sine leg
/// (`p1 = u² − v²`), sorted by `q` and then `u`.
pub fn gen_primitive_triples(q_max: i64) -> Vec<PythTriple> {
    let mut out = Vec::new();
    let mut u = 2;
    while u * u < q_max {
        for v in 1..u {
            if u * u + v * v > q_max {
                break;
            }
            if let Ok(t) = PythTriple::new(u, v, Orientation::SinOdd) {
                out.push(t);
            }
        }
        u += 1;
    }
    out.sort_by_key(|t| (t.q, t.u));
    out
}

/// `d1 = (a − h·b) mod q`.
pub fn residue_d1(a: i64, b: i64, t: &PythTriple) -> i64 {
    (a as i128 - t.h as i128 * b as i128).rem_euclid(t.q as i128) as i64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceFailure {
    pub a: i64,
    pub b: i64,
    pub d1: i64,
    /// `"sin"` for `a·p1 + b·p2 ≡ d1·p1`, `"cos"` for `a·p2 − b·p1 ≡ d1·p2`.
    pub which: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub triple: PythTriple,
    pub samples: usize,
    pub failures: Vec<CongruenceFailure>,
}

impl CongruenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks, for each `(a,b)`, `a·p1 + b·p2 ≡ d1·p1` and
/// `a·p2 − b·p1 ≡ d1·p2 (mod q)`; with `p1 = u² − v²` the first is
/// `a(u²−v²) + 2buv ≡ d1(u²−v²)`.
pub fn verify_case3_congruences(t: &PythTriple, samples: &[(i64, i64)]) -> CongruenceReport {
    let q = t.q as i128;
    let (p1, p2) = (t.p1 as i128, t.p2 as i128);
    let mut failures = Vec::new();
    for &(a, b) in samples {
        let d1 = residue_d1(a, b, t);
        let (ai, bi, di) = (a as i128, b as i128, d1 as i128);
        if (ai * p1 + bi * p2 - di * p1).rem_euclid(q) != 0 {
            failures.push(CongruenceFailure { a, b, d1, which: "sin" });
        }
        if (ai * p2 - bi * p1 - di * p2).rem_euclid(q) != 0 {
            failures.push(CongruenceFailure { a, b, d1, which: "cos" });
        }
    }
    CongruenceReport { triple: *t, samples: samples.len(), failures }
}

/// Exact integer checks on a triple: `p1² + p2² = q²`, `gcd(p1,q) = gcd(p2,q) = 1`
/// and `p2·h ≡ p1 (mod q)`.
pub fn triple_is_valid(t: &PythTriple) -> bool {
    let sq = |x: i64| x as i128 * x as i128;
    sq(t.p1) + sq(t.p2) == sq(t.q)
        && t.p1.gcd(&t.q).is_one()
        && t.p2.gcd(&t.q).is_one()
        && (1..t.q).contains(&t.h)
        && (t.p2 as i128 * t.h as i128 - t.p1 as i128).rem_euclid(t.q as i128) == 0
}
