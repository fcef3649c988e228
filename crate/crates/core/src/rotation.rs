//! The exact rotation `A_φ` on lattice points and the three quantizers.

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::angle::AngleContext;
use crate::exactnum::{ExactError, Scalar};
use crate::kernel::LinearForm;

/// A point of `ℤ²`; serializes as `[x, y]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        LatticePoint { x, y }
    }

    pub fn norm_inf(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }

    /// Key for the report ordering, lexicographic by `(y, x)`.
    pub fn row_major(self) -> (i64, i64) {
        (self.y, self.x)
    }
}

impl From<[i64; 2]> for LatticePoint {
    fn from([x, y]: [i64; 2]) -> Self {
        LatticePoint { x, y }
    }
}

impl From<LatticePoint> for [i64; 2] {
    fn from(p: LatticePoint) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealPoint {
    pub x: Scalar,
    pub y: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundingMode {
    /// `⌊x⌋`
    Floor,
    /// `⌊x + 1/2⌋`, ties up
    Round,
    /// toward zero
    Trunc,
}

impl RoundingMode {
    pub const ALL: [RoundingMode; 3] = [RoundingMode::Floor, RoundingMode::Round, RoundingMode::Trunc];

    pub fn name(self) -> &'static str {
        match self {
            RoundingMode::Floor => "floor",
            RoundingMode::Round => "round",
            RoundingMode::Trunc => "trunc",
        }
    }
}

impl fmt::Display for RoundingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RoundingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "floor" => Ok(RoundingMode::Floor),
            "round" => Ok(RoundingMode::Round),
            "trunc" => Ok(RoundingMode::Trunc),
            _ => Err(format!("unknown rounding mode `{s}` (floor, round, trunc)")),
        }
    }
}

/// `A_φ·p`, exact for exact angles whose sine and cosine share a field.
pub fn rotate(ctx: &AngleContext, p: LatticePoint) -> RealPoint {
    let lin = |a: i64, b: i64| ctx.cos.mul_int(a).sub_any(&ctx.sin.mul_int(b));
    RealPoint { x: lin(p.x, p.y), y: lin(p.y, -p.x) }
}

pub fn quantize(rp: &RealPoint, mode: RoundingMode) -> Result<LatticePoint, ExactError> {
    Ok(LatticePoint { x: quantize_scalar(&rp.x, mode)?, y: quantize_scalar(&rp.y, mode)? })
}

pub(crate) fn quantize_scalar(s: &Scalar, mode: RoundingMode) -> Result<i64, ExactError> {
    let v = match mode {
        RoundingMode::Floor => s.floor_exact()?,
        RoundingMode::Round => s.add(&Scalar::ratio(1, 2)?)?.floor_exact()?,
        RoundingMode::Trunc => s.trunc_exact()?,
    };
    v.to_i64().ok_or_else(|| ExactError::Parse(format!("coordinate {v} exceeds 64 bits")))
}

/// `quantize(rotate(ctx, p), mode)`; for [`RoundingMode::Floor`] this is `r_φ`.
pub fn discrete_rotate(
    ctx: &AngleContext,
    p: LatticePoint,
    mode: RoundingMode,
) -> Result<LatticePoint, ExactError> {
    quantize(&rotate(ctx, p), mode)
}

/// Images of `cell + ε` for `ε` in the order `(0,0), (1,0), (0,1), (1,1)`.
pub fn cell_corners(ctx: &AngleContext, cell: LatticePoint) -> [RealPoint; 4] {
    CORNER_OFFSETS.map(|(ea, eb)| rotate(ctx, LatticePoint::new(cell.x + ea, cell.y + eb)))
}

pub const CORNER_OFFSETS: [(i64, i64); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

/// A discretized rotation prepared for repeated evaluation. Same results as
/// [`discrete_rotate`], computed on the fast integer path where possible.
#[derive(Clone, Debug)]
pub struct DiscreteRotation {
    form: LinearForm,
    mode: RoundingMode,
}

impl DiscreteRotation {
    pub fn new(ctx: &AngleContext, mode: RoundingMode) -> Self {
        DiscreteRotation { form: LinearForm::new(ctx), mode }
    }

    pub fn mode(&self) -> RoundingMode {
        self.mode
    }

    pub fn apply(&self, p: LatticePoint) -> Result<LatticePoint, ExactError> {
        if p == LatticePoint::ORIGIN {
            return Ok(p);
        }
        Ok(LatticePoint {
            x: self.form.quantize(p.x, p.y, self.mode)?,
            y: self.form.quantize(p.y, -p.x, self.mode)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::resolve;

    fn ctx(text: &str) -> AngleContext {
        resolve(text.parse().unwrap()).unwrap()
    }

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn rotate_examples() {
        let rp = rotate(&ctx("pi/2"), LatticePoint::new(5, 3));
        assert_eq!((rp.x, rp.y), (Scalar::int(-3), Scalar::int(5)));
        let rp = rotate(&ctx("pyth:3,4,5"), LatticePoint::new(5, 0));
        assert_eq!((rp.x, rp.y), (Scalar::int(4), Scalar::int(3)));
        let rp = rotate(&ctx("pi/4"), LatticePoint::new(9, 0));
        assert_eq!((rp.x, rp.y), (s("9*sqrt(2)/2"), s("9*sqrt(2)/2")));
    }

    #[test]
    fn quantize_examples() {
        let rp = RealPoint { x: s("3/2"), y: s("-1/2") };
        assert_eq!(quantize(&rp, RoundingMode::Floor).unwrap(), LatticePoint::new(1, -1));
        assert_eq!(quantize(&rp, RoundingMode::Trunc).unwrap(), LatticePoint::new(1, 0));
        assert_eq!(quantize(&rp, RoundingMode::Round).unwrap(), LatticePoint::new(2, 0));
        // integers are fixed by every quantizer
        let rp = RealPoint { x: Scalar::int(-4), y: Scalar::int(7) };
        for mode in RoundingMode::ALL {
            assert_eq!(quantize(&rp, mode).unwrap(), LatticePoint::new(-4, 7));
        }
    }

    #[test]
    fn discrete_rotate_examples() {
        let quarter = ctx("pi/2");
        for (a, b) in [(3, -7), (0, 5), (-2, -2)] {
            let p = discrete_rotate(&quarter, LatticePoint::new(a, b), RoundingMode::Floor).unwrap();
            assert_eq!(p, LatticePoint::new(-b, a));
        }
        let eighth = ctx("pi/4");
        assert_eq!(
            discrete_rotate(&eighth, LatticePoint::new(9, 0), RoundingMode::Floor).unwrap(),
            LatticePoint::new(6, 6)
        );
        for mode in RoundingMode::ALL {
            assert_eq!(discrete_rotate(&eighth, LatticePoint::ORIGIN, mode).unwrap(), LatticePoint::ORIGIN);
        }
    }

    #[test]
    fn corner_examples() {
        let c = cell_corners(&ctx("pi/2"), LatticePoint::ORIGIN);
        let ints: Vec<(Scalar, Scalar)> = c.iter().map(|p| (p.x.clone(), p.y.clone())).collect();
        let want = [(0, 0), (0, 1), (-1, 0), (-1, 1)].map(|(x, y)| (Scalar::int(x), Scalar::int(y)));
        assert_eq!(ints, want.to_vec());

        let c = cell_corners(&ctx("pi/4"), LatticePoint::ORIGIN);
        let h = s("sqrt(2)/2");
        assert_eq!((c[1].x.clone(), c[1].y.clone()), (h.clone(), h.clone()));
        assert_eq!((c[2].x.clone(), c[2].y.clone()), (h.neg(), h.clone()));
        assert_eq!((c[3].x.clone(), c[3].y.clone()), (Scalar::zero(), s("sqrt(2)")));
    }

    #[test]
    fn corner_distances() {
        for angle in ["pi/4", "pi/6", "pyth:5,12,13", "pi*5/6"] {
            let c = cell_corners(&ctx(angle), LatticePoint::new(3, -2));
            for i in 0..4 {
                for j in i + 1..4 {
                    let dx = c[i].x.sub(&c[j].x).unwrap();
                    let dy = c[i].y.sub(&c[j].y).unwrap();
                    let d2 = dx.mul(&dx).unwrap().add(&dy.mul(&dy).unwrap()).unwrap();
                    assert!(d2 == Scalar::one() || d2 == Scalar::int(2), "{angle}: {d2}");
                }
            }
        }
    }

    #[test]
    fn prepared_rotation_matches_reference() {
        for angle in ["pi/4", "pi/3", "pyth:3,4,5", "pyth:-5,-12,13", "rad:~1.0"] {
            let c = ctx(angle);
            for mode in RoundingMode::ALL {
                let r = DiscreteRotation::new(&c, mode);
                for a in -6..=6 {
                    for b in -6..=6 {
                        let p = LatticePoint::new(a, b);
                        assert_eq!(r.apply(p).unwrap(), discrete_rotate(&c, p, mode).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn point_serialization() {
        let p = LatticePoint::new(-3, 4);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[-3,4]");
        assert_eq!(serde_json::from_str::<LatticePoint>("[-3,4]").unwrap(), p);
        assert_eq!(serde_json::to_string(&RoundingMode::Trunc).unwrap(), "\"trunc\"");
    }
}
