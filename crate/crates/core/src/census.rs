//! Collision and hole censuses of a discretized rotation in the window
//! `|x|, |y| ≤ M`, by the neighbour/corner characterizations (Floor only) and
//! by a brute-force image map, plus log-log growth fits.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::angle::{AngleContext, Quadrant};
use crate::exactnum::{ExactError, Scalar};
use crate::kernel::LinearForm;
use crate::par::{map_rows, Exec};
use crate::rotation::{discrete_rotate, DiscreteRotation, LatticePoint, RoundingMode, CORNER_OFFSETS};

pub const DEFAULT_ORACLE_CAP: i64 = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("the characterization method only exists for floor, not {0}")]
    UnsupportedMode(RoundingMode),
    #[error("M = {m} exceeds the brute-force cap {cap}")]
    CapExceeded { m: i64, cap: i64 },
    #[error("census count is zero at M = {m}; no growth exponent")]
    DegenerateCounts { m: i64 },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusKind {
    /// Image points with at least two preimages (`T_φ(M)`).
    Collisions,
    /// Lattice points with no preimage (`N_φ(M)`).
    Holes,
}

impl CensusKind {
    pub fn name(self) -> &'static str {
        match self {
            CensusKind::Collisions => "collisions",
            CensusKind::Holes => "holes",
        }
    }
}

impl fmt::Display for CensusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CensusKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "collisions" | "t" => Ok(CensusKind::Collisions),
            "holes" | "n" => Ok(CensusKind::Holes),
            _ => Err(format!("unknown census kind `{s}` (collisions, holes)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Characterization,
    BruteForce,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Characterization => "characterization",
            Method::BruteForce => "brute_force",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MethodChoice {
    /// Characterization for Floor, brute force otherwise.
    #[default]
    Auto,
    Characterization,
    BruteForce,
}

impl FromStr for MethodChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "auto" => Ok(MethodChoice::Auto),
            "characterization" | "char" => Ok(MethodChoice::Characterization),
            "brute_force" | "bruteforce" | "oracle" => Ok(MethodChoice::BruteForce),
            _ => Err(format!("unknown method `{s}` (auto, characterization, brute-force)")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CensusOptions {
    pub method: MethodChoice,
    pub keep_points: bool,
    pub exec: Exec,
    pub oracle_cap: i64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions { method: MethodChoice::Auto, keep_points: false, exec: Exec::Parallel, oracle_cap: DEFAULT_ORACLE_CAP }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusReport {
    pub angle: AngleContext,
    pub mode: RoundingMode,
    pub m: i64,
    pub kind: CensusKind,
    pub count: u64,
    /// Sorted by `(y, x)`.
    pub points: Option<Vec<LatticePoint>>,
    pub method: Method,
    /// Colliding preimage pairs behind a collision count.
    pub pair_count: Option<u64>,
    pub elapsed_ms: f64,
}

impl Serialize for CensusReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CensusReport", 9)?;
        st.serialize_field("angle", &self.angle)?;
        st.serialize_field("mode", &self.mode)?;
        st.serialize_field("M", &self.m)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("count", &self.count)?;
        if let Some(p) = &self.points {
            st.serialize_field("points", p)?;
        }
        st.serialize_field("method", &self.method)?;
        if let Some(p) = &self.pair_count {
            st.serialize_field("pair_count", p)?;
        }
        st.serialize_field("elapsed_ms", &self.elapsed_ms)?;
        st.end()
    }
}

/// Domain radius for the characterization scans.
pub fn characterization_radius(m: i64) -> i64 {
    ceil_sqrt2_times(m) + 2
}

/// Domain radius for the brute-force oracle: every preimage of the target
/// window lies inside, since rotation preserves norms and quantizing moves a
/// point by less than √2.
pub fn oracle_radius(m: i64) -> i64 {
    ceil_sqrt2_times(m + 2) + 2
}

/// `⌈√2·m⌉` for `m ≥ 0`.
fn ceil_sqrt2_times(m: i64) -> i64 {
    let sq = 2 * (m as i128) * (m as i128);
    let r = num_integer::Roots::sqrt(&sq);
    (if r * r == sq { r } else { r + 1 }) as i64
}

fn in_window(p: LatticePoint, m: i64) -> bool {
    p.x.abs() <= m && p.y.abs() <= m
}

fn resolve_method(choice: MethodChoice, mode: RoundingMode) -> Result<Method, CensusError> {
    match (choice, mode) {
        (MethodChoice::BruteForce, _) => Ok(Method::BruteForce),
        (MethodChoice::Auto, RoundingMode::Floor) | (MethodChoice::Characterization, RoundingMode::Floor) => {
            Ok(Method::Characterization)
        }
        (MethodChoice::Auto, _) => Ok(Method::BruteForce),
        (MethodChoice::Characterization, m) => Err(CensusError::UnsupportedMode(m)),
    }
}

fn check_m(m: i64) -> Result<(), CensusError> {
    if m < 0 {
        return Err(CensusError::InvalidInput(format!("M must be non-negative, got {m}")));
    }
    Ok(())
}

pub fn collision_census(
    ctx: &AngleContext,
    m: i64,
    mode: RoundingMode,
    opts: &CensusOptions,
) -> Result<CensusReport, CensusError> {
    census(ctx, m, mode, CensusKind::Collisions, opts)
}

pub fn hole_census(
    ctx: &AngleContext,
    m: i64,
    mode: RoundingMode,
    opts: &CensusOptions,
) -> Result<CensusReport, CensusError> {
    census(ctx, m, mode, CensusKind::Holes, opts)
}

pub fn brute_force_census(
    ctx: &AngleContext,
    m: i64,
    mode: RoundingMode,
    kind: CensusKind,
    opts: &CensusOptions,
) -> Result<CensusReport, CensusError> {
    let opts = CensusOptions { method: MethodChoice::BruteForce, ..*opts };
    census(ctx, m, mode, kind, &opts)
}

/// Either census, dispatching on the requested method.
pub fn census(
    ctx: &AngleContext,
    m: i64,
    mode: RoundingMode,
    kind: CensusKind,
    opts: &CensusOptions,
) -> Result<CensusReport, CensusError> {
    check_m(m)?;
    let method = resolve_method(opts.method, mode)?;
    let start = Instant::now();
    let (points, pair_count) = match (method, kind) {
        (Method::Characterization, CensusKind::Collisions) => {
            let pairs = characterize_collisions(ctx, m, opts.exec)?;
            let n = pairs.len() as u64;
            (sorted_unique(pairs.into_iter().map(|p| p.image).collect()), Some(n))
        }
        (Method::Characterization, CensusKind::Holes) => (characterize_holes(ctx, m, opts.exec)?, None),
        (Method::BruteForce, _) => {
            let scan = oracle_scan(ctx, m, mode, opts.exec, opts.oracle_cap)?;
            match kind {
                CensusKind::Collisions => (scan.collisions, Some(scan.pairs.len() as u64)),
                CensusKind::Holes => (scan.holes, None),
            }
        }
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(CensusReport {
        angle: ctx.clone(),
        mode,
        m,
        kind,
        count: points.len() as u64,
        points: opts.keep_points.then_some(points),
        method,
        pair_count: if kind == CensusKind::Collisions { pair_count } else { None },
        elapsed_ms,
    })
}

fn sorted_unique(mut pts: Vec<LatticePoint>) -> Vec<LatticePoint> {
    pts.sort_by_key(|p| p.row_major());
    pts.dedup();
    pts
}

/// Two neighbouring lattice points with a common image.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CollisionPair {
    pub image: LatticePoint,
    pub first: LatticePoint,
    pub second: LatticePoint,
}

/// Whether `{L(a,b)}` stays in the same unit interval after adding
/// `δ = L(dir)`: for `δ ≥ 0` this is `{L} < 1 − δ`, for `δ < 0` it is
/// `{L} ≥ −δ`. Written with `L(a,b) + δ = L((a,b) + dir)` so only integer
/// comparisons are needed. The four quadrant systems for neighbour
/// collisions are instances of this test.
fn same_cell(
    form: &LinearForm,
    (a, b): (i64, i64),
    f: i64,
    dir: (i64, i64),
    delta: Ordering,
) -> Result<bool, ExactError> {
    let shifted = (a + dir.0, b + dir.1);
    Ok(if delta != Ordering::Less {
        form.cmp_int(shifted.0, shifted.1, f + 1)? == Ordering::Less
    } else {
        form.cmp_int(shifted.0, shifted.1, f)? != Ordering::Less
    })
}

/// Colliding neighbour pairs `(a,b)`, `(a,b) + dir` for `dir ∈ {(1,0), (0,1)}`
/// over the characterization window, keeping those whose image is within `M`.
pub fn characterize_collisions(ctx: &AngleContext, m: i64, exec: Exec) -> Result<Vec<CollisionPair>, CensusError> {
    let form = LinearForm::new(ctx);
    let (c, s) = (ctx.cos.signum()?, ctx.sin.signum()?);
    // δ = A·dir: (c, s) for (1,0) and (−s, c) for (0,1)
    let dirs = [((1, 0), [c, s]), ((0, 1), [s.reverse(), c])];
    let r = characterization_radius(m);
    let rows = map_rows(-r, r, exec, |b| -> Result<Vec<CollisionPair>, ExactError> {
        let mut hits = Vec::new();
        for a in -r..=r {
            let fx = form.floor(a, b)?;
            if fx.abs() > m {
                continue;
            }
            let fy = form.floor(b, -a)?;
            if fy.abs() > m {
                continue;
            }
            for (dir, [dx, dy]) in dirs {
                // second coordinate: L2(a,b) = L(b, −a), L2(dir) = L(dir.1, −dir.0)
                if same_cell(&form, (a, b), fx, dir, dx)?
                    && same_cell(&form, (b, -a), fy, (dir.1, -dir.0), dy)?
                {
                    hits.push(CollisionPair {
                        image: LatticePoint::new(fx, fy),
                        first: LatticePoint::new(a, b),
                        second: LatticePoint::new(a + dir.0, b + dir.1),
                    });
                }
            }
        }
        Ok(hits)
    })?;
    Ok(rows.into_iter().flatten().collect())
}

/// The lattice cell `(a,b)` containing `A_{−φ}(n + 1/2, m + 1/2)`, the centre
/// of the square `A_{−φ}(T_(n,m))`. Every point of that square is within
/// `√2/2` of its centre, so every preimage of `(n,m)` is a corner of this cell.
fn preimage_cell(form: &LinearForm, n: i64, m: i64) -> Result<(i64, i64), ExactError> {
    // A_{−φ}(x,y) = (x cos + y sin, −x sin + y cos) = (L(x, −y), L(y, x)), at
    // doubled coordinates; ⌊v/2⌋ = ⌊⌊v⌋/2⌋
    let (x2, y2) = (2 * n + 1, 2 * m + 1);
    Ok((form.floor(x2, -y2)?.div_euclid(2), form.floor(y2, x2)?.div_euclid(2)))
}

/// Holes in `|n|, |m| ≤ M`, in `(m, n)` order: `(n,m)` is a hole exactly when
/// no corner of its preimage cell is mapped onto it.
pub fn characterize_holes(ctx: &AngleContext, m: i64, exec: Exec) -> Result<Vec<LatticePoint>, CensusError> {
    let form = LinearForm::new(ctx);
    let rows = map_rows(-m, m, exec, |y| -> Result<Vec<LatticePoint>, ExactError> {
        let mut holes = Vec::new();
        for x in -m..=m {
            let (a, b) = preimage_cell(&form, x, y)?;
            let mut hit = false;
            for (ea, eb) in CORNER_OFFSETS {
                let (pa, pb) = (a + ea, b + eb);
                if form.floor(pa, pb)? == x && form.floor(pb, -pa)? == y {
                    hit = true;
                    break;
                }
            }
            if !hit {
                holes.push(LatticePoint::new(x, y));
            }
        }
        Ok(holes)
    })?;
    Ok(rows.into_iter().flatten().collect())
}

/// Result of the brute-force image map over the oracle window.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleScan {
    pub m: i64,
    pub mode: RoundingMode,
    /// Sorted by `(y, x)`.
    pub collisions: Vec<LatticePoint>,
    /// Sorted by `(y, x)`.
    pub holes: Vec<LatticePoint>,
    /// One entry per extra preimage, paired with the first preimage found.
    pub pairs: Vec<CollisionPair>,
    pub max_preimages: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Evaluator {
    /// Prepared integer kernel.
    Kernel,
    /// `Scalar` arithmetic throughout; slow, used to cross-check the kernel.
    #[cfg_attr(not(test), allow(dead_code))]
    Reference,
}

pub fn oracle_scan(
    ctx: &AngleContext,
    m: i64,
    mode: RoundingMode,
    exec: Exec,
    cap: i64,
) -> Result<OracleScan, CensusError> {
    oracle_scan_with(ctx, m, mode, exec, cap, Evaluator::Kernel)
}

pub(crate) fn oracle_scan_with(
    ctx: &AngleContext,
    m: i64,
    mode: RoundingMode,
    exec: Exec,
    cap: i64,
    eval: Evaluator,
) -> Result<OracleScan, CensusError> {
    check_m(m)?;
    if m > cap {
        return Err(CensusError::CapExceeded { m, cap });
    }
    let rot = DiscreteRotation::new(ctx, mode);
    let r = oracle_radius(m);
    let side = (2 * m + 1) as usize;
    let index = |p: LatticePoint| (p.y + m) as usize * side + (p.x + m) as usize;

    let rows = map_rows(-r, r, exec, |b| -> Result<Vec<(LatticePoint, LatticePoint)>, ExactError> {
        let mut hits = Vec::new();
        for a in -r..=r {
            let p = LatticePoint::new(a, b);
            let img = match eval {
                Evaluator::Kernel => rot.apply(p)?,
                Evaluator::Reference => discrete_rotate(ctx, p, mode)?,
            };
            if in_window(img, m) {
                hits.push((img, p));
            }
        }
        Ok(hits)
    })?;

    let mut first: Vec<Option<LatticePoint>> = vec![None; side * side];
    let mut counts = vec![0u32; side * side];
    let mut pairs = Vec::new();
    for (img, pre) in rows.into_iter().flatten() {
        let i = index(img);
        counts[i] += 1;
        match first[i] {
            None => first[i] = Some(pre),
            Some(f) => pairs.push(CollisionPair { image: img, first: f, second: pre }),
        }
    }
    let mut collisions = Vec::new();
    let mut holes = Vec::new();
    for y in -m..=m {
        for x in -m..=m {
            let p = LatticePoint::new(x, y);
            match counts[index(p)] {
                0 => holes.push(p),
                1 => {}
                _ => collisions.push(p),
            }
        }
    }
    let max_preimages = counts.iter().copied().max().unwrap_or(0);
    Ok(OracleScan { m, mode, collisions, holes, pairs, max_preimages })
}

/// Corner images of a hole's preimage cell, in corner order.
pub fn hole_corner_images(ctx: &AngleContext, hole: LatticePoint) -> Result<[LatticePoint; 4], ExactError> {
    let form = LinearForm::new(ctx);
    let (a, b) = preimage_cell(&form, hole.x, hole.y)?;
    let mut out = [LatticePoint::ORIGIN; 4];
    for (k, (ea, eb)) in CORNER_OFFSETS.into_iter().enumerate() {
        let (pa, pb) = (a + ea, b + eb);
        out[k] = LatticePoint::new(form.floor(pa, pb)?, form.floor(pb, -pa)?);
    }
    Ok(out)
}

/// Whether the four corners of a hole's cell land one in each horizontal and
/// vertical neighbour cell of the hole.
pub fn hole_corners_surround(ctx: &AngleContext, hole: LatticePoint) -> Result<bool, ExactError> {
    let mut imgs = hole_corner_images(ctx, hole)?.to_vec();
    imgs.sort_by_key(|p| p.row_major());
    let (n, m) = (hole.x, hole.y);
    let mut want = vec![
        LatticePoint::new(n + 1, m),
        LatticePoint::new(n - 1, m),
        LatticePoint::new(n, m + 1),
        LatticePoint::new(n, m - 1),
    ];
    want.sort_by_key(|p| p.row_major());
    Ok(imgs == want)
}

/// Neighbour cell `(dx, dy)` that each corner of a hole's cell falls into,
/// by quadrant of the angle, in corner order.
pub fn corner_assignment(q: Quadrant) -> [(i64, i64); 4] {
    match q {
        Quadrant::First => [(0, -1), (1, 0), (-1, 0), (0, 1)],
        Quadrant::Second => [(1, 0), (0, 1), (0, -1), (-1, 0)],
        Quadrant::Third => [(0, 1), (-1, 0), (1, 0), (0, -1)],
        Quadrant::Fourth => [(-1, 0), (0, -1), (0, 1), (1, 0)],
    }
}

/// A bound `k − L(e)` on `L(a,b) − n` (or on `L2(a,b) − m`), stored through
/// the corner `e` it comes from so that the test stays an integer comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Bound {
    k: i64,
    corner: (i64, i64),
}

/// Closed-form description of the holes for one quadrant: `(n,m)` with
/// preimage cell `(a,b)` is a hole iff `L1(a,b) − n ∈ [lo1, hi1)` and
/// `L2(a,b) − m ∈ [lo2, hi2)`, with bounds that are fixed combinations of
/// 1, sin and cos.
#[derive(Clone, Debug)]
pub struct HoleWindow {
    pub quadrant: Quadrant,
    pub lo1: Scalar,
    pub hi1: Scalar,
    pub lo2: Scalar,
    pub hi2: Scalar,
    b1: (Bound, Bound),
    b2: (Bound, Bound),
}

impl HoleWindow {
    /// Intersects, over the four corners, the intervals that put each corner
    /// into its assigned neighbour cell. `None` for angles on an axis.
    pub fn new(ctx: &AngleContext) -> Result<Option<HoleWindow>, ExactError> {
        let Some(q) = ctx.quadrant()? else { return Ok(None) };
        let (c, s) = (&ctx.cos, &ctx.sin);
        // shift of coordinate 1 at corner e: L(e) = ea·c − eb·s; coordinate 2: ea·s + eb·c
        let shift1 = |(ea, eb): (i64, i64)| c.mul_int(ea).sub(&s.mul_int(eb));
        let shift2 = |(ea, eb): (i64, i64)| s.mul_int(ea).add(&c.mul_int(eb));
        let value = |b: &Bound, shift: &dyn Fn((i64, i64)) -> Result<Scalar, ExactError>| {
            Scalar::int(b.k).sub(&shift(b.corner)?)
        };
        let pick = |bounds: Vec<Bound>, better: Ordering, shift: &dyn Fn((i64, i64)) -> Result<Scalar, ExactError>| {
            let mut best = bounds[0];
            let mut best_v = value(&best, shift)?;
            for b in &bounds[1..] {
                let v = value(b, shift)?;
                if v.compare(&best_v)? == better {
                    best = *b;
                    best_v = v;
                }
            }
            Ok::<_, ExactError>((best, best_v))
        };
        let assign = corner_assignment(q);
        let mut lo1 = Vec::new();
        let mut hi1 = Vec::new();
        let mut lo2 = Vec::new();
        let mut hi2 = Vec::new();
        for (e, (dx, dy)) in CORNER_OFFSETS.into_iter().zip(assign) {
            lo1.push(Bound { k: dx, corner: e });
            hi1.push(Bound { k: dx + 1, corner: e });
            lo2.push(Bound { k: dy, corner: e });
            hi2.push(Bound { k: dy + 1, corner: e });
        }
        let (l1, lo1v) = pick(lo1, Ordering::Greater, &shift1)?;
        let (h1, hi1v) = pick(hi1, Ordering::Less, &shift1)?;
        let (l2, lo2v) = pick(lo2, Ordering::Greater, &shift2)?;
        let (h2, hi2v) = pick(hi2, Ordering::Less, &shift2)?;
        Ok(Some(HoleWindow { quadrant: q, lo1: lo1v, hi1: hi1v, lo2: lo2v, hi2: hi2v, b1: (l1, h1), b2: (l2, h2) }))
    }
}

/// Holes in `|n|, |m| ≤ M` counted by the closed-form window alone.
pub fn closed_form_holes(ctx: &AngleContext, m: i64, exec: Exec) -> Result<Option<Vec<LatticePoint>>, CensusError> {
    let Some(w) = HoleWindow::new(ctx)? else { return Ok(None) };
    let form = LinearForm::new(ctx);
    // L1(a,b) − n ≥ k − L(e)  ⟺  L((a,b) + e) ≥ n + k, and the same with < for upper bounds
    let at_least = |a: i64, b: i64, bound: Bound, n: i64| -> Result<bool, ExactError> {
        Ok(form.cmp_int(a + bound.corner.0, b + bound.corner.1, n + bound.k)? != Ordering::Less)
    };
    let below = |a: i64, b: i64, bound: Bound, n: i64| -> Result<bool, ExactError> {
        Ok(form.cmp_int(a + bound.corner.0, b + bound.corner.1, n + bound.k)? == Ordering::Less)
    };
    let rows = map_rows(-m, m, exec, |y| -> Result<Vec<LatticePoint>, ExactError> {
        let mut holes = Vec::new();
        for x in -m..=m {
            let (a, b) = preimage_cell(&form, x, y)?;
            // coordinate 2 of (a,b) + e is L(b + eb, −(a + ea))
            let c2 = |bound: Bound| (b + bound.corner.1, -(a + bound.corner.0));
            let in1 = at_least(a, b, w.b1.0, x)? && below(a, b, w.b1.1, x)?;
            let in2 = in1 && {
                let (p, q) = c2(w.b2.0);
                let (p2, q2) = c2(w.b2.1);
                form.cmp_int(p, q, y + w.b2.0.k)? != Ordering::Less
                    && form.cmp_int(p2, q2, y + w.b2.1.k)? == Ordering::Less
            };
            if in2 {
                holes.push(LatticePoint::new(x, y));
            }
        }
        Ok(holes)
    })?;
    Ok(Some(rows.into_iter().flatten().collect()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthFit {
    #[serde(rename = "Ms")]
    pub ms: Vec<i64>,
    pub counts: Vec<u64>,
    pub exponent: f64,
    pub r_squared: f64,
}

/// Least-squares slope of `ln count` against `ln M`.
pub fn fit_exponent(ms: &[i64], counts: &[u64]) -> Result<GrowthFit, CensusError> {
    if ms.len() < 3 || ms.len() != counts.len() {
        return Err(CensusError::InvalidInput("a growth fit needs at least three sizes".into()));
    }
    if ms.windows(2).any(|w| w[0] >= w[1]) || ms[0] <= 0 {
        return Err(CensusError::InvalidInput("sizes must be positive and strictly increasing".into()));
    }
    if let Some(i) = counts.iter().position(|&c| c == 0) {
        return Err(CensusError::DegenerateCounts { m: ms[i] });
    }
    let xs: Vec<f64> = ms.iter().map(|&m| (m as f64).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(GrowthFit { ms: ms.to_vec(), counts: counts.to_vec(), exponent: slope, r_squared })
}

pub fn growth_fit(
    ctx: &AngleContext,
    ms: &[i64],
    mode: RoundingMode,
    kind: CensusKind,
    opts: &CensusOptions,
) -> Result<GrowthFit, CensusError> {
    if ms.len() < 3 {
        return Err(CensusError::InvalidInput("a growth fit needs at least three sizes".into()));
    }
    let opts = CensusOptions { keep_points: false, ..*opts };
    let mut counts = Vec::with_capacity(ms.len());
    for &m in ms {
        counts.push(census(ctx, m, mode, kind, &opts)?.count);
    }
    fit_exponent(ms, &counts)
}
