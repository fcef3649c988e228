//! Orbits of discretized rotations: cycle detection, window sweeps, and the
//! period-8 family of starting points `(a, 0)` at φ = π/4.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::angle::{resolve, AngleContext, AngleSpec};
use crate::exactnum::{ExactError, Scalar};
use crate::par::{map_rows, Exec};
use crate::rotation::{DiscreteRotation, LatticePoint, RoundingMode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error("a = {a}: ⌊√2·ω⌋ = {got} but the hypothesis needs a − 1 = {want}")]
    HypothesisViolated { a: i64, got: i64, want: i64 },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitCaps {
    pub max_steps: u64,
    /// `None`: `10⁶·‖start‖∞ + 10³`.
    pub max_radius: Option<i64>,
    /// Visited states kept before switching to Brent's algorithm.
    pub memory_limit: usize,
}

impl Default for OrbitCaps {
    fn default() -> Self {
        OrbitCaps { max_steps: 1_000_000, max_radius: None, memory_limit: 1 << 20 }
    }
}

impl OrbitCaps {
    pub fn radius_for(&self, start: LatticePoint) -> i64 {
        self.max_radius
            .unwrap_or_else(|| start.norm_inf().saturating_mul(1_000_000).saturating_add(1_000))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitStatus {
    Periodic,
    /// The step cap was reached first.
    Undetermined,
    /// The orbit left the radius cap.
    Escaped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitRecord {
    pub start: LatticePoint,
    pub preperiod: u64,
    pub period: Option<u64>,
    pub status: OrbitStatus,
    pub max_norm: i64,
    pub steps_used: u64,
    /// First state of the cycle, reached after `preperiod` steps.
    pub cycle_entry: Option<LatticePoint>,
}

impl OrbitRecord {
    /// Whether the orbit ends in the fixed point `(0,0)`.
    pub fn absorbed_at_origin(&self) -> bool {
        self.status == OrbitStatus::Periodic && self.cycle_entry == Some(LatticePoint::ORIGIN)
    }
}

pub fn detect_cycle(
    ctx: &AngleContext,
    start: LatticePoint,
    mode: RoundingMode,
    caps: &OrbitCaps,
) -> Result<OrbitRecord, ExactError> {
    detect_cycle_with(&DiscreteRotation::new(ctx, mode), start, caps)
}

/// First repeated state of the orbit of `start`, remembered in a hash map;
/// runs that outgrow `caps.memory_limit` restart with Brent's algorithm.
pub fn detect_cycle_with(
    rot: &DiscreteRotation,
    start: LatticePoint,
    caps: &OrbitCaps,
) -> Result<OrbitRecord, ExactError> {
    let radius = caps.radius_for(start);
    let mut seen: HashMap<LatticePoint, u64> = HashMap::new();
    let mut x = start;
    let mut max_norm = start.norm_inf();
    let mut step = 0u64;
    loop {
        if let Some(&j) = seen.get(&x) {
            return Ok(OrbitRecord {
                start,
                preperiod: j,
                period: Some(step - j),
                status: OrbitStatus::Periodic,
                max_norm,
                steps_used: step,
                cycle_entry: Some(x),
            });
        }
        if seen.len() >= caps.memory_limit {
            return brent(rot, start, caps, radius);
        }
        seen.insert(x, step);
        if step == caps.max_steps {
            return Ok(unfinished(start, OrbitStatus::Undetermined, max_norm, step));
        }
        x = rot.apply(x)?;
        step += 1;
        max_norm = max_norm.max(x.norm_inf());
        if max_norm > radius {
            return Ok(unfinished(start, OrbitStatus::Escaped, max_norm, step));
        }
    }
}

fn unfinished(start: LatticePoint, status: OrbitStatus, max_norm: i64, steps: u64) -> OrbitRecord {
    OrbitRecord { start, preperiod: 0, period: None, status, max_norm, steps_used: steps, cycle_entry: None }
}

/// Brent's cycle finding in constant memory.
fn brent(rot: &DiscreteRotation, start: LatticePoint, caps: &OrbitCaps, radius: i64) -> Result<OrbitRecord, ExactError> {
    let mut steps = 0u64;
    let mut max_norm = start.norm_inf();
    let mut advance = |p: LatticePoint, steps: &mut u64| -> Result<Option<LatticePoint>, ExactError> {
        *steps += 1;
        let q = rot.apply(p)?;
        max_norm = max_norm.max(q.norm_inf());
        Ok((max_norm <= radius).then_some(q))
    };
    macro_rules! step {
        ($p:expr) => {
            match advance($p, &mut steps)? {
                Some(q) => q,
                None => return Ok(unfinished(start, OrbitStatus::Escaped, max_norm, steps)),
            }
        };
    }
    let (mut power, mut lam) = (1u64, 1u64);
    let mut tortoise = start;
    let mut hare = step!(start);
    while tortoise != hare {
        if steps >= caps.max_steps {
            return Ok(unfinished(start, OrbitStatus::Undetermined, max_norm, steps));
        }
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = step!(hare);
        lam += 1;
    }
    tortoise = start;
    hare = start;
    for _ in 0..lam {
        hare = step!(hare);
    }
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = step!(tortoise);
        hare = step!(hare);
        mu += 1;
    }
    Ok(OrbitRecord {
        start,
        preperiod: mu,
        period: Some(lam),
        status: OrbitStatus::Periodic,
        max_norm,
        steps_used: steps,
        cycle_entry: Some(tortoise),
    })
}

/// The first `steps + 1` states `start, r(start), …`.
pub fn orbit_states(rot: &DiscreteRotation, start: LatticePoint, steps: u64) -> Result<Vec<LatticePoint>, ExactError> {
    let mut out = Vec::with_capacity(steps as usize + 1);
    let mut x = start;
    out.push(x);
    for _ in 0..steps {
        x = rot.apply(x)?;
        out.push(x);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepSummary {
    pub m: i64,
    pub mode: RoundingMode,
    pub histogram: BTreeMap<u64, u64>,
    pub undetermined: u64,
    pub escaped: u64,
    pub total: u64,
    /// Orbits ending in `(0,0)`, and the longest way there.
    pub absorbed: u64,
    pub max_absorption_steps: u64,
}

impl SweepSummary {
    pub fn all_absorbed(&self) -> bool {
        self.absorbed == self.total
    }
}

impl Serialize for SweepSummary {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SweepSummary", 8)?;
        st.serialize_field("M", &self.m)?;
        st.serialize_field("mode", &self.mode)?;
        let pairs: Vec<[u64; 2]> = self.histogram.iter().map(|(&p, &c)| [p, c]).collect();
        st.serialize_field("histogram", &pairs)?;
        st.serialize_field("undetermined", &self.undetermined)?;
        st.serialize_field("escaped", &self.escaped)?;
        st.serialize_field("total", &self.total)?;
        st.serialize_field("absorbed", &self.absorbed)?;
        st.serialize_field("max_absorption_steps", &self.max_absorption_steps)?;
        st.end()
    }
}

/// Orbit records for every start in `|x|, |y| ≤ M`, ordered by `(y, x)`.
pub fn sweep_records(
    ctx: &AngleContext,
    m: i64,
    mode: RoundingMode,
    caps: &OrbitCaps,
    exec: Exec,
) -> Result<Vec<OrbitRecord>, OrbitError> {
    if m < 0 {
        return Err(OrbitError::InvalidInput(format!("M must be non-negative, got {m}")));
    }
    let rot = DiscreteRotation::new(ctx, mode);
    let rows = map_rows(-m, m, exec, |y| {
        (-m..=m).map(|x| detect_cycle_with(&rot, LatticePoint::new(x, y), caps)).collect::<Result<Vec<_>, _>>()
    })?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn summarize(m: i64, mode: RoundingMode, records: &[OrbitRecord]) -> SweepSummary {
    let mut s = SweepSummary {
        m,
        mode,
        histogram: BTreeMap::new(),
        undetermined: 0,
        escaped: 0,
        total: records.len() as u64,
        absorbed: 0,
        max_absorption_steps: 0,
    };
    for r in records {
        match (r.status, r.period) {
            (OrbitStatus::Periodic, Some(p)) => *s.histogram.entry(p).or_default() += 1,
            (OrbitStatus::Escaped, _) => s.escaped += 1,
            _ => s.undetermined += 1,
        }
        if r.absorbed_at_origin() {
            s.absorbed += 1;
            s.max_absorption_steps = s.max_absorption_steps.max(r.preperiod);
        }
    }
    s
}

pub fn orbit_sweep(
    ctx: &AngleContext,
    m: i64,
    mode: RoundingMode,
    caps: &OrbitCaps,
    exec: Exec,
) -> Result<SweepSummary, OrbitError> {
    Ok(summarize(m, mode, &sweep_records(ctx, m, mode, caps, exec)?))
}

/// Which interval for `{a/√2}` selects the period-8 starting points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Period8Rule {
    /// `[1 − 1/√2, 1/√2]`, the interval as usually stated.
    #[default]
    Stated,
    /// `[1 − 1/√2, √2 − 1]`, the range on which every step of the 8-step
    /// chain goes through (the fifth step needs `{a/√2} ≤ √2 − 1`).
    ProofConsistent,
}

impl FromStr for Period8Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "stated" => Ok(Period8Rule::Stated),
            "proof_consistent" | "proof" | "corrected" => Ok(Period8Rule::ProofConsistent),
            _ => Err(format!("unknown interval `{s}` (stated, proof-consistent)")),
        }
    }
}

impl fmt::Display for Period8Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Period8Rule::Stated => "stated",
            Period8Rule::ProofConsistent => "proof_consistent",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Period8Options {
    pub rule: Period8Rule,
    /// Closed interval endpoints; `false` re-runs with both ends open.
    pub closed: bool,
}

impl Default for Period8Options {
    fn default() -> Self {
        Period8Options { rule: Period8Rule::Stated, closed: true }
    }
}

/// Exact values in `ℚ(√2)` used by the period-8 conditions.
struct Sqrt2 {
    inv: Scalar,
    root: Scalar,
    lo: Scalar,
    hi_stated: Scalar,
    hi_proof: Scalar,
}

impl Sqrt2 {
    fn new() -> Self {
        let q = |p, q, den| Scalar::quad(p, q, 2, den).expect("constant");
        Sqrt2 {
            inv: q(0, 1, 2),
            root: q(0, 1, 1),
            lo: q(2, -1, 2),
            hi_stated: q(0, 1, 2),
            hi_proof: q(-1, 1, 1),
        }
    }

    /// `a/√2`
    fn a_over(&self, a: i64) -> Scalar {
        self.inv.mul_int(a)
    }

    fn omega(&self, a: i64) -> i64 {
        floor_i64(&self.a_over(a))
    }
}

fn floor_i64(s: &Scalar) -> i64 {
    s.floor_exact().expect("exact").to_i64().expect("fits")
}

/// Whether `a` meets the period-8 hypotheses: `⌊√2·ω⌋ = a − 1` with
/// `ω = ⌊a/√2⌋`, and `{a/√2}` in the interval chosen by `opts`.
pub fn period8_qualifies(a: i64, opts: &Period8Options) -> bool {
    period8_qualifies_with(&Sqrt2::new(), a, opts)
}

fn period8_qualifies_with(k: &Sqrt2, a: i64, opts: &Period8Options) -> bool {
    let w = k.omega(a);
    if floor_i64(&k.root.mul_int(w)) != a - 1 {
        return false;
    }
    let hi = match opts.rule {
        Period8Rule::Stated => &k.hi_stated,
        Period8Rule::ProofConsistent => &k.hi_proof,
    };
    k.a_over(a).frac_in(&k.lo, hi, opts.closed, opts.closed).expect("exact")
}

/// All `a ∈ [1, a_max]` meeting the hypotheses, in exact `√2` arithmetic.
pub fn period8_candidates(a_max: i64, opts: &Period8Options) -> Vec<i64> {
    let k = Sqrt2::new();
    (1..=a_max).filter(|&a| period8_qualifies_with(&k, a, opts)).collect()
}

/// `{a ∈ [1, a_max] : r⁸(a,0) = (a,0)}` at π/4 by direct iteration.
pub fn period8_brute_force(a_max: i64, exec: Exec) -> Result<Vec<i64>, ExactError> {
    let rot = eighth_turn();
    let hits = map_rows(1, a_max, exec, |a| {
        let p = LatticePoint::new(a, 0);
        Ok::<_, ExactError>((orbit_states(&rot, p, 8)?[8] == p).then_some(a))
    })?;
    Ok(hits.into_iter().flatten().collect())
}

fn eighth_turn() -> DiscreteRotation {
    let ctx = resolve(AngleSpec::PiMultiple { num: 1, den: 4 }).expect("π/4 resolves");
    DiscreteRotation::new(&ctx, RoundingMode::Floor)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub label: &'static str,
    pub lhs: i64,
    pub rhs: i64,
    /// Which case of the identity applies.
    pub branch: &'static str,
    pub holds: bool,
}

/// Evaluates the six floor identities behind the 8-step chain for `a`, with
/// `ω = ⌊a/√2⌋`. Requires `⌊√2·ω⌋ = a − 1`.
pub fn verify_helper_identities(a: i64) -> Result<Vec<IdentityCheck>, OrbitError> {
    let k = Sqrt2::new();
    let w = k.omega(a);
    let got = floor_i64(&k.root.mul_int(w));
    if got != a - 1 {
        return Err(OrbitError::HypothesisViolated { a, got, want: a - 1 });
    }
    let frac_a = k.a_over(a).frac()?;
    let frac_w = k.root.mul_int(w).frac()?;
    let frac_root = k.root.frac()?;
    let lt = |x: &Scalar, y: &Scalar| -> Result<bool, ExactError> { Ok(x.compare(y)?.is_lt()) };
    let fl = |s: Scalar| floor_i64(&s);
    let add = |x: &Scalar, y: &Scalar| x.add(y).expect("same field");
    let mut out = Vec::new();
    let mut push = |label, lhs: i64, rhs: i64, branch| out.push(IdentityCheck { label, lhs, rhs, branch, holds: lhs == rhs });

    // (1) ⌊−a/√2 + 1/√2⌋ = −ω
    push("1", fl(add(&k.a_over(-a), &k.inv)), -w, "always");
    // (2) ⌊a/√2 − 1/√2⌋ = ω if a = 1, else ω − 1
    let (rhs, br) = if a == 1 { (w, "a = 1") } else { (w - 1, "a ≠ 1") };
    push("2", fl(add(&k.a_over(a), &k.inv.neg())), rhs, br);
    // (4) ⌊a/√2 + 1/√2⌋ = ω if {a/√2} < 1 − 1/√2, else ω + 1
    let (rhs, br) = if lt(&frac_a, &k.lo)? { (w, "{a/√2} < 1 − 1/√2") } else { (w + 1, "{a/√2} ≥ 1 − 1/√2") };
    push("4", fl(add(&k.a_over(a), &k.inv)), rhs, br);
    // (5) ⌊−a/√2 + √2⌋ = −ω if {a/√2} > √2 − 1, else −ω + 1
    let (rhs, br) = if lt(&k.hi_proof, &frac_a)? { (-w, "{a/√2} > √2 − 1") } else { (-w + 1, "{a/√2} ≤ √2 − 1") };
    push("5", fl(add(&k.a_over(-a), &k.root)), rhs, br);
    // (7) ⌊√2ω + √2⌋ = a if {√2ω} + {√2} < 1, else a + 1
    let (rhs, br) = if lt(&add(&frac_w, &frac_root), &Scalar::one())? {
        (a, "{√2ω} + {√2} < 1")
    } else {
        (a + 1, "{√2ω} + {√2} ≥ 1")
    };
    push("7", fl(k.root.mul_int(w + 1)), rhs, br);
    // (8) ⌊−√2ω + 1/√2⌋ = −a if {√2ω} > 1/√2, else −a + 1
    let (rhs, br) = if lt(&k.inv, &frac_w)? { (-a, "{√2ω} > 1/√2") } else { (-a + 1, "{√2ω} ≤ 1/√2") };
    push("8", fl(add(&k.root.mul_int(-w), &k.inv)), rhs, br);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Period8Violation {
    pub a: i64,
    /// `(a,0), r(a,0), …, r⁸(a,0)`
    pub orbit: Vec<LatticePoint>,
    pub period: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Period8Report {
    pub a_max: i64,
    pub options: Period8Options,
    pub candidates: u64,
    /// Candidates for which `r⁸(a,0) = (a,0)`.
    pub verified: u64,
    /// `a = 1`, where `r(1,0) = (0,0)`; kept out of the verdict.
    pub boundary: Vec<i64>,
    pub violations: Vec<Period8Violation>,
    /// Minimal periods seen among verified candidates.
    pub periods: BTreeMap<u64, u64>,
}

impl Period8Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Iterates `r` eight times from `(a,0)` for every candidate.
pub fn verify_period8(a_max: i64, opts: &Period8Options, exec: Exec) -> Result<Period8Report, OrbitError> {
    if a_max < 1 {
        return Err(OrbitError::InvalidInput(format!("a_max must be at least 1, got {a_max}")));
    }
    let rot = eighth_turn();
    let candidates = period8_candidates(a_max, opts);
    let caps = OrbitCaps::default();
    let results = map_rows(0, candidates.len() as i64 - 1, exec, |i| -> Result<_, ExactError> {
        let a = candidates[i as usize];
        let p = LatticePoint::new(a, 0);
        let orbit = orbit_states(&rot, p, 8)?;
        let rec = detect_cycle_with(&rot, p, &caps)?;
        Ok((a, orbit, rec.period))
    })?;
    let mut report = Period8Report {
        a_max,
        options: *opts,
        candidates: candidates.len() as u64,
        verified: 0,
        boundary: Vec::new(),
        violations: Vec::new(),
        periods: BTreeMap::new(),
    };
    for (a, orbit, period) in results {
        if a == 1 {
            report.boundary.push(a);
        } else if orbit[8] == orbit[0] {
            report.verified += 1;
            *report.periods.entry(period.unwrap_or(0)).or_default() += 1;
        } else {
            report.violations.push(Period8Violation { a, orbit, period });
        }
    }
    Ok(report)
}
