//! Acceptance criteria 1–10, one PASS/FAIL line each. Exits non-zero when any
//! criterion fails.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lattice_rot_core::angle::{resolve, AngleContext, AngleSpec};
use lattice_rot_core::census::{
    census, growth_fit, hole_corners_surround, oracle_scan, CensusKind, CensusOptions, MethodChoice, DEFAULT_ORACLE_CAP,
};
use lattice_rot_core::exactnum::Scalar;
use lattice_rot_core::orbits::{
    orbit_sweep, period8_brute_force, period8_candidates, period8_qualifies, verify_period8, OrbitCaps, Period8Options,
    Period8Rule,
};
use lattice_rot_core::par::Exec;
use lattice_rot_core::rotation::RoundingMode;
use lattice_rot_core::udist::{
    count_solutions, count_solutions_by_residue, gen_primitive_triples, verify_case3_congruences, InequalityBox, Parity,
};

const FLOOR: RoundingMode = RoundingMode::Floor;

fn ctx(text: &str) -> AngleContext {
    resolve(text.parse().unwrap()).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn bijective_at_cardinal_angles() -> Outcome {
    let start = Instant::now();
    let mut nonzero = Vec::new();
    for angle in ["0", "pi/2", "pi", "3*pi/2"] {
        let c = ctx(angle);
        for m in [16, 64, 256] {
            for kind in [CensusKind::Collisions, CensusKind::Holes] {
                let n = census(&c, m, FLOOR, kind, &CensusOptions::default()).unwrap().count;
                if n != 0 {
                    nonzero.push(format!("{angle} M={m} {kind}={n}"));
                }
            }
        }
    }
    let t = start.elapsed();
    let detail = format!("24 censuses, nonzero: {}, {:.2}s (limit 5s)", nonzero.len(), secs(t));
    outcome(nonzero.is_empty() && t < Duration::from_secs(5), detail)
}

const ORACLE_ANGLES: [&str; 5] = ["pi/4", "pi/6", "pi/3", "pyth:3,4,5", "pyth:5,12,13"];
const ORACLE_MS: [i64; 3] = [16, 32, 64];

/// Criteria 2, 4 and 5 share the oracle runs.
fn oracle_runs() -> (Outcome, Outcome, Outcome) {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let (mut pairs, mut far_pairs) = (0usize, 0usize);
    let (mut holes, mut bad_holes) = (0usize, 0usize);
    for angle in ORACLE_ANGLES {
        let c = ctx(angle);
        for m in ORACLE_MS {
            let scan = oracle_scan(&c, m, FLOOR, Exec::Parallel, DEFAULT_ORACLE_CAP).unwrap();
            let opts = CensusOptions { method: MethodChoice::Characterization, keep_points: true, ..CensusOptions::default() };
            let t = census(&c, m, FLOOR, CensusKind::Collisions, &opts).unwrap();
            let n = census(&c, m, FLOOR, CensusKind::Holes, &opts).unwrap();
            if t.points.as_ref() != Some(&scan.collisions) || t.count != scan.collisions.len() as u64 {
                mismatches.push(format!("{angle} M={m} collisions {} vs {}", t.count, scan.collisions.len()));
            }
            if n.points.as_ref() != Some(&scan.holes) || n.count != scan.holes.len() as u64 {
                mismatches.push(format!("{angle} M={m} holes {} vs {}", n.count, scan.holes.len()));
            }
            for p in &scan.pairs {
                pairs += 1;
                let (dx, dy) = (p.first.x - p.second.x, p.first.y - p.second.y);
                if dx * dx + dy * dy != 1 {
                    far_pairs += 1;
                }
            }
            for &h in &scan.holes {
                holes += 1;
                if !hole_corners_surround(&c, h).unwrap() {
                    bad_holes += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    let c2 = outcome(
        mismatches.is_empty() && t < Duration::from_secs(30),
        format!("15 angle/M runs, mismatches: {:?}, {:.2}s (limit 30s)", mismatches, secs(t)),
    );
    let c4 = outcome(pairs > 0 && far_pairs == 0, format!("{pairs} colliding preimage pairs, {far_pairs} not at distance 1"));
    let c5 = outcome(holes > 0 && bad_holes == 0, format!("{holes} holes, {bad_holes} without the four-neighbour corner pattern"));
    (c2, c4, c5)
}

fn growth_dichotomy() -> Outcome {
    let start = Instant::now();
    let ms = [128, 256, 512, 1024];
    let numeric = resolve(AngleSpec::parse_with_precision("rad:~1.0", 256).unwrap()).unwrap();
    let opts = CensusOptions { exec: Exec::Sequential, ..CensusOptions::default() };
    let mut pass = true;
    let mut detail = String::new();
    for (label, c, lo, hi) in [("pi/4", ctx("pi/4"), 0.8, 1.2), ("pyth:3,4,5", ctx("pyth:3,4,5"), 1.7, 2.2), ("rad:~1.0", numeric, 1.7, 2.2)] {
        for kind in [CensusKind::Collisions, CensusKind::Holes] {
            let fit = growth_fit(&c, &ms, FLOOR, kind, &opts).unwrap();
            let ok = (lo..=hi).contains(&fit.exponent);
            pass &= ok;
            let _ = write!(detail, "{label} {kind} {:.3} in [{lo}, {hi}]: {ok} (counts {:?}); ", fit.exponent, fit.counts);
        }
    }
    let t = start.elapsed();
    pass &= t < Duration::from_secs(180);
    let _ = write!(detail, "{:.1}s single-threaded (limit 180s)", secs(t));
    outcome(pass, detail)
}

fn period8_family() -> (Outcome, String) {
    let start = Instant::now();
    let stated = Period8Options::default();
    let report = verify_period8(100_000, &stated, Exec::Parallel).unwrap();
    // the same hypotheses, checked by brute force: r⁸(a,0) = (a,0) and a qualifies
    let returns = period8_brute_force(10_000, Exec::Parallel).unwrap();
    let filtered: Vec<i64> = returns.iter().copied().filter(|&a| period8_qualifies(a, &stated)).collect();
    let candidates = period8_candidates(10_000, &stated);
    let t = start.elapsed();
    let first: Vec<i64> = report.violations.iter().take(5).map(|v| v.a).collect();
    let sets_equal = candidates == filtered;
    let pass = report.passed() && sets_equal && t < Duration::from_secs(60);
    let detail = format!(
        "a <= 1e5: {} qualifying, boundary {:?} excluded, {} return after 8 steps, {} do not (first {:?}); \
         a <= 1e4: {} candidates vs {} in the brute-force filter, equal: {sets_equal}; {:.1}s",
        report.candidates,
        report.boundary,
        report.verified,
        report.violations.len(),
        first,
        candidates.len(),
        filtered.len(),
        secs(t)
    );
    let proof = Period8Options { rule: Period8Rule::ProofConsistent, closed: true };
    let narrow = verify_period8(100_000, &proof, Exec::Parallel).unwrap();
    let narrow_equal = period8_candidates(10_000, &proof) == returns;
    let note = format!(
        "with {{a/√2}} <= √2 − 1 as the upper end: {} qualifying, {} violations, equal to {{a : r⁸(a,0) = (a,0)}} on a <= 1e4: {narrow_equal}",
        narrow.candidates,
        narrow.violations.len()
    );
    (outcome(pass, detail), note)
}

fn residue_machinery() -> Outcome {
    let triples = gen_primitive_triples(10_000);
    let mut bad = 0;
    for t in &triples {
        let (u, v, q) = (t.u as i128, t.v as i128, t.q as i128);
        let ok = (t.p1 as i128).pow(2) + (t.p2 as i128).pow(2) == q * q
            && t.p1.gcd(&t.q) == 1
            && t.p2.gcd(&t.q) == 1
            && (2 * u * v * t.h as i128 - (u * u - v * v)).rem_euclid(q) == 0;
        bad += usize::from(!ok);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut failed = 0;
    for _ in 0..50 {
        let t = &triples[rng.gen_range(0..triples.len())];
        let samples: Vec<(i64, i64)> =
            (0..1000).map(|_| (rng.gen_range(-1_000_000..=1_000_000), rng.gen_range(-1_000_000..=1_000_000))).collect();
        failed += usize::from(!verify_case3_congruences(t, &samples).passed());
    }
    let c = ctx("pyth:3,4,5");
    let half = Scalar::ratio(1, 2).unwrap();
    let bx = InequalityBox::new(half.clone(), half).unwrap();
    let mut counts = Vec::new();
    for parity in [Parity::All, Parity::OddOdd] {
        counts.push((
            count_solutions(&c, &bx, 200, parity, Exec::Parallel).unwrap(),
            count_solutions_by_residue(&c, &bx, 200, parity).unwrap(),
        ));
    }
    let agree = counts.iter().all(|(a, b)| a == b);
    outcome(
        bad == 0 && failed == 0 && agree,
        format!(
            "{} triples with q <= 1e4, {bad} invalid; 50 x 1000 congruence samples, {failed} triples failing; \
             direct/residue counts (all, odd-odd) {counts:?}",
            triples.len()
        ),
    )
}

fn equidistribution() -> Outcome {
    let c = ctx("rad:~1.0");
    let half = Scalar::ratio(1, 2).unwrap();
    let bx = InequalityBox::new(half.clone(), half).unwrap();
    let n = count_solutions(&c, &bx, 1000, Parity::All, Exec::Parallel).unwrap();
    let ratio = n as f64 / Parity::All.candidates(1000) as f64;
    outcome((ratio - 0.25).abs() <= 0.02, format!("ratio {ratio:.5} ({n} pairs), target 0.25 ± 0.02"))
}

fn trunc_absorption() -> Outcome {
    let caps = OrbitCaps { max_steps: 10_000, ..OrbitCaps::default() };
    let mut pass = true;
    let mut detail = String::new();
    for angle in ["pi/4", "rad:~1.0"] {
        let s = orbit_sweep(&ctx(angle), 50, RoundingMode::Trunc, &caps, Exec::Parallel).unwrap();
        pass &= s.all_absorbed();
        let _ = write!(detail, "{angle}: {}/{} reach (0,0), longest {} steps; ", s.absorbed, s.total, s.max_absorption_steps);
    }
    outcome(pass, detail.trim_end_matches("; "))
}

fn conjecture_probe() -> Outcome {
    let s = orbit_sweep(&ctx("pi/4"), 100, FLOOR, &OrbitCaps::default(), Exec::Parallel).unwrap();
    let mut detail = format!("pi/4 M=100: undetermined {}, escaped {}, periods {:?}", s.undetermined, s.escaped, s.histogram);
    if s.undetermined > 0 {
        detail.push_str(" (finding: orbits without a detected period)");
    }
    // reported, never asserted
    outcome(true, detail)
}

fn main() {
    let started = Instant::now();
    let (c2, c4, c5) = oracle_runs();
    let (c6, note6) = period8_family();
    let results = [
        (1, "bijectivity at cardinal angles", bijective_at_cardinal_angles()),
        (2, "characterization equals brute force", c2),
        (3, "growth dichotomy", growth_dichotomy()),
        (4, "colliding preimages are neighbours", c4),
        (5, "hole corner geometry", c5),
        (6, "period-8 family at pi/4", c6),
        (7, "rational-angle residue machinery", residue_machinery()),
        (8, "equidistribution ratio", equidistribution()),
        (9, "trunc absorption", trunc_absorption()),
        (10, "orbit sweep probe", conjecture_probe()),
    ];
    let mut failed = 0;
    for (n, name, o) in &results {
        println!("{} {n:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if *n == 6 {
            println!("NOTE  6 {note6}");
        }
        failed += usize::from(!o.pass);
    }
    println!("{}/10 passed in {:.1}s", 10 - failed, secs(started.elapsed()));
    if failed > 0 {
        std::process::exit(1);
    }
}
