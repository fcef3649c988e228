use std::cmp::Ordering;

use proptest::prelude::*;

use lattice_rot_core::angle::{classify, resolve, AngleClass, AngleContext, AngleSpec};
use lattice_rot_core::census::{census, CensusKind, CensusOptions, MethodChoice};
use lattice_rot_core::exactnum::{HighPrec, Scalar};
use lattice_rot_core::orbits::{detect_cycle, orbit_states, OrbitCaps};
use lattice_rot_core::par::Exec;
use lattice_rot_core::rotation::{discrete_rotate, rotate, DiscreteRotation, LatticePoint, RoundingMode};
use lattice_rot_core::udist::{count_solutions, count_solutions_by_residue, gen_primitive_triples, InequalityBox, Parity};

fn ctx(text: &str) -> AngleContext {
    resolve(text.parse().unwrap()).unwrap()
}

fn quad() -> impl Strategy<Value = Scalar> {
    (-10i64.pow(12)..10i64.pow(12), -10i64.pow(9)..10i64.pow(9), 2u64..1_000_000, 1i64..10i64.pow(9))
        .prop_map(|(p, q, d, den)| Scalar::quad(p, q, d, den).unwrap())
}

fn rational() -> impl Strategy<Value = Scalar> {
    (-10i64.pow(15)..10i64.pow(15), 1i64..10i64.pow(6)).prop_map(|(n, d)| Scalar::ratio(n, d).unwrap())
}

/// Exact angles from every constructor.
fn exact_angle() -> impl Strategy<Value = AngleContext> {
    let pi = (-24i64..24, prop::sample::select(vec![1i64, 2, 3, 4, 6]))
        .prop_map(|(k, d)| resolve(AngleSpec::PiMultiple { num: k, den: d }).unwrap());
    let pyth = (0usize..40, any::<bool>(), any::<bool>(), any::<bool>()).prop_map(|(i, swap, ns, nc)| {
        let t = gen_primitive_triples(2000)[i];
        let (s, c) = if swap { (t.p2, t.p1) } else { (t.p1, t.p2) };
        let s = if ns { -s } else { s };
        let c = if nc { -c } else { c };
        ctx(&format!("pyth:{s},{c},{}", t.q))
    });
    prop_oneof![pi, pyth, Just(ctx("quad:sin=sqrt(2)/3,cos=sqrt(7)/3"))]
}

fn any_angle() -> impl Strategy<Value = AngleContext> {
    prop_oneof![
        4 => exact_angle(),
        1 => (-3000i64..3000).prop_map(|k| ctx(&format!("rad:~{}", k as f64 / 997.0))),
    ]
}

fn point(r: i64) -> impl Strategy<Value = LatticePoint> {
    (-r..=r, -r..=r).prop_map(|(x, y)| LatticePoint::new(x, y))
}

fn mode() -> impl Strategy<Value = RoundingMode> {
    prop::sample::select(RoundingMode::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn floor_is_within_one(s in prop_oneof![quad(), rational()]) {
        let f = Scalar::from_rational(s.floor_exact().unwrap().into());
        let diff = s.sub(&f).unwrap();
        prop_assert_ne!(diff.signum().unwrap(), Ordering::Less);
        prop_assert_eq!(diff.compare(&Scalar::one()).unwrap(), Ordering::Less);
    }

    #[test]
    fn add_then_subtract(a in prop_oneof![quad(), rational()], b in prop_oneof![quad(), rational()]) {
        // only within a shared field
        if let Ok(sum) = a.add(&b) {
            let back = sum.sub(&b).unwrap();
            prop_assert_eq!(format!("{back:?}"), format!("{a:?}"));
        }
        let same = Scalar::quad(3, -5, 2, 7).unwrap();
        if let Ok(sum) = same.add(&a) {
            prop_assert_eq!(sum.sub(&a).unwrap(), same);
        }
    }

    #[test]
    fn canonical_form_is_stable(p in -10_000i64..10_000, q in -10_000i64..10_000, d in 1u64..500, den in 1i64..10_000, k in 1i64..50) {
        let a = Scalar::quad(p, q, d, den).unwrap();
        prop_assert_eq!(&a, &Scalar::quad(p, q, d, den).unwrap());
        // scaled data, same number
        prop_assert_eq!(&a, &Scalar::quad(p * k, q * k, d, den * k).unwrap());
        // square factors of d move into q
        prop_assert_eq!(&a, &Scalar::quad(p * 2, q, d * 4, den * 2).unwrap());
    }

    #[test]
    fn print_parse_round_trip(s in prop_oneof![quad(), rational()]) {
        let back: Scalar = s.to_string().parse().unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn pythagorean_identity(c in exact_angle()) {
        let one = c.sin.mul(&c.sin).unwrap().add(&c.cos.mul(&c.cos).unwrap()).unwrap();
        prop_assert_eq!(one, Scalar::one());
        prop_assert_eq!(classify(&c.sin, &c.cos), c.class.clone());
    }

    #[test]
    fn cardinal_classes(k in -40i64..40, den in prop::sample::select(vec![1i64, 2, 3, 4, 6])) {
        let c = resolve(AngleSpec::PiMultiple { num: k, den }).unwrap();
        let cardinal = matches!(c.class, AngleClass::CardinalMultiple { .. });
        // k·π/den is a multiple of π/2 iff den divides 2k
        prop_assert_eq!(cardinal, (2 * k) % den == 0);
        prop_assert_eq!(c.is_cardinal(), cardinal);
    }

    #[test]
    fn rotation_is_an_isometry(c in exact_angle(), p in point(1 << 20)) {
        // same-field angles only; the mixed-field one rotates through high precision
        prop_assume!(c.sin.field() == c.cos.field() || c.sin.field().is_none() || c.cos.field().is_none());
        let rp = rotate(&c, p);
        let n2 = rp.x.mul(&rp.x).unwrap().add(&rp.y.mul(&rp.y).unwrap()).unwrap();
        prop_assert_eq!(n2, Scalar::int(p.x * p.x + p.y * p.y));
    }

    #[test]
    fn quantizer_residuals(c in exact_angle(), p in point(1 << 20)) {
        prop_assume!(c.sin.field() == c.cos.field() || c.sin.field().is_none() || c.cos.field().is_none());
        let rp = rotate(&c, p);
        let half = Scalar::ratio(1, 2).unwrap();
        let floor = discrete_rotate(&c, p, RoundingMode::Floor).unwrap();
        let round = discrete_rotate(&c, p, RoundingMode::Round).unwrap();
        for (v, f, r) in [(&rp.x, floor.x, round.x), (&rp.y, floor.y, round.y)] {
            let df = v.sub(&Scalar::int(f)).unwrap();
            prop_assert!(df.signum().unwrap() != Ordering::Less && df.compare(&Scalar::one()).unwrap() == Ordering::Less);
            let dr = v.sub(&Scalar::int(r)).unwrap();
            prop_assert!(dr.compare(&half.neg()).unwrap() != Ordering::Less && dr.compare(&half).unwrap() == Ordering::Less);
        }
    }

    #[test]
    fn prepared_rotation_matches_scalar_path(c in any_angle(), p in point((1 << 28) + 5), m in mode()) {
        let fast = DiscreteRotation::new(&c, m).apply(p).unwrap();
        prop_assert_eq!(fast, discrete_rotate(&c, p, m).unwrap());
    }

    #[test]
    fn cardinal_rotation_is_linear(k in 0i64..4, p in point(1 << 40), m in mode()) {
        let c = resolve(AngleSpec::PiMultiple { num: k, den: 2 }).unwrap();
        let q = discrete_rotate(&c, p, m).unwrap();
        let want = [(p.x, p.y), (-p.y, p.x), (-p.x, -p.y), (p.y, -p.x)][k as usize];
        prop_assert_eq!((q.x, q.y), want);
    }

    #[test]
    fn orbit_periods_reverify(c in any_angle(), p in point(60), m in mode()) {
        let caps = OrbitCaps::default();
        let r = detect_cycle(&c, p, m, &caps).unwrap();
        prop_assert_eq!(&r, &detect_cycle(&c, p, m, &caps).unwrap());
        let period = r.period.unwrap();
        let states = orbit_states(&DiscreteRotation::new(&c, m), p, r.preperiod + period).unwrap();
        let entry = states[r.preperiod as usize];
        prop_assert_eq!(states[(r.preperiod + period) as usize], entry);
        prop_assert!((1..period).all(|k| states[(r.preperiod + k) as usize] != entry));
        if r.preperiod > 0 {
            let before = states[r.preperiod as usize - 1];
            prop_assert!(!states[r.preperiod as usize..].contains(&before));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn census_oracle_equivalence(c in exact_angle(), m in 1i64..24, holes in any::<bool>()) {
        let kind = if holes { CensusKind::Holes } else { CensusKind::Collisions };
        let opts = |method| CensusOptions { method, keep_points: true, ..CensusOptions::default() };
        let a = census(&c, m, RoundingMode::Floor, kind, &opts(MethodChoice::Characterization)).unwrap();
        let b = census(&c, m, RoundingMode::Floor, kind, &opts(MethodChoice::BruteForce)).unwrap();
        prop_assert_eq!(a.count, b.count);
        prop_assert_eq!(a.points, b.points);
        prop_assert_eq!(a.pair_count, b.pair_count);
    }

    #[test]
    fn census_monotone_in_m(c in exact_angle(), m in 1i64..30, holes in any::<bool>()) {
        let kind = if holes { CensusKind::Holes } else { CensusKind::Collisions };
        let opts = CensusOptions::default();
        let small = census(&c, m, RoundingMode::Floor, kind, &opts).unwrap().count;
        let big = census(&c, m + 1, RoundingMode::Floor, kind, &opts).unwrap().count;
        prop_assert!(small <= big);
    }

    #[test]
    fn counters_agree(i in 0usize..60, t1 in 1i64..=12, t2 in 1i64..=12, m in 1i64..60, odd in any::<bool>()) {
        let t = gen_primitive_triples(3000)[i];
        let c = ctx(&format!("pyth:{},{},{}", t.p1, t.p2, t.q));
        let bx = InequalityBox::new(Scalar::ratio(t1, 12).unwrap(), Scalar::ratio(t2, 12).unwrap()).unwrap();
        let parity = if odd { Parity::OddOdd } else { Parity::All };
        let direct = count_solutions(&c, &bx, m, parity, Exec::Parallel).unwrap();
        prop_assert_eq!(direct, count_solutions_by_residue(&c, &bx, m, parity).unwrap());
        if odd {
            prop_assert!(direct <= count_solutions(&c, &bx, m, Parity::All, Exec::Parallel).unwrap());
        }
    }
}

/// `floor_exact` in `ℚ(√d)` against the same value rendered at 256 bits.
#[test]
fn quad_floor_matches_high_precision() {
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(100_000));
    runner
        .run(&quad(), |s| {
            let high = Scalar::HighPrec(HighPrec::from_exact(&s, 256));
            prop_assert_eq!(s.floor_exact().unwrap(), high.floor_exact().unwrap());
            Ok(())
        })
        .unwrap();
}

#[test]
fn odd_parity_counts_never_exceed_all() {
    for angle in ["pi/4", "pi/6", "rad:~1.0", "quad:sin=sqrt(2)/3,cos=sqrt(7)/3"] {
        let c = ctx(angle);
        let bx = InequalityBox::new(Scalar::ratio(1, 3).unwrap(), Scalar::ratio(3, 4).unwrap()).unwrap();
        let odd = count_solutions(&c, &bx, 80, Parity::OddOdd, Exec::Parallel).unwrap();
        let all = count_solutions(&c, &bx, 80, Parity::All, Exec::Parallel).unwrap();
        assert!(odd <= all, "{angle}");
    }
}

/// Angles in general position equidistribute: the hit ratio approaches `t1·t2`.
#[test]
fn generic_angle_ratio_near_box_area() {
    let c = ctx("quad:sin=sqrt(2)/3,cos=sqrt(7)/3");
    assert!(matches!(c.class, AngleClass::GenericIndependent));
    let bx = InequalityBox::new(Scalar::ratio(1, 2).unwrap(), Scalar::ratio(1, 3).unwrap()).unwrap();
    let m = 2000;
    let n = count_solutions(&c, &bx, m, Parity::All, Exec::Parallel).unwrap();
    let ratio = n as f64 / Parity::All.candidates(m) as f64;
    assert!((ratio - 1.0 / 6.0).abs() <= 0.03, "{ratio}");
}

#[test]
fn cardinal_censuses_vanish() {
    for k in 0..4 {
        let c = resolve(AngleSpec::PiMultiple { num: k, den: 2 }).unwrap();
        for m in [1, 7, 33] {
            for kind in [CensusKind::Collisions, CensusKind::Holes] {
                for method in [MethodChoice::Characterization, MethodChoice::BruteForce] {
                    let opts = CensusOptions { method, ..CensusOptions::default() };
                    assert_eq!(census(&c, m, RoundingMode::Floor, kind, &opts).unwrap().count, 0);
                }
            }
        }
    }
}
