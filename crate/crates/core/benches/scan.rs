//! Parallel against sequential row scans. Build with `--no-default-features`
//! and both groups measure the sequential path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use lattice_rot_core::angle::{resolve, AngleContext};
use lattice_rot_core::census::{census, CensusKind, CensusOptions, MethodChoice};
use lattice_rot_core::exactnum::Scalar;
use lattice_rot_core::orbits::{orbit_sweep, OrbitCaps};
use lattice_rot_core::par::Exec;
use lattice_rot_core::rotation::RoundingMode;
use lattice_rot_core::udist::{count_solutions, InequalityBox, Parity};

const EXECS: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn ctx(text: &str) -> AngleContext {
    resolve(text.parse().unwrap()).unwrap()
}

fn census_scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("census");
    g.sample_size(10);
    for angle in ["pi/4", "pyth:3,4,5", "rad:~1.0"] {
        let ctx = ctx(angle);
        for (kind, method, m) in [
            (CensusKind::Collisions, MethodChoice::Characterization, 256),
            (CensusKind::Holes, MethodChoice::Characterization, 256),
            (CensusKind::Holes, MethodChoice::BruteForce, 64),
        ] {
            for (name, exec) in EXECS {
                let opts = CensusOptions { method, exec, ..CensusOptions::default() };
                let id = BenchmarkId::new(format!("{angle}/{kind}/{method:?}/M={m}"), name);
                g.bench_function(id, |b| b.iter(|| census(&ctx, m, RoundingMode::Floor, kind, &opts).unwrap().count));
            }
        }
    }
    g.finish();
}

fn udist_scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("udist");
    g.sample_size(10);
    let bx = InequalityBox::new(Scalar::ratio(1, 2).unwrap(), Scalar::ratio(1, 2).unwrap()).unwrap();
    for angle in ["pyth:3,4,5", "rad:~1.0"] {
        let ctx = ctx(angle);
        for (name, exec) in EXECS {
            g.bench_function(BenchmarkId::new(format!("{angle}/M=300"), name), |b| {
                b.iter(|| count_solutions(&ctx, &bx, 300, Parity::All, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn orbit_scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    let caps = OrbitCaps::default();
    for (angle, mode) in [("pi/4", RoundingMode::Floor), ("rad:~1.0", RoundingMode::Trunc)] {
        let ctx = ctx(angle);
        for (name, exec) in EXECS {
            g.bench_function(BenchmarkId::new(format!("{angle}/{mode}/M=40"), name), |b| {
                b.iter(|| orbit_sweep(&ctx, 40, mode, &caps, exec).unwrap().total)
            });
        }
    }
    g.finish();
}

criterion_group!(benches, census_scan, udist_scan, orbit_scan);
criterion_main!(benches);
