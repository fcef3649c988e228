//! Argument parsing and report writing for the `lattice-rot` binary.
//!
//! Every run writes exactly one report, CSV by default or JSON with
//! `--format json`. Timing goes into a separate `meta` block (JSON) or the
//! `elapsed_ms` column (CSV) and is left out entirely with `--no-timing`, so
//! the rest of the output is byte-identical across runs and thread counts.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use lattice_rot_core::angle::{resolve, AngleContext, AngleSpec};
use lattice_rot_core::census::{
    census, growth_fit, CensusError, CensusKind, CensusOptions, MethodChoice, DEFAULT_ORACLE_CAP,
};
use lattice_rot_core::exactnum::{set_default_precision_bits, Scalar, DEFAULT_PRECISION_BITS, PRECISION_CAP_BITS};
use lattice_rot_core::orbits::{
    detect_cycle, orbit_states, orbit_sweep, verify_period8, OrbitCaps, OrbitStatus, Period8Options, Period8Rule,
};
use lattice_rot_core::par::{with_threads, Exec};
use lattice_rot_core::rotation::{DiscreteRotation, LatticePoint, RoundingMode};
use lattice_rot_core::udist::{
    count_solutions, count_solutions_by_residue, gen_primitive_triples, InequalityBox, Parity,
};

pub const PRECISION_ENV: &str = "LATTICE_ROT_PRECISION_BITS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Classify {
        angle: AngleContext,
    },
    Census {
        angle: AngleContext,
        m: i64,
        kind: CensusKind,
        mode: RoundingMode,
        method: MethodChoice,
        /// Points in the JSON report.
        emit_points: bool,
        /// Points as an `x,y` CSV file.
        points_file: Option<PathBuf>,
        oracle_cap: i64,
    },
    Growth {
        angle: AngleContext,
        ms: Vec<i64>,
        kind: CensusKind,
        mode: RoundingMode,
        method: MethodChoice,
        oracle_cap: i64,
    },
    Udist {
        angle: AngleContext,
        t1: Scalar,
        t2: Scalar,
        m: i64,
        parity: Parity,
        by_residue: bool,
    },
    Pyth {
        q_max: i64,
    },
    Orbit {
        angle: AngleContext,
        start: LatticePoint,
        mode: RoundingMode,
        caps: OrbitCaps,
    },
    Sweep {
        angle: AngleContext,
        m: i64,
        mode: RoundingMode,
        caps: OrbitCaps,
    },
    Period8 {
        a_max: i64,
        /// Open interval endpoints.
        strict_boundary: bool,
        rule: Period8Rule,
        max_listed: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    pub format: Format,
    /// `None`: one worker per available core.
    pub threads: Option<usize>,
    pub precision_bits: u32,
    pub timing: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { format: Format::Csv, threads: None, precision_bits: DEFAULT_PRECISION_BITS, timing: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Invocation {
    pub command: Command,
    pub settings: Settings,
}

/// A rejected command line; `flag` names the offending option when known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsageError {
    pub flag: Option<String>,
    pub message: String,
    /// `--help` and `--version` end up here too, with exit code 0.
    pub exit_code: i32,
}

impl UsageError {
    fn flag(flag: &str, message: impl fmt::Display) -> Self {
        UsageError { flag: Some(flag.to_string()), message: format!("{flag}: {message}"), exit_code: 2 }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(
    name = "lattice-rot",
    version,
    about = "Collision and hole censuses, equidistribution counts and orbits of discretized rotations of Z²"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Report format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// key=value file with defaults for caps, precision and output settings.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Working precision for numeric angles, in bits.
    #[arg(long = "precision-bits", global = true)]
    precision_bits: Option<u32>,
    /// Leave elapsed times out of the report.
    #[arg(long = "no-timing", global = true)]
    no_timing: bool,
}

#[derive(Args, Debug, Clone)]
struct CapArgs {
    /// Step cap per orbit.
    #[arg(long = "max-steps")]
    max_steps: Option<u64>,
    /// Radius cap in the sup norm (default 10⁶·|start| + 10³).
    #[arg(long = "max-radius")]
    max_radius: Option<i64>,
    /// States remembered before switching to constant-memory detection.
    #[arg(long = "memory-limit")]
    memory_limit: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Exact sine, cosine and arithmetic class of an angle.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        angle: String,
    },
    /// Count collision points or holes in |n|, |m| ≤ M.
    Census {
        #[arg(long, allow_hyphen_values = true)]
        angle: String,
        #[arg(long = "M", short = 'M', allow_hyphen_values = true)]
        m: i64,
        #[arg(long, default_value = "collisions")]
        kind: CensusKind,
        #[arg(long, default_value = "floor")]
        mode: RoundingMode,
        /// auto, characterization or brute-force.
        #[arg(long, default_value = "auto")]
        method: MethodChoice,
        /// Same as `--method brute-force`.
        #[arg(long)]
        oracle: bool,
        /// Include the points in the JSON report.
        #[arg(long = "emit-points")]
        emit_points: bool,
        /// Write the points to FILE as `x,y` CSV.
        #[arg(long, value_name = "FILE")]
        points: Option<PathBuf>,
    },
    /// Fit the growth exponent of a census over several M.
    Growth {
        #[arg(long, allow_hyphen_values = true)]
        angle: String,
        #[arg(long = "Ms", value_delimiter = ',', default_value = "128,256,512,1024")]
        ms: Vec<i64>,
        #[arg(long, default_value = "collisions")]
        kind: CensusKind,
        #[arg(long, default_value = "floor")]
        mode: RoundingMode,
        #[arg(long, default_value = "auto")]
        method: MethodChoice,
        #[arg(long)]
        oracle: bool,
    },
    /// Count pairs whose two rotated coordinates have small fractional parts.
    Udist {
        #[arg(long, allow_hyphen_values = true)]
        angle: String,
        #[arg(long, default_value = "1/2")]
        t1: String,
        #[arg(long, default_value = "1/2")]
        t2: String,
        #[arg(long = "M", short = 'M', allow_hyphen_values = true)]
        m: i64,
        /// all or odd_odd.
        #[arg(long, default_value = "all")]
        parity: String,
        /// Count through residue classes (rational angles only).
        #[arg(long = "by-residue")]
        by_residue: bool,
    },
    /// Primitive Pythagorean triples with hypotenuse ≤ q_max.
    Pyth {
        #[arg(long = "qmax", alias = "q-max", allow_hyphen_values = true)]
        q_max: i64,
    },
    /// Preperiod and period of one orbit.
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        angle: String,
        /// Starting point `x,y`.
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, default_value = "floor")]
        mode: RoundingMode,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Period histogram over all starts in |x|, |y| ≤ M.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        angle: String,
        #[arg(long = "M", short = 'M', allow_hyphen_values = true)]
        m: i64,
        #[arg(long, default_value = "floor")]
        mode: RoundingMode,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Check the period-8 family (a, 0) at π/4.
    Period8 {
        #[arg(long = "amax", alias = "a-max", allow_hyphen_values = true)]
        a_max: i64,
        /// stated or proof-consistent interval for {a/√2}.
        #[arg(long, default_value = "stated")]
        rule: Period8Rule,
        /// Use open interval endpoints.
        #[arg(long = "strict-boundary")]
        strict_boundary: bool,
        /// Violations listed in the JSON report.
        #[arg(long = "max-listed", default_value_t = 100)]
        max_listed: usize,
    },
}

/// Settings from a `key = value` file; `#` starts a comment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub precision_bits: Option<u32>,
    pub no_timing: Option<bool>,
    pub max_steps: Option<u64>,
    pub max_radius: Option<i64>,
    pub memory_limit: Option<usize>,
    pub oracle_cap: Option<i64>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, UsageError> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |why: String| UsageError::flag("--config", format!("line {}: {why}", i + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            fn num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
                v.parse().map_err(|_| format!("`{v}` is not a valid number"))
            }
            let r: Result<(), String> = match key {
                "format" => Format::from_str(value, true).map(|f| c.format = Some(f)),
                "threads" => num(value).map(|v| c.threads = Some(v)),
                "precision_bits" => num(value).map(|v| c.precision_bits = Some(v)),
                "no_timing" => value.parse().map(|v| c.no_timing = Some(v)).map_err(|_| format!("`{value}` is not a bool")),
                "max_steps" => num(value).map(|v| c.max_steps = Some(v)),
                "max_radius" => num(value).map(|v| c.max_radius = Some(v)),
                "memory_limit" => num(value).map(|v| c.memory_limit = Some(v)),
                "oracle_cap" => num(value).map(|v| c.oracle_cap = Some(v)),
                _ => Err(format!("unknown key `{key}`")),
            };
            r.map_err(|why| bad(format!("{key}: {why}")))?;
        }
        Ok(c)
    }
}

/// Parses a command line (program name first), reading the precision
/// override from the process environment.
pub fn parse_args<I, T>(argv: I) -> Result<Invocation, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    parse_args_with_env(argv, |k| std::env::var(k).ok())
}

/// Precedence, lowest first: built-in defaults, config file, environment,
/// flags.
pub fn parse_args_with_env<I, T>(argv: I, env: impl Fn(&str) -> Option<String>) -> Result<Invocation, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        let exit_code = if e.use_stderr() { 2 } else { 0 };
        UsageError { flag: None, message: e.render().to_string(), exit_code }
    })?;
    let config = match &cli.global.config {
        Some(path) => read_config(path)?,
        None => Config::default(),
    };
    let env_bits = match env(PRECISION_ENV) {
        Some(v) => Some(v.trim().parse::<u32>().map_err(|_| UsageError::flag(PRECISION_ENV, format!("`{v}` is not a bit count")))?),
        None => None,
    };
    let precision_bits = cli.global.precision_bits.or(env_bits).or(config.precision_bits).unwrap_or(DEFAULT_PRECISION_BITS);
    if !(32..=PRECISION_CAP_BITS).contains(&precision_bits) {
        return Err(UsageError::flag("--precision-bits", format!("must lie in [32, {PRECISION_CAP_BITS}], got {precision_bits}")));
    }
    let threads = cli.global.threads.or(config.threads);
    if threads == Some(0) {
        return Err(UsageError::flag("--threads", "must be at least 1"));
    }
    let settings = Settings {
        format: cli.global.format.or(config.format).unwrap_or_default(),
        threads,
        precision_bits,
        timing: !(cli.global.no_timing || config.no_timing.unwrap_or(false)),
    };
    let angle = |text: &str| -> Result<AngleContext, UsageError> {
        AngleSpec::parse_with_precision(text, precision_bits)
            .and_then(resolve)
            .map_err(|e| UsageError::flag("--angle", e))
    };
    let oracle_cap = config.oracle_cap.unwrap_or(DEFAULT_ORACLE_CAP);
    let command = match cli.command {
        Sub::Classify { angle: a } => Command::Classify { angle: angle(&a)? },
        Sub::Census { angle: a, m, kind, mode, method, oracle, emit_points, points } => {
            positive("--M", m)?;
            let method = method_choice(method, oracle, mode)?;
            if emit_points && settings.format == Format::Csv && points.is_none() {
                return Err(UsageError::flag("--emit-points", "CSV reports carry no points; use --format json or --points FILE"));
            }
            Command::Census { angle: angle(&a)?, m, kind, mode, method, emit_points, points_file: points, oracle_cap }
        }
        Sub::Growth { angle: a, ms, kind, mode, method, oracle } => {
            if ms.len() < 3 {
                return Err(UsageError::flag("--Ms", "a fit needs at least three sizes"));
            }
            for &m in &ms {
                positive("--Ms", m)?;
            }
            let method = method_choice(method, oracle, mode)?;
            Command::Growth { angle: angle(&a)?, ms, kind, mode, method, oracle_cap }
        }
        Sub::Udist { angle: a, t1, t2, m, parity, by_residue } => {
            positive("--M", m)?;
            let side = |flag: &str, t: &str| t.parse::<Scalar>().map_err(|e| UsageError::flag(flag, e));
            let (t1, t2) = (side("--t1", &t1)?, side("--t2", &t2)?);
            InequalityBox::new(t1.clone(), t2.clone()).map_err(|e| UsageError::flag("--t1/--t2", e))?;
            let parity = parity.parse().map_err(|e| UsageError::flag("--parity", e))?;
            Command::Udist { angle: angle(&a)?, t1, t2, m, parity, by_residue }
        }
        Sub::Pyth { q_max } => {
            positive("--qmax", q_max)?;
            Command::Pyth { q_max }
        }
        Sub::Orbit { angle: a, start, mode, caps } => {
            let start = parse_point(&start).ok_or_else(|| UsageError::flag("--start", format!("expected x,y, got `{start}`")))?;
            Command::Orbit { angle: angle(&a)?, start, mode, caps: orbit_caps(&caps, &config)? }
        }
        Sub::Sweep { angle: a, m, mode, caps } => {
            positive("--M", m)?;
            Command::Sweep { angle: angle(&a)?, m, mode, caps: orbit_caps(&caps, &config)? }
        }
        Sub::Period8 { a_max, rule, strict_boundary, max_listed } => {
            positive("--amax", a_max)?;
            Command::Period8 { a_max, strict_boundary, rule, max_listed }
        }
    };
    Ok(Invocation { command, settings })
}

fn read_config(path: &Path) -> Result<Config, UsageError> {
    let text = fs::read_to_string(path).map_err(|e| UsageError::flag("--config", format!("{}: {e}", path.display())))?;
    Config::parse(&text)
}

fn positive(flag: &str, v: i64) -> Result<(), UsageError> {
    if v < 1 {
        return Err(UsageError::flag(flag, format!("must be positive, got {v}")));
    }
    Ok(())
}

fn method_choice(method: MethodChoice, oracle: bool, mode: RoundingMode) -> Result<MethodChoice, UsageError> {
    let method = if oracle { MethodChoice::BruteForce } else { method };
    if method == MethodChoice::Characterization && mode != RoundingMode::Floor {
        return Err(UsageError::flag("--method", format!("the characterization covers floor only, not {mode}")));
    }
    Ok(method)
}

fn parse_point(text: &str) -> Option<LatticePoint> {
    let t = text.trim().trim_start_matches('(').trim_end_matches(')');
    let (x, y) = t.split_once(',')?;
    Some(LatticePoint::new(x.trim().parse().ok()?, y.trim().parse().ok()?))
}

fn orbit_caps(args: &CapArgs, config: &Config) -> Result<OrbitCaps, UsageError> {
    let d = OrbitCaps::default();
    let caps = OrbitCaps {
        max_steps: args.max_steps.or(config.max_steps).unwrap_or(d.max_steps),
        max_radius: args.max_radius.or(config.max_radius),
        memory_limit: args.memory_limit.or(config.memory_limit).unwrap_or(d.memory_limit),
    };
    if caps.max_steps < 1 {
        return Err(UsageError::flag("--max-steps", "must be positive"));
    }
    if let Some(r) = caps.max_radius {
        positive("--max-radius", r)?;
    }
    if caps.memory_limit < 1 {
        return Err(UsageError::flag("--memory-limit", "must be positive"));
    }
    Ok(caps)
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<CensusError> for Failure {
    fn from(e: CensusError) -> Self {
        match e {
            CensusError::UnsupportedMode(_) | CensusError::InvalidInput(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

fn compute<E: fmt::Display>(e: E) -> Failure {
    Failure::Compute(e.to_string())
}

/// Parses and runs; returns the process exit code.
pub fn main_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(argv) {
        Ok(inv) => run(&inv, out, err),
        Err(e) if e.exit_code == 0 => {
            let _ = out.write_all(e.message.as_bytes());
            0
        }
        Err(e) => {
            let msg = e.message.trim_end();
            let _ = writeln!(err, "{}", if e.flag.is_some() { format!("error: {msg}") } else { msg.to_string() });
            e.exit_code
        }
    }
}

/// Runs a parsed command and writes its report to `out` in one piece.
/// Exit codes: 0 success, 1 computational failure, 2 usage error.
pub fn run(inv: &Invocation, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    // the process-wide default governs high-precision values created later
    set_default_precision_bits(inv.settings.precision_bits);
    let result = with_threads(inv.settings.threads, || execute(&inv.command, &inv.settings));
    match result {
        Ok(bytes) => match out.write_all(&bytes).and_then(|_| out.flush()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: writing report: {e}");
                1
            }
        },
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Compute(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn execute(cmd: &Command, s: &Settings) -> Result<Vec<u8>, Failure> {
    let start = Instant::now();
    let elapsed = || start.elapsed().as_secs_f64() * 1e3;
    let exec = Exec::Parallel;
    match cmd {
        Command::Classify { angle } => {
            let quadrant = angle.quadrant().map_err(compute)?.map(|q| format!("{q:?}").to_lowercase());
            match s.format {
                Format::Json => {
                    let mut v = to_value(angle);
                    v["quadrant"] = json!(quadrant);
                    Ok(json_report(v, s, elapsed()))
                }
                Format::Csv => csv_report(
                    &["angle", "sin", "cos", "class", "exceptional", "quadrant"],
                    vec![vec![
                        angle.label(),
                        angle.sin.to_string(),
                        angle.cos.to_string(),
                        angle.class.name().to_string(),
                        angle.class.is_exceptional().to_string(),
                        quadrant.unwrap_or_default(),
                    ]],
                ),
            }
        }
        Command::Census { angle, m, kind, mode, method, emit_points, points_file, oracle_cap } => {
            let keep = *emit_points || points_file.is_some();
            let opts = CensusOptions { method: *method, keep_points: keep, exec, oracle_cap: *oracle_cap };
            let report = census(angle, *m, *mode, *kind, &opts)?;
            if let (Some(path), Some(points)) = (points_file, &report.points) {
                let rows = points.iter().map(|p| vec![p.x.to_string(), p.y.to_string()]).collect();
                let bytes = csv_report(&["x", "y"], rows)?;
                fs::write(path, bytes).map_err(|e| Failure::Compute(format!("{}: {e}", path.display())))?;
            }
            match s.format {
                Format::Json => {
                    let mut v = to_value(&report);
                    let obj = v.as_object_mut().expect("report is an object");
                    obj.remove("elapsed_ms");
                    if !emit_points {
                        obj.remove("points");
                    }
                    Ok(json_report(v, s, report.elapsed_ms))
                }
                Format::Csv => csv_report(
                    &["angle", "mode", "kind", "M", "count", "method", "elapsed_ms"],
                    vec![vec![
                        angle.label(),
                        mode.to_string(),
                        report.kind.to_string(),
                        m.to_string(),
                        report.count.to_string(),
                        report.method.to_string(),
                        timing(s, report.elapsed_ms),
                    ]],
                ),
            }
        }
        Command::Growth { angle, ms, kind, mode, method, oracle_cap } => {
            let opts = CensusOptions { method: *method, keep_points: false, exec, oracle_cap: *oracle_cap };
            let fit = growth_fit(angle, ms, *mode, *kind, &opts)?;
            match s.format {
                Format::Json => {
                    let mut v = json!({ "angle": angle, "mode": mode, "kind": kind });
                    merge(&mut v, to_value(&fit));
                    Ok(json_report(v, s, elapsed()))
                }
                Format::Csv => {
                    let rows = fit
                        .ms
                        .iter()
                        .zip(&fit.counts)
                        .map(|(m, c)| {
                            vec![
                                angle.label(),
                                mode.to_string(),
                                kind.to_string(),
                                m.to_string(),
                                c.to_string(),
                                fit.exponent.to_string(),
                                fit.r_squared.to_string(),
                            ]
                        })
                        .collect();
                    csv_report(&["angle", "mode", "kind", "M", "count", "exponent", "r_squared"], rows)
                }
            }
        }
        Command::Udist { angle, t1, t2, m, parity, by_residue } => {
            let bx = InequalityBox::new(t1.clone(), t2.clone()).map_err(|e| Failure::Usage(e.to_string()))?;
            let count = if *by_residue {
                count_solutions_by_residue(angle, &bx, *m, *parity).map_err(|e| Failure::Usage(e.to_string()))?
            } else {
                count_solutions(angle, &bx, *m, *parity, exec).map_err(compute)?
            };
            let candidates = parity.candidates(*m);
            let ratio = count as f64 / candidates as f64;
            match s.format {
                Format::Json => {
                    let v = json!({
                        "angle": angle, "t1": t1, "t2": t2, "M": m, "parity": parity,
                        "count": count, "candidates": candidates, "ratio": ratio,
                        "method": if *by_residue { "residue" } else { "direct" },
                    });
                    Ok(json_report(v, s, elapsed()))
                }
                Format::Csv => csv_report(
                    &["angle", "t1", "t2", "M", "parity", "count", "ratio"],
                    vec![vec![
                        angle.label(),
                        t1.to_string(),
                        t2.to_string(),
                        m.to_string(),
                        parity.to_string(),
                        count.to_string(),
                        ratio.to_string(),
                    ]],
                ),
            }
        }
        Command::Pyth { q_max } => {
            let triples = gen_primitive_triples(*q_max);
            match s.format {
                Format::Json => Ok(json_report(json!({ "q_max": q_max, "triples": triples }), s, elapsed())),
                Format::Csv => {
                    let rows = triples
                        .iter()
                        .map(|t| [t.q, t.u, t.v, t.p1, t.p2, t.h].iter().map(i64::to_string).collect())
                        .collect();
                    csv_report(&["q", "u", "v", "p1", "p2", "h"], rows)
                }
            }
        }
        Command::Orbit { angle, start, mode, caps } => {
            let rec = detect_cycle(angle, *start, *mode, caps).map_err(compute)?;
            let shown = match rec.period {
                Some(p) => rec.preperiod + p,
                None => rec.steps_used,
            };
            let states = orbit_states(&DiscreteRotation::new(angle, *mode), *start, shown).map_err(compute)?;
            match s.format {
                Format::Json => {
                    let mut v = json!({ "angle": angle, "mode": mode });
                    merge(&mut v, to_value(&rec));
                    if rec.status == OrbitStatus::Periodic {
                        v["orbit"] = to_value(&states);
                    }
                    Ok(json_report(v, s, elapsed()))
                }
                Format::Csv => {
                    let rows = states
                        .iter()
                        .enumerate()
                        .map(|(i, p)| vec![i.to_string(), p.x.to_string(), p.y.to_string()])
                        .collect();
                    csv_report(&["step", "x", "y"], rows)
                }
            }
        }
        Command::Sweep { angle, m, mode, caps } => {
            let summary = orbit_sweep(angle, *m, *mode, caps, exec).map_err(compute)?;
            match s.format {
                Format::Json => {
                    let mut v = json!({ "angle": angle });
                    merge(&mut v, to_value(&summary));
                    Ok(json_report(v, s, elapsed()))
                }
                Format::Csv => {
                    let row = |outcome: &str, period: String, count: u64| {
                        vec![angle.label(), mode.to_string(), m.to_string(), outcome.to_string(), period, count.to_string()]
                    };
                    let mut rows: Vec<Vec<String>> =
                        summary.histogram.iter().map(|(p, c)| row("periodic", p.to_string(), *c)).collect();
                    rows.push(row("undetermined", String::new(), summary.undetermined));
                    rows.push(row("escaped", String::new(), summary.escaped));
                    csv_report(&["angle", "mode", "M", "outcome", "period", "count"], rows)
                }
            }
        }
        Command::Period8 { a_max, strict_boundary, rule, max_listed } => {
            let opts = Period8Options { rule: *rule, closed: !strict_boundary };
            let report = verify_period8(*a_max, &opts, exec).map_err(compute)?;
            match s.format {
                Format::Json => {
                    let mut v = to_value(&report);
                    v["passed"] = json!(report.passed());
                    v["violation_count"] = json!(report.violations.len());
                    if let Some(list) = v.get_mut("violations").and_then(Value::as_array_mut) {
                        list.truncate(*max_listed);
                    }
                    Ok(json_report(v, s, elapsed()))
                }
                Format::Csv => {
                    let boundary: Vec<String> = report.boundary.iter().map(i64::to_string).collect();
                    csv_report(
                        &["a_max", "rule", "endpoints", "candidates", "verified", "boundary", "violations"],
                        vec![vec![
                            a_max.to_string(),
                            rule.to_string(),
                            if *strict_boundary { "open" } else { "closed" }.to_string(),
                            report.candidates.to_string(),
                            report.verified.to_string(),
                            boundary.join(" "),
                            report.violations.len().to_string(),
                        ]],
                    )
                }
            }
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn merge(into: &mut Value, from: Value) {
    if let (Some(a), Value::Object(b)) = (into.as_object_mut(), from) {
        a.extend(b);
    }
}

fn timing(s: &Settings, ms: f64) -> String {
    if s.timing {
        format!("{ms:.3}")
    } else {
        String::new()
    }
}

fn json_report(mut v: Value, s: &Settings, elapsed_ms: f64) -> Vec<u8> {
    if s.timing {
        let mut meta = Map::new();
        meta.insert("elapsed_ms".into(), json!((elapsed_ms * 1e3).round() / 1e3));
        v["meta"] = Value::Object(meta);
    }
    let mut bytes = serde_json::to_vec_pretty(&v).expect("reports serialize");
    bytes.push(b'\n');
    bytes
}

fn csv_report(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(compute)?;
    for r in rows {
        w.write_record(&r).map_err(compute)?;
    }
    w.into_inner().map_err(compute)
}
