//! Batch front end. Exit codes: 0 success, 1 check or solve failure,
//! 2 configuration or usage error, 3 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::error::{Error, Result};
use crate::field::{self, NewtonOptions};
use crate::frac::{self, FracBackend, FracOrder};
use crate::grid::{format_real as num, sample, Domain, GridFunction};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Largest grid accepted by `bench`.
pub const BENCH_LIMIT: usize = 1 << 20;

#[derive(Debug, Parser)]
#[command(name = "multifrac", version, about = "Multiscale fractional calculus from a single config file")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(short, long, global = true, default_value = "multifrac.toml")]
    pub config: PathBuf,
    /// Output directory, overriding `output.directory`.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate q, v and the local scaling exponent of the profile.
    Measure {
        #[arg(long, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Logarithmic spacing (requires 0 < x-min).
        #[arg(long)]
        log: bool,
    },
    /// Apply a named operator to a function on the configured domain.
    Deriv {
        #[arg(long)]
        operator: String,
        /// Name from `[functions]` or an inline spec like "gaussian sigma=0.5".
        #[arg(long)]
        function: String,
    },
    /// Run the property verification suite.
    Verify {
        /// Glob over check names, e.g. "leibniz*".
        #[arg(long)]
        checks: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve the static field equation.
    Solve {
        #[arg(long)]
        operator: Option<String>,
    },
    /// Compare backend accuracy and runtime against the spectral reference.
    Bench {
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::UnknownSpec(_)
        | Error::InvalidDomain(_)
        | Error::InvalidProfile(_)
        | Error::InvalidBackend(_)
        | Error::BackendDomainMismatch { .. }
        | Error::OrderOutOfRange { .. }
        | Error::InconsistentHierarchy { .. }
        | Error::ProfileRequired(_)
        | Error::NoSolvePath
        | Error::Io(_) => EXIT_CONFIG,
        Error::SingularPoint { .. }
        | Error::DomainMismatch
        | Error::TooLarge { .. }
        | Error::NegativeWeight { .. }
        | Error::QuadratureFailure(_)
        | Error::OscillatoryProfileRejected
        | Error::NotDiagonalizable(_)
        | Error::ResonantMode { .. }
        | Error::SingularJacobian { .. } => EXIT_NUMERICAL,
    }
}

/// Parse arguments, honour `MULTIFRAC_THREADS` and run; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let threads = match std::env::var("MULTIFRAC_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Some(n),
            _ => {
                eprintln!("error: MULTIFRAC_THREADS must be a positive integer, got '{v}'");
                return EXIT_CONFIG;
            }
        },
        Err(_) => None,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    match pool.build() {
        Ok(pool) => pool.install(|| run(&cli)),
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            EXIT_CONFIG
        }
    }
}

pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Files produced by a command, written together at the end.
struct Outputs {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Outputs {
    fn add(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body));
    }

    fn commit(self) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        for (name, body) in &self.files {
            write_atomic(&self.dir.join(name), body.as_bytes())?;
        }
        Ok(())
    }
}

/// Write through a temporary file in the same directory and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("output");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn execute(cli: &Cli) -> Result<bool> {
    let cfg = RunConfig::load(&cli.config)?;
    let mut out =
        Outputs { dir: cli.output.clone().unwrap_or_else(|| cfg.output.directory.clone()), files: Vec::new() };
    let ok = match &cli.command {
        Command::Measure { x_min, x_max, points, log } => cmd_measure(&cfg, *x_min, *x_max, *points, *log, &mut out)?,
        Command::Deriv { operator, function } => cmd_deriv(&cfg, operator, function, &mut out)?,
        Command::Verify { checks, seed } => cmd_verify(&cfg, checks.as_deref(), *seed, &mut out)?,
        Command::Solve { operator } => cmd_solve(&cfg, operator.as_deref(), &mut out)?,
        Command::Bench { sizes, repeats } => cmd_bench(&cfg, sizes.as_deref(), *repeats, &mut out)?,
    };
    out.commit()?;
    Ok(ok)
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn cmd_measure_csv(cfg: &RunConfig, x_min: f64, x_max: f64, points: usize, log: bool) -> Result<String> {
    let profile = cfg.profile()?;
    if points < 2 {
        return Err(Error::Config("--points must be at least 2".into()));
    }
    if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
        return Err(Error::Config(format!("--x-min {x_min} must be below --x-max {x_max}")));
    }
    if log && x_min <= 0.0 {
        return Err(Error::Config("--log needs a positive --x-min".into()));
    }
    let xs = (0..points).map(|i| {
        let t = i as f64 / (points - 1) as f64;
        if i == 0 {
            x_min
        } else if i == points - 1 {
            x_max
        } else if log {
            x_min * (x_max / x_min).powf(t)
        } else {
            x_min + t * (x_max - x_min)
        }
    });
    let mut rows = Vec::with_capacity(points);
    for x in xs {
        let v = profile.weight(x)?;
        let a = profile.local_scaling_exponent(x)?;
        rows.push(vec![num(x), num(profile.q(x)), num(v), num(a)]);
    }
    csv_string(&["x", "q", "v", "alpha_eff"], rows)
}

fn cmd_measure(cfg: &RunConfig, x_min: f64, x_max: f64, points: usize, log: bool, out: &mut Outputs) -> Result<bool> {
    let body = cmd_measure_csv(cfg, x_min, x_max, points, log)?;
    write_or_print(cfg, out, "measure.csv", body);
    Ok(true)
}

/// CSV goes to a file when `csv` is among the output formats, to stdout
/// otherwise.
fn write_or_print(cfg: &RunConfig, out: &mut Outputs, name: &str, body: String) {
    if cfg.output.wants(Format::Csv) {
        out.add(name, body);
    } else {
        print!("{body}");
    }
}

pub fn cmd_deriv_csv(cfg: &RunConfig, operator: &str, function: &str) -> Result<String> {
    let op = cfg.operator(operator)?;
    let spec = cfg.function(function)?;
    let d = cfg.domain()?;
    if let Some(w) = op.backend.warning() {
        eprintln!("warning: {w}");
    }
    let f = sample(&spec, &d)?;
    let g = op.apply(&f)?;
    let rows = (0..d.n()).map(|j| vec![num(d.x(j)), num(f[j].re), num(f[j].im), num(g[j].re), num(g[j].im)]);
    csv_string(&["x", "re_in", "im_in", "re_out", "im_out"], rows)
}

fn cmd_deriv(cfg: &RunConfig, operator: &str, function: &str, out: &mut Outputs) -> Result<bool> {
    let body = cmd_deriv_csv(cfg, operator, function)?;
    write_or_print(cfg, out, "deriv.csv", body);
    Ok(true)
}

fn cmd_verify(cfg: &RunConfig, checks: Option<&str>, seed: Option<u64>, out: &mut Outputs) -> Result<bool> {
    let mut suite = cfg.suite.clone();
    if let Some(glob) = checks {
        suite.checks = Some(vec![glob.to_string()]);
    }
    if let Some(s) = seed {
        suite.seed = s;
    }
    let report = verify::run_suite(&suite)?;
    let table = report.to_table();
    print!("{table}");
    if cfg.output.wants(Format::Csv) {
        out.add("report.csv", report.to_csv()?);
    }
    if cfg.output.wants(Format::Txt) {
        out.add("report.txt", table);
    }
    Ok(report.all_passed())
}

fn cmd_solve(cfg: &RunConfig, operator: Option<&str>, out: &mut Outputs) -> Result<bool> {
    let solve = cfg.solve.as_ref().ok_or_else(|| Error::Config("missing [solve] block".into()))?;
    let name = operator
        .or(solve.operator.as_deref())
        .ok_or_else(|| Error::Config("no operator: pass --operator or set solve.operator".into()))?;
    let op = cfg.operator(name)?;
    if op.kind.is_implicit() {
        return Err(Error::NoSolvePath);
    }
    let d = cfg.domain()?;
    let pot = cfg.potential()?;
    let (res, method) = if solve.quartic == 0.0 && solve.guess.is_none() {
        let spectral = d.is_periodic() && op.discrete_symbol(&d).is_ok();
        (field::solve_linear(&op, &pot, &d)?, if spectral { "spectral" } else { "dense" })
    } else {
        let guess = match &solve.guess {
            Some(g) => sample(g, &d)?,
            None => GridFunction::zeros(d),
        };
        let opts = NewtonOptions { tol: solve.tol, max_iter: solve.max_iter, pinned_ends: solve.pinned_ends };
        (field::solve_nonlinear(&op, &pot, &guess, opts)?, "newton")
    };
    let summary = json!({
        "operator": name,
        "spec": serde_json::to_value(&op.kind).map_err(|e| Error::Io(e.to_string()))?,
        "weight": if op.weight.is_flat() { "flat" } else { "profile" },
        "backend": serde_json::to_value(op.backend).map_err(|e| Error::Io(e.to_string()))?,
        "method": method,
        "mass2": solve.mass2,
        "quartic": solve.quartic,
        "residual_norm": res.residual_norm,
        "iterations": res.iterations,
        "converged": res.converged,
        "history": res.history,
    });
    let summary = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))? + "\n";
    eprintln!(
        "{method} solve: residual {:.3e}, {} iteration(s), {}",
        res.residual_norm,
        res.iterations,
        if res.converged { "converged" } else { "not converged" }
    );
    if cfg.output.wants(Format::Csv) {
        let mut body = Vec::new();
        res.phi.write_csv(&mut body, &format!("solution of {name}"))?;
        out.add("solution.csv", String::from_utf8(body).map_err(|e| Error::Io(e.to_string()))?);
    }
    if cfg.output.wants(Format::Json) {
        out.add("summary.json", summary);
    } else {
        print!("{summary}");
    }
    Ok(res.converged)
}

/// One benchmark cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub backend: String,
    pub n: usize,
    pub wall_time: f64,
    pub max_error: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn bench_rows(cfg: &RunConfig, sizes: &[usize], repeats: usize) -> Result<Vec<BenchRow>> {
    if repeats == 0 {
        return Err(Error::Config("--repeats must be at least 1".into()));
    }
    if sizes.is_empty() {
        return Err(Error::Config("--sizes must not be empty".into()));
    }
    if let Some(&n) = sizes.iter().find(|&&n| !(4..=BENCH_LIMIT).contains(&n)) {
        return Err(Error::Config(format!("--sizes: {n} outside [4, {BENCH_LIMIT}]")));
    }
    let base = cfg.domain()?;
    if !base.is_periodic() {
        return Err(Error::Config("bench compares against the spectral backend and needs a periodic [domain]".into()));
    }
    let b = &cfg.bench;
    let order = FracOrder::new(b.alpha)?;
    let mut rows = Vec::new();
    for backend in &b.backends {
        for &n in sizes {
            let d = Domain::periodic(base.a(), base.b(), n)?.with_offset(base.offset())?;
            let f = sample(&b.function, &d)?;
            let reference = frac::fractional(&f, order, b.side, FracBackend::Spectral)?;
            let mut times = Vec::with_capacity(repeats);
            let mut result = None;
            for _ in 0..repeats {
                let t = Instant::now();
                let r = frac::fractional(&f, order, b.side, *backend)?;
                times.push(t.elapsed().as_secs_f64());
                result = Some(r);
            }
            let max_error = result.expect("repeats >= 1").max_abs_diff(&reference)?;
            rows.push(BenchRow { backend: backend.name().to_string(), n, wall_time: median(times), max_error });
        }
    }
    Ok(rows)
}

/// Least-squares slope of `−log(error)` against `log(n)` for one backend.
pub fn fitted_order(rows: &[BenchRow], backend: &str) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.backend == backend && r.max_error > 0.0)
        .map(|r| ((r.n as f64).ln(), r.max_error.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(-num / den)
}

fn cmd_bench(cfg: &RunConfig, sizes: Option<&[usize]>, repeats: usize, out: &mut Outputs) -> Result<bool> {
    let sizes = sizes.unwrap_or(&cfg.bench.sizes);
    let rows = bench_rows(cfg, sizes, repeats)?;
    let body = csv_string(
        &["backend", "n", "wall_time", "max_error_vs_spectral"],
        rows.iter().map(|r| vec![r.backend.clone(), r.n.to_string(), num(r.wall_time), num(r.max_error)]),
    )?;
    let mut summary = String::new();
    for backend in &cfg.bench.backends {
        if *backend == FracBackend::Spectral {
            continue;
        }
        if let Some(p) = fitted_order(&rows, backend.name()) {
            let _ = writeln!(summary, "{}: fitted convergence order {p:.3}", backend.name());
        }
    }
    print!("{summary}");
    write_or_print(cfg, out, "bench.csv", body);
    Ok(true)
}
