//! The `isovert` command line.
//!
//! Exit codes: 0 on success, 1 when a bound, identity or self-check fails,
//! 2 on a usage error. Diagnostics go to stderr.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bounds::{
    chernoff_right, corollary_k, h_closed, left_tail_bound, log_negative_theta_mgf_bound, piecewise_right,
    raic_bound, BoundPoint, Method,
};
use crate::coupling::{coupling_diagnostics, DiagnosticsOptions};
use crate::enumerate::{enumerate_coupling_pmf, enumerate_pmf, DEFAULT_COUPLING_CAP, DEFAULT_PMF_CAP};
use crate::error::{Error, Result};
use crate::model::Params;
use crate::montecarlo::{domination_report, estimate_tails, MCConfig, TailEstimate};
use crate::output::{emit, pretty, to_json_value, Cell, RunManifest, Table};
use crate::pmf::size_bias_transform;
use crate::rng::DEFAULT_SEED;
use crate::verify::{self, Level};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_T_GRID: &str = "0.25:5:0.25";
const DEFAULT_SAMPLES: u64 = 100_000;

#[derive(Debug, Parser)]
#[command(name = "isovert", version, about = "Concentration bounds for isolated vertices of G(n,p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the mean and variance of Y
    Moments(ModelArgs),
    /// Exact law, size-biased law and MGF domination table by enumeration
    Oracle(OracleArgs),
    /// Evaluate every bound on a t-grid
    Bounds(BoundsArgs),
    /// Optimized Chernoff bound at a single t
    Chernoff(ChernoffArgs),
    /// Monte Carlo tail estimates with Wilson intervals
    Simulate(SimulateArgs),
    /// Size-bias coupling diagnostics
    Couple(CoupleArgs),
    /// Uniform constant k for p = c/n over an n-grid
    Corollary(CorollaryArgs),
    /// Bounds next to simulated tails, with domination flags
    Compare(CompareArgs),
    /// Run the self-check suite
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: f64,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct SamplingArgs {
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Defaults to the available parallelism; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_PMF_CAP)]
    enum_cap: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// `a:b:step` or a comma-separated list
    #[arg(long, default_value = DEFAULT_T_GRID)]
    t_grid: String,
    /// Defaults to σ.
    #[arg(long)]
    theta0: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ChernoffArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    t: f64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = DEFAULT_T_GRID)]
    t_grid: String,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct CoupleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Keep whole adjacency lists and check the degree-one identity
    #[arg(long)]
    full_adjacency: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct CorollaryArgs {
    #[arg(long)]
    c: f64,
    /// Comma-separated list of n
    #[arg(long, default_value = "10,100,1000,10000")]
    n_grid: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value = DEFAULT_T_GRID)]
    t_grid: String,
    #[arg(long)]
    theta0: Option<f64>,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Smaller grids and sample counts
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
}

/// Parses `a:b:step` (inclusive of `b` up to rounding) or `x,y,z`.
pub fn parse_t_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |what: &str| Error::Config(format!("bad t-grid '{text}': {what}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let grid = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected a:b:step"));
        }
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        let ordered = step > 0.0 && b >= a && a.is_finite() && b.is_finite();
        if !ordered {
            return Err(bad("need a ≤ b and step > 0"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        (0..=count).map(|i| a + i as f64 * step).collect()
    } else {
        text.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    crate::montecarlo::validate_grid(&grid)?;
    Ok(grid)
}

pub fn parse_n_grid(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad n-grid entry '{s}'")))
        })
        .collect()
}

fn workers(requested: Option<usize>) -> Result<usize> {
    match requested {
        Some(0) => Err(Error::Config("workers must be ≥ 1".into())),
        Some(w) => Ok(w),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn params(m: &ModelArgs) -> Result<Params> {
    Params::new(m.n, m.p)
}

fn flag(b: bool) -> u8 {
    u8::from(b)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run(args: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(ok) => {
            if ok {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// `Ok(false)` signals a failed check.
fn dispatch(command: Command) -> Result<bool> {
    let started = Instant::now();
    match command {
        Command::Moments(a) => {
            let m = params(&a)?.moments();
            println!("mu={} sigma2={}", m.mu, m.sigma2);
            Ok(true)
        }
        Command::Chernoff(a) => {
            let pr = params(&a.model)?;
            if !a.t.is_finite() || a.t < 0.0 {
                return Err(Error::Config(format!("t must be finite and ≥ 0 (got {})", a.t)));
            }
            let b = chernoff_right(&pr, &pr.moments(), a.t);
            println!("theta={} bound={}", b.theta_star.unwrap_or(0.0), b.bound());
            Ok(true)
        }
        Command::Oracle(a) => oracle(a, started),
        Command::Bounds(a) => bounds(a, started),
        Command::Simulate(a) => simulate(a, started),
        Command::Couple(a) => couple(a, started),
        Command::Corollary(a) => corollary(a, started),
        Command::Compare(a) => compare(a, started),
        Command::Verify(a) => {
            let level = if a.quick { Level::Quick } else { Level::Full };
            let checks = verify::run(level, a.seed, workers(a.workers)?)?;
            for c in &checks {
                println!("{c}");
            }
            Ok(checks.iter().all(|c| c.pass))
        }
    }
}

fn model_manifest(command: &str, pr: &Params) -> RunManifest {
    RunManifest::new(command).param("n", pr.n()).param("p", pr.p())
}

fn finish(table: &Table, output: &OutputArgs, mut manifest: RunManifest, started: Instant) -> Result<()> {
    manifest.duration_secs = started.elapsed().as_secs_f64();
    let body = match output.format {
        Format::Csv => table.to_csv()?,
        Format::Json => pretty(&json!({
            "manifest": manifest.reproducible(),
            "columns": table.columns,
            "rows": table.to_json_rows(),
        })),
    };
    emit(&body, output.out.as_deref(), &manifest)
}

fn oracle(a: OracleArgs, started: Instant) -> Result<bool> {
    let pr = params(&a.model)?;
    let m = pr.moments();
    let pmf = enumerate_pmf(&pr, a.enum_cap)?;
    let sb = size_bias_transform(&pmf)?;
    let coupling = if pr.n() <= a.enum_cap.min(DEFAULT_COUPLING_CAP) {
        Some(enumerate_coupling_pmf(&pr, a.enum_cap)?.ys_marginal())
    } else {
        None
    };

    let mut table = Table::new(vec!["kind", "x", "value", "reference", "pass"]);
    let mut ok = true;
    for (k, pk) in pmf.iter() {
        table.push(vec!["pmf".into(), Cell::Num(k as f64), pk.into(), Cell::Empty, Cell::Empty]);
    }
    for (k, qk) in sb.iter() {
        let reference = coupling.as_ref().map(|c| c.prob(k));
        let pass = reference.map(|r| (r - qk).abs() <= 1e-10);
        ok &= pass.unwrap_or(true);
        table.push(vec![
            "size_bias".into(),
            Cell::Num(k as f64),
            qk.into(),
            reference.into(),
            pass.map_or(Cell::Empty, |b| Cell::Int(flag(b).into())),
        ]);
    }
    for i in 1..=50 {
        let theta = 5.0 * m.sigma * i as f64 / 50.0;
        let (lhs, rhs) = (pmf.log_mgf_standardized(&m, theta), h_closed(&pr, &m, theta));
        ok &= lhs <= rhs;
        table.push(vec!["log_mgf_positive".into(), theta.into(), lhs.into(), rhs.into(), Cell::Int(flag(lhs <= rhs).into())]);
    }
    for i in 1..=50 {
        let theta = -5.0 * i as f64 / 50.0;
        let (lhs, rhs) = (pmf.log_mgf_standardized(&m, theta), log_negative_theta_mgf_bound(&m, theta)?);
        ok &= lhs <= rhs;
        table.push(vec!["log_mgf_negative".into(), theta.into(), lhs.into(), rhs.into(), Cell::Int(flag(lhs <= rhs).into())]);
    }
    let manifest = model_manifest("oracle", &pr).param("enum_cap", a.enum_cap);
    finish(&table, &a.output, manifest, started)?;
    Ok(ok)
}

fn all_bounds(pr: &Params, grid: &[f64], theta0: Option<f64>) -> Result<Vec<[BoundPoint; 4]>> {
    let m = pr.moments();
    let theta0 = theta0.unwrap_or(m.sigma);
    grid.iter()
        .map(|&t| {
            Ok([
                chernoff_right(pr, &m, t),
                piecewise_right(pr, &m, t, theta0)?,
                left_tail_bound(&m, t),
                raic_bound(pr, &m, t).0,
            ])
        })
        .collect()
}

fn bounds(a: BoundsArgs, started: Instant) -> Result<bool> {
    let pr = params(&a.model)?;
    let grid = parse_t_grid(&a.t_grid)?;
    let mut table = Table::new(vec!["t", "method", "log_bound", "bound", "theta_star", "clipped"]);
    for row in all_bounds(&pr, &grid, a.theta0)? {
        for b in row {
            table.push(vec![
                b.t.into(),
                b.method.name().into(),
                b.log_bound.into(),
                b.bound().into(),
                b.theta_star.into(),
                Cell::Int(flag(b.clipped()).into()),
            ]);
        }
    }
    let theta0 = a.theta0.unwrap_or(pr.moments().sigma);
    let manifest = model_manifest("bounds", &pr).param("t_grid", &grid).param("theta0", theta0);
    finish(&table, &a.output, manifest, started)?;
    Ok(true)
}

fn sampling_manifest(command: &str, pr: &Params, s: &SamplingArgs, workers: usize) -> RunManifest {
    let mut m = model_manifest(command, pr).param("samples", s.samples);
    m.seed = Some(s.seed);
    m.workers = Some(workers);
    m
}

fn simulate(a: SimulateArgs, started: Instant) -> Result<bool> {
    let pr = params(&a.model)?;
    let grid = parse_t_grid(&a.t_grid)?;
    let w = workers(a.sampling.workers)?;
    let config = MCConfig {
        samples: a.sampling.samples,
        seed: a.sampling.seed,
        workers: w,
        t_grid: grid.clone(),
    };
    let report = estimate_tails(&pr, &pr.moments(), &config)?;
    let mut table = Table::new(vec!["t", "side", "trials", "successes", "p_hat", "ci_low", "ci_high"]);
    for e in report.right.iter().chain(&report.left) {
        let side = match e.side {
            crate::bounds::Side::Right => "right",
            crate::bounds::Side::Left => "left",
        };
        table.push(vec![
            e.t.into(),
            side.into(),
            e.trials.into(),
            e.successes.into(),
            e.p_hat.into(),
            e.ci_low.into(),
            e.ci_high.into(),
        ]);
    }
    let manifest = sampling_manifest("simulate", &pr, &a.sampling, w).param("t_grid", &grid);
    finish(&table, &a.output, manifest, started)?;
    Ok(true)
}

fn couple(a: CoupleArgs, started: Instant) -> Result<bool> {
    let pr = params(&a.model)?;
    let w = workers(a.sampling.workers)?;
    let report = coupling_diagnostics(
        &pr,
        a.sampling.samples,
        a.sampling.seed,
        DiagnosticsOptions {
            workers: w,
            full_adjacency: a.full_adjacency,
        },
    )?;
    let mut manifest = sampling_manifest("couple", &pr, &a.sampling, w).param("full_adjacency", a.full_adjacency);
    manifest.duration_secs = started.elapsed().as_secs_f64();
    let body = match a.format {
        Format::Csv => report.to_text(),
        Format::Json => pretty(&json!({
            "manifest": manifest.reproducible(),
            "report": to_json_value(&report),
            "passed": report.passed(),
        })),
    };
    emit(&body, a.out.as_deref(), &manifest)?;
    Ok(report.passed())
}

fn corollary(a: CorollaryArgs, started: Instant) -> Result<bool> {
    let n_grid = parse_n_grid(&a.n_grid)?;
    let r = corollary_k(a.c, &n_grid)?;
    let mut table = Table::new(vec!["n", "p", "mu", "sigma2", "theta_n", "log_gamma", "ratio", "a0", "k"]);
    for row in &r.rows {
        table.push(vec![
            row.n.into(),
            row.p.into(),
            row.mu.into(),
            row.sigma2.into(),
            row.theta_n.into(),
            row.log_gamma.into(),
            row.ratio.into(),
            r.a0.into(),
            r.k.into(),
        ]);
    }
    let manifest = RunManifest::new("corollary").param("c", a.c).param("n_grid", &n_grid);
    finish(&table, &a.output, manifest, started)?;
    Ok(r.k > 0.0)
}

/// Column order of the `compare` table.
pub const COMPARE_COLUMNS: [&str; 11] = [
    "t",
    "p_hat_right",
    "ci_low",
    "ci_high",
    "log_chernoff",
    "theta_star",
    "log_piecewise",
    "log_left_at_minus_t",
    "log_raic",
    "clipped_flags",
    "pass_flags",
];

fn compare(a: CompareArgs, started: Instant) -> Result<bool> {
    let pr = params(&a.model)?;
    let m = pr.moments();
    let grid = parse_t_grid(&a.t_grid)?;
    let w = workers(a.sampling.workers)?;
    let config = MCConfig {
        samples: a.sampling.samples,
        seed: a.sampling.seed,
        workers: w,
        t_grid: grid.clone(),
    };
    let tails = estimate_tails(&pr, &m, &config)?;
    let rows = all_bounds(&pr, &grid, a.theta0)?;
    let estimates: Vec<TailEstimate> = tails.right.iter().chain(&tails.left).copied().collect();
    let flat: Vec<BoundPoint> = rows.iter().flatten().copied().collect();
    let report = domination_report(&estimates, &flat)?;

    let methods = [Method::Chernoff, Method::Piecewise, Method::Left, Method::Raic];
    let mut table = Table::new(COMPARE_COLUMNS.to_vec());
    for (i, (est, b)) in tails.right.iter().zip(&rows).enumerate() {
        let t = grid[i];
        let clipped: Vec<String> = methods
            .iter()
            .zip(b)
            .map(|(mm, p)| format!("{}={}", mm.name(), flag(p.clipped())))
            .collect();
        let pass: Vec<String> = methods
            .iter()
            .map(|&mm| format!("{}={}", mm.name(), flag(report.row(t, mm).is_some_and(|r| r.pass))))
            .collect();
        table.push(vec![
            t.into(),
            est.p_hat.into(),
            est.ci_low.into(),
            est.ci_high.into(),
            b[0].log_bound.into(),
            b[0].theta_star.into(),
            b[1].log_bound.into(),
            b[2].log_bound.into(),
            b[3].log_bound.into(),
            clipped.join(";").into(),
            pass.join(";").into(),
        ]);
    }
    let theta0 = a.theta0.unwrap_or(m.sigma);
    let manifest = sampling_manifest("compare", &pr, &a.sampling, w)
        .param("t_grid", &grid)
        .param("theta0", theta0);
    finish(&table, &a.output, manifest, started)?;
    for f in report.failures() {
        eprintln!(
            "{} bound {:e} below lower confidence limit {:e} at t = {}",
            f.method, f.bound, f.ci_low, f.t
        );
    }
    Ok(report.passed())
}
