use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hyperrank::experiments::{self, ExperimentConfig, Kind, Model};
use hyperrank::sampler::{sample_m_subset, SeedSpec};
use hyperrank::theory;
use hyperrank::Error;

/// Rank of random sparse GF(2) matrices with k ones per column.
#[derive(Parser, Debug)]
#[command(name = "hyperrank", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print fixed point, thresholds, core and rank predictions as JSON
    Theory(TheoryArgs),
    /// Print the minimum-weight-basis limits for k = 2..kmax as CSV
    Table(TableArgs),
    /// Run a Monte Carlo experiment and compare it with theory
    Simulate(SimulateArgs),
    /// Run the minimum-weight-basis experiment
    Mwb(MwbArgs),
    /// Write a sampled instance in the text matrix format
    Dump(DumpArgs),
}

#[derive(Args, Debug)]
struct TheoryArgs {
    /// Column weight (ones per column), at least 2
    #[arg(long)]
    k: usize,
    /// Density c = km/n
    #[arg(long)]
    c: f64,
    /// Fixed-point residual tolerance
    #[arg(long, default_value_t = theory::DEFAULT_FIXED_POINT_TOL)]
    tol: f64,
    /// Threshold bisection tolerance
    #[arg(long, default_value_t = theory::DEFAULT_THRESHOLD_TOL)]
    threshold_tol: f64,
    /// Quadrature tolerance for the minimum-weight-basis limit
    #[arg(long, default_value_t = theory::DEFAULT_QUAD_TOL)]
    quad_tol: f64,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Largest k in the table
    #[arg(long, default_value_t = 10)]
    kmax: usize,
    /// Quadrature tolerance
    #[arg(long, default_value_t = theory::DEFAULT_QUAD_TOL)]
    quad_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum KindArg {
    RankSweep,
    CoreSize,
    PeelIdentity,
    FullRank,
    HittingTime,
    Mwb,
    ZeroRows,
}

impl From<KindArg> for Kind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::RankSweep => Kind::RankSweep,
            KindArg::CoreSize => Kind::CoreSize,
            KindArg::PeelIdentity => Kind::PeelIdentity,
            KindArg::FullRank => Kind::FullRank,
            KindArg::HittingTime => Kind::HittingTime,
            KindArg::Mwb => Kind::Mwb,
            KindArg::ZeroRows => Kind::ZeroRows,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ModelArg {
    FixedM,
    Binomial,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Number of independent trials per grid point
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Master seed; trial t at grid point g uses stream (g << 32) | t
    #[arg(long)]
    seed: u64,
    /// Worker threads (results do not depend on it)
    #[arg(long, default_value_t = 1)]
    parallelism: usize,
    /// Override the default pass tolerance of the experiment
    #[arg(long)]
    tolerance: Option<f64>,
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Experiment to run
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Column weight
    #[arg(long)]
    k: usize,
    /// Number of rows (hypergraph vertices)
    #[arg(long)]
    n: usize,
    /// Comma-separated density grid
    #[arg(long, value_delimiter = ',', conflicts_with = "m", allow_hyphen_values = true)]
    c: Vec<f64>,
    /// Explicit column count instead of a density grid
    #[arg(long)]
    m: Option<usize>,
    /// Column model
    #[arg(long, value_enum, default_value_t = ModelArg::FixedM)]
    model: ModelArg,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct MwbArgs {
    /// Column weight
    #[arg(long)]
    k: usize,
    /// Number of rows, at least k + 2
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct DumpArgs {
    /// Column weight
    #[arg(long)]
    k: usize,
    /// Number of rows
    #[arg(long)]
    n: usize,
    /// Number of distinct columns
    #[arg(long)]
    m: usize,
    /// Master seed
    #[arg(long)]
    seed: u64,
    /// Stream id
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Write the instance here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct TheoryOutput {
    k: usize,
    c: f64,
    c_hat: Option<f64>,
    c_star: f64,
    x: f64,
    core_v: f64,
    core_e: f64,
    rank_frac: f64,
    mwb_limit: f64,
    quad_error: f64,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Precondition(_) | Error::TooLarge { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => File::create(path)?.write_all(text.as_bytes())?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn usage(msg: String) -> Failure {
    Failure::Usage(msg)
}

fn cmd_theory(a: &TheoryArgs) -> Result<bool, Failure> {
    if a.k < 2 {
        return Err(usage(format!("--k must be at least 2, got {}", a.k)));
    }
    if !(a.c >= 0.0 && a.c.is_finite()) {
        return Err(usage(format!("--c must be finite and non-negative, got {}", a.c)));
    }
    for (name, v) in [("--tol", a.tol), ("--threshold-tol", a.threshold_tol), ("--quad-tol", a.quad_tol)] {
        if !(v > 0.0) {
            return Err(usage(format!("{name} must be positive, got {v}")));
        }
    }
    let th = theory::thresholds(a.k, a.threshold_tol)?;
    let p = theory::theory_point(a.k, a.c, a.tol);
    let mwb = theory::mwb_limit(a.k, a.quad_tol);
    let out = TheoryOutput {
        k: a.k,
        c: a.c,
        c_hat: th.c_hat,
        c_star: th.c_star,
        x: p.x,
        core_v: p.core_v,
        core_e: p.core_e,
        rank_frac: p.rank_frac,
        mwb_limit: mwb.value,
        quad_error: mwb.quad_error,
    };
    let json = serde_json::to_string_pretty(&out).expect("serializable");
    emit(None, &format!("{json}\n"))?;
    Ok(true)
}

fn cmd_table(a: &TableArgs) -> Result<bool, Failure> {
    if a.kmax < 2 {
        return Err(usage(format!("--kmax must be at least 2, got {}", a.kmax)));
    }
    if !(a.quad_tol > 0.0) {
        return Err(usage(format!("--quad-tol must be positive, got {}", a.quad_tol)));
    }
    let mut out = format!("# kmax={} quad_tol={}\nk,value,quad_error\n", a.kmax, a.quad_tol);
    for k in 2..=a.kmax {
        let l = theory::mwb_limit(k, a.quad_tol);
        out.push_str(&format!("{},{:.7},{:.3e}\n", k, l.value, l.quad_error));
    }
    emit(None, &out)?;
    Ok(true)
}

fn run_report(cfg: ExperimentConfig, run: &RunArgs) -> Result<bool, Failure> {
    let report = experiments::run(&cfg)?;
    let text = match run.format {
        Format::Csv => report.to_csv(),
        Format::Json => format!("{}\n", report.to_json()),
    };
    emit(run.output.as_ref(), &text)?;
    Ok(report.all_pass())
}

fn apply_run(mut cfg: ExperimentConfig, run: &RunArgs) -> ExperimentConfig {
    cfg = cfg
        .with_trials(run.trials)
        .with_seed(run.seed)
        .with_parallelism(run.parallelism);
    if let Some(t) = run.tolerance {
        cfg = cfg.with_tolerance(t);
    }
    cfg
}

fn cmd_simulate(a: &SimulateArgs) -> Result<bool, Failure> {
    let mut cfg = ExperimentConfig::new(a.kind.into(), a.k, a.n)
        .with_c_grid(&a.c)
        .with_model(match a.model {
            ModelArg::FixedM => Model::FixedM,
            ModelArg::Binomial => Model::Binomial,
        });
    if let Some(m) = a.m {
        cfg = cfg.with_m(m);
    }
    run_report(apply_run(cfg, &a.run), &a.run)
}

fn cmd_mwb(a: &MwbArgs) -> Result<bool, Failure> {
    let cfg = ExperimentConfig::new(Kind::Mwb, a.k, a.n);
    run_report(apply_run(cfg, &a.run), &a.run)
}

fn cmd_dump(a: &DumpArgs) -> Result<bool, Failure> {
    if a.k < 1 {
        return Err(usage("--k must be at least 1".into()));
    }
    let h = sample_m_subset(a.n, a.k, a.m, SeedSpec::new(a.seed, a.stream))?;
    let text = format!(
        "# seed={} stream={} n={} k={} m={}\n{}",
        a.seed,
        a.stream,
        a.n,
        a.k,
        a.m,
        h.to_text()
    );
    emit(a.output.as_ref(), &text)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Theory(a) => cmd_theory(a),
        Command::Table(a) => cmd_table(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Mwb(a) => cmd_mwb(a),
        Command::Dump(a) => cmd_dump(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
