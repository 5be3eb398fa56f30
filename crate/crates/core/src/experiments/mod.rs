//! Monte Carlo runs that pair simulated statistics with the predictions of
//! [`crate::theory`].
//!
//! Trial `t` at grid point `g` draws from stream
//! `SeedSpec::new(master_seed, (g << 32) | t)`, and rows are aggregated in
//! trial order, so a report depends only on the configuration and not on the
//! number of worker threads.

mod report;
pub mod stats;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{n_star, RankEngine};
use crate::hypergraph::{degrees, peel_rank_identity_check, peel_two_core, rank_via_core, Hypergraph};
use crate::sampler::{
    all_columns, binomial, column_stream, sample_binomial, sample_m_subset, weighted_enumeration,
    SeedSpec,
};
use crate::theory;

pub use report::{Report, ReportRow, CSV_HEADER};
use report::RowKey;
use stats::{mean_stderr, poisson_fit, sample_variance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    RankSweep,
    CoreSize,
    PeelIdentity,
    FullRank,
    HittingTime,
    Mwb,
    ZeroRows,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::RankSweep,
        Kind::CoreSize,
        Kind::PeelIdentity,
        Kind::FullRank,
        Kind::HittingTime,
        Kind::Mwb,
        Kind::ZeroRows,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::RankSweep => "rank_sweep",
            Kind::CoreSize => "core_size",
            Kind::PeelIdentity => "peel_identity",
            Kind::FullRank => "full_rank",
            Kind::HittingTime => "hitting_time",
            Kind::Mwb => "mwb",
            Kind::ZeroRows => "zero_rows",
        }
    }

    /// Tolerance used when the configuration does not set one.
    ///
    /// Absolute for rank_sweep (rank/n), full_rank and hitting_time
    /// (probabilities) and zero_rows (mean of Z1); relative for core_size and
    /// mwb.
    pub fn default_tolerance(self, k: usize) -> f64 {
        match self {
            Kind::RankSweep => 0.01,
            Kind::CoreSize => 0.01,
            Kind::PeelIdentity => 0.0,
            Kind::FullRank => 0.08,
            Kind::HittingTime => 0.1,
            Kind::Mwb if k == 2 => 0.10,
            Kind::Mwb => 0.15,
            Kind::ZeroRows => 0.1,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown experiment kind {s:?}")))
    }
}

/// How the columns of an instance are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Exactly `m` distinct columns.
    #[default]
    FixedM,
    /// Every column independently with `p = m / C(n,k)`.
    Binomial,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::FixedM => "fixed_m",
            Model::Binomial => "binomial",
        })
    }
}

/// One experiment. Densities in `c_grid` mean `m = cn/k` for rank_sweep,
/// core_size and peel_identity, and `m = n(ln n + c)/k` for full_rank and
/// zero_rows. An explicit `m` replaces the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub k: usize,
    pub n: usize,
    pub c_grid: Vec<f64>,
    pub m: Option<usize>,
    pub model: Model,
    pub trials: usize,
    pub master_seed: u64,
    pub parallelism: usize,
    pub tolerance: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(kind: Kind, k: usize, n: usize) -> Self {
        Self {
            kind,
            k,
            n,
            c_grid: Vec::new(),
            m: None,
            model: Model::FixedM,
            trials: 10,
            master_seed: 0,
            parallelism: 1,
            tolerance: None,
        }
    }

    pub fn with_c_grid(mut self, grid: &[f64]) -> Self {
        self.c_grid = grid.to_vec();
        self
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_parallelism(mut self, threads: usize) -> Self {
        self.parallelism = threads;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = Some(tolerance);
        self
    }

    pub fn resolved_tolerance(&self) -> f64 {
        self.tolerance
            .unwrap_or_else(|| self.kind.default_tolerance(self.k))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Precondition(msg));
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.parallelism == 0 {
            return fail("parallelism must be at least 1".into());
        }
        if self.k < 2 {
            return fail(format!("k must be at least 2, got {}", self.k));
        }
        if self.n < self.k {
            return fail(format!("n={} is smaller than k={}", self.n, self.k));
        }
        if self.n > u32::MAX as usize {
            return fail(format!("n={} does not fit in 32 bits", self.n));
        }
        if self.c_grid.iter().any(|c| !c.is_finite()) {
            return fail("c grid values must be finite".into());
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0) {
                return fail(format!("tolerance must be non-negative, got {t}"));
            }
        }
        match self.kind {
            Kind::HittingTime | Kind::Mwb => {}
            _ if self.c_grid.is_empty() && self.m.is_none() => {
                return fail(format!("{} needs a c grid or m", self.kind));
            }
            _ => {}
        }
        if self.kind == Kind::Mwb && self.n < self.k + 2 {
            return fail(format!(
                "mwb needs n >= k + 2 so that the columns span rank n*, got n={} k={}",
                self.n, self.k
            ));
        }
        Ok(())
    }

    /// `key=value` lines describing every resolved setting.
    pub fn echo_lines(&self) -> Vec<String> {
        let grid: Vec<String> = self.c_grid.iter().map(f64::to_string).collect();
        vec![
            format!("kind={}", self.kind),
            format!("k={}", self.k),
            format!("n={}", self.n),
            format!("c_grid={}", grid.join(";")),
            format!("m={}", self.m.map(|m| m.to_string()).unwrap_or_default()),
            format!("model={}", self.model),
            format!("trials={}", self.trials),
            format!("master_seed={}", self.master_seed),
            format!("parallelism={}", self.parallelism),
            format!("tolerance={}", self.resolved_tolerance()),
        ]
    }

    fn points(&self) -> Vec<Point> {
        match self.m {
            Some(m) => vec![Point::Columns(m)],
            None => self.c_grid.iter().map(|&c| Point::Density(c)).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Point {
    Density(f64),
    Columns(usize),
}

fn round_m(x: f64) -> usize {
    x.round().max(0.0) as usize
}

/// `m = round(cn/k)`.
pub fn m_for_density(n: usize, k: usize, c: f64) -> usize {
    round_m(c * n as f64 / k as f64)
}

/// `m = round(n(ln n + c)/k)`.
pub fn m_for_log_density(n: usize, k: usize, c: f64) -> usize {
    round_m(n as f64 * ((n as f64).ln() + c) / k as f64)
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    pool: rayon::ThreadPool,
}

impl Runner<'_> {
    fn trials<T, F>(&self, grid_index: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(SeedSpec) -> Result<T> + Sync,
    {
        let seed = self.cfg.master_seed;
        let g = (grid_index as u64) << 32;
        self.pool.install(|| {
            (0..self.cfg.trials as u64)
                .into_par_iter()
                .map(|t| f(SeedSpec::new(seed, g | t)))
                .collect()
        })
    }

    fn sample(&self, m: usize, seed: SeedSpec) -> Result<Hypergraph> {
        let (n, k) = (self.cfg.n, self.cfg.k);
        match self.cfg.model {
            Model::FixedM => sample_m_subset(n, k, m, seed),
            Model::Binomial => {
                let p = m as f64 / binomial(n, k) as f64;
                sample_binomial(n, k, p.min(1.0), seed)
            }
        }
    }

    fn key(&self, c: Option<f64>, m: Option<usize>) -> RowKey<'_> {
        RowKey {
            kind: self.cfg.kind.name(),
            k: self.cfg.k,
            n: self.cfg.n,
            c,
            m,
            trials: self.cfg.trials,
        }
    }
}

/// Runs the experiment described by `cfg`.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    let r = Runner { cfg, pool };
    let rows = match cfg.kind {
        Kind::RankSweep => rank_sweep(&r)?,
        Kind::CoreSize => core_size(&r)?,
        Kind::PeelIdentity => peel_identity(&r)?,
        Kind::FullRank => full_rank(&r)?,
        Kind::HittingTime => hitting_time(&r)?,
        Kind::Mwb => mwb(&r)?,
        Kind::ZeroRows => zero_rows(&r)?,
    };
    Ok(Report {
        config: cfg.clone(),
        rows,
    })
}

pub fn run_rank_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    expect_kind(cfg, Kind::RankSweep)?;
    run(cfg)
}

pub fn run_core_size(cfg: &ExperimentConfig) -> Result<Report> {
    expect_kind(cfg, Kind::CoreSize)?;
    run(cfg)
}

pub fn run_peel_identity(cfg: &ExperimentConfig) -> Result<Report> {
    expect_kind(cfg, Kind::PeelIdentity)?;
    run(cfg)
}

pub fn run_full_rank(cfg: &ExperimentConfig) -> Result<Report> {
    expect_kind(cfg, Kind::FullRank)?;
    run(cfg)
}

pub fn run_hitting_time(cfg: &ExperimentConfig) -> Result<Report> {
    expect_kind(cfg, Kind::HittingTime)?;
    run(cfg)
}

pub fn run_mwb(cfg: &ExperimentConfig) -> Result<Report> {
    expect_kind(cfg, Kind::Mwb)?;
    run(cfg)
}

pub fn run_zero_rows(cfg: &ExperimentConfig) -> Result<Report> {
    expect_kind(cfg, Kind::ZeroRows)?;
    run(cfg)
}

fn expect_kind(cfg: &ExperimentConfig, kind: Kind) -> Result<()> {
    if cfg.kind != kind {
        return Err(Error::Precondition(format!(
            "configuration is for {}, not {kind}",
            cfg.kind
        )));
    }
    Ok(())
}

fn fraction(flags: &[bool]) -> (f64, f64) {
    let xs: Vec<f64> = flags.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    mean_stderr(&xs)
}

/// Resolves a point to `(c, m)` under `m = cn/k`.
fn linear_point(cfg: &ExperimentConfig, p: Point) -> (f64, usize) {
    match p {
        Point::Density(c) => (c, m_for_density(cfg.n, cfg.k, c)),
        Point::Columns(m) => (cfg.k as f64 * m as f64 / cfg.n as f64, m),
    }
}

fn rank_sweep(r: &Runner) -> Result<Vec<ReportRow>> {
    let cfg = r.cfg;
    let tol = cfg.resolved_tolerance();
    let mut rows = Vec::new();
    for (g, p) in cfg.points().into_iter().enumerate() {
        let (c, m) = linear_point(cfg, p);
        let out = r.trials(g, |seed| {
            let h = r.sample(m, seed)?;
            let rank = rank_via_core(&h).rank;
            Ok((rank as f64 / cfg.n as f64, rank == h.m()))
        })?;
        let fracs: Vec<f64> = out.iter().map(|o| o.0).collect();
        let (mean, se) = mean_stderr(&fracs);
        let key = r.key(Some(c), Some(m));
        let predicted = theory::rank_fraction(cfg.k, c, theory::DEFAULT_FIXED_POINT_TOL);
        rows.push(key.row("rank_fraction", mean, se, predicted, tol));
        // below the core threshold the rank should equal m exactly
        if cfg.k >= 3 && c < theory::hat_c(cfg.k, theory::DEFAULT_THRESHOLD_TOL)? {
            let flags: Vec<bool> = out.iter().map(|o| o.1).collect();
            let (f, fse) = fraction(&flags);
            rows.push(key.finish("rank_equals_m", f, fse, 1.0, 0.1, f >= 0.9));
        }
    }
    Ok(rows)
}

fn core_size(r: &Runner) -> Result<Vec<ReportRow>> {
    let cfg = r.cfg;
    let tol = cfg.resolved_tolerance();
    let n = cfg.n as f64;
    let mut rows = Vec::new();
    for (g, p) in cfg.points().into_iter().enumerate() {
        let (c, m) = linear_point(cfg, p);
        let out = r.trials(g, |seed| {
            let h = r.sample(m, seed)?;
            let peel = peel_two_core(&h);
            Ok((
                peel.core_vertices.len() as f64 / n,
                peel.core_edges.len() as f64 / n,
            ))
        })?;
        let (pv, pe) = theory::core_fractions(cfg.k, c, theory::DEFAULT_FIXED_POINT_TOL);
        let key = r.key(Some(c), Some(m));
        let v: Vec<f64> = out.iter().map(|o| o.0).collect();
        let e: Vec<f64> = out.iter().map(|o| o.1).collect();
        let (mv, sv) = mean_stderr(&v);
        let (me, sev) = mean_stderr(&e);
        if pv > 0.0 {
            rows.push(key.row("vertices", mv, sv, pv, tol * pv));
            rows.push(key.row("edges", me, sev, pe, tol * pe));
        } else {
            let slack = n.powf(-0.25);
            rows.push(key.row("vertices", mv, sv, 0.0, slack));
            rows.push(key.row("edges", me, sev, 0.0, slack));
            let empty: Vec<bool> = v.iter().map(|&x| x == 0.0).collect();
            let (f, fse) = fraction(&empty);
            rows.push(key.finish("empty_core", f, fse, 1.0, 0.05, f >= 0.95));
        }
    }
    Ok(rows)
}

fn peel_identity(r: &Runner) -> Result<Vec<ReportRow>> {
    let cfg = r.cfg;
    let mut rows = Vec::new();
    for (g, p) in cfg.points().into_iter().enumerate() {
        let (c, m) = linear_point(cfg, p);
        r.trials(g, |seed| {
            let h = r.sample(m, seed)?;
            let id = peel_rank_identity_check(&h)?;
            let fast = rank_via_core(&h);
            if fast.rank != id.total_rank {
                return Err(Error::IdentityViolation {
                    total_rank: id.total_rank,
                    m1: fast.m1,
                    core_rank: fast.core_rank,
                    instance: h.to_text(),
                });
            }
            Ok(())
        })?;
        // any violation has already aborted the run
        rows.push(r.key(Some(c), Some(m)).finish("identity", 1.0, 0.0, 1.0, 0.0, true));
    }
    Ok(rows)
}

fn has_full_rank(h: &Hypergraph) -> bool {
    let target = n_star(h.n(), h.k());
    let nonzero = degrees(h).iter().filter(|&&d| d > 0).count();
    nonzero >= target && rank_via_core(h).rank == target
}

fn full_rank(r: &Runner) -> Result<Vec<ReportRow>> {
    let cfg = r.cfg;
    let tol = cfg.resolved_tolerance();
    let mut rows = Vec::new();
    for (g, p) in cfg.points().into_iter().enumerate() {
        let (c, m, predicted) = match p {
            Point::Density(c) => (
                Some(c),
                m_for_log_density(cfg.n, cfg.k, c),
                theory::full_rank_probability(c),
            ),
            // dense regime, m of order n ln n: full rank with probability 1
            Point::Columns(m) => (None, m, 1.0),
        };
        let flags = r.trials(g, |seed| Ok(has_full_rank(&r.sample(m, seed)?)))?;
        let (f, se) = fraction(&flags);
        rows.push(r.key(c, Some(m)).row("p_full_rank", f, se, predicted, tol));
    }
    Ok(rows)
}

/// First column counts at which the streamed matrix has `n*` non-zero rows
/// (`m1`) and rank `n*` (`m*`).
pub fn hitting_times(n: usize, k: usize, seed: SeedSpec) -> Result<(usize, usize)> {
    let target = n_star(n, k);
    let mut stream = column_stream(n, k, seed)?;
    let mut deg = vec![0u32; n];
    let mut nonzero = 0;
    let mut engine = RankEngine::new(n);
    let mut m1 = None;
    let mut m = 0;
    if target == 0 {
        return Ok((0, 0));
    }
    loop {
        let col = stream.next_column()?;
        m += 1;
        for &v in col.indices() {
            if deg[v as usize] == 0 {
                nonzero += 1;
            }
            deg[v as usize] += 1;
        }
        if m1.is_none() && nonzero >= target {
            m1 = Some(m);
        }
        engine.offer(&col);
        if engine.rank() == target {
            let m1 = m1.expect("rank n* needs n* non-zero rows");
            return Ok((m1, m));
        }
    }
}

fn hitting_time(r: &Runner) -> Result<Vec<ReportRow>> {
    let cfg = r.cfg;
    let (n, k) = (cfg.n, cfg.k);
    let out = r.trials(0, |seed| hitting_times(n, k, seed))?;
    let key = r.key(None, None);
    let equal: Vec<bool> = out.iter().map(|&(a, b)| a == b).collect();
    let (f, se) = fraction(&equal);
    let tol = cfg.resolved_tolerance();
    let mut rows = vec![key.finish("m1_equals_mstar", f, se, 1.0, tol, f >= 1.0 - tol)];
    let ordered = out.iter().all(|&(a, b)| a <= b);
    rows.push(key.finish("m1_le_mstar", if ordered { 1.0 } else { 0.0 }, 0.0, 1.0, 0.0, ordered));
    // P(m* <= n(ln n + c)/k) tends to exp(-e^{-c}), a Gumbel law with mean
    // equal to the Euler constant
    let ms: Vec<f64> = out.iter().map(|&(_, b)| b as f64).collect();
    let (mm, mse) = mean_stderr(&ms);
    let nf = n as f64;
    let predicted = nf * (nf.ln() + EULER_GAMMA) / k as f64;
    rows.push(key.row("mstar", mm, mse, predicted, 0.1 * predicted));
    Ok(rows)
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Checks once that offering every column reaches rank `n*`.
pub fn check_spanning(n: usize, k: usize) -> Result<()> {
    let target = n_star(n, k);
    let mut engine = RankEngine::new(n);
    for col in all_columns(n, k) {
        engine.offer(&col);
        if engine.rank() == target {
            return Ok(());
        }
    }
    Err(Error::GreedyStalled {
        rank: engine.rank(),
        target,
    })
}

/// Greedy minimum-weight basis for one weight draw: `(W, basis size)`.
pub fn mwb_trial(n: usize, k: usize, seed: SeedSpec) -> Result<(f64, usize)> {
    let target = n_star(n, k);
    let mut engine = RankEngine::new(n);
    let mut weight = 0.0;
    for wc in weighted_enumeration(n, k, seed)? {
        if engine.offer(&wc.column) {
            weight += wc.weight;
            if engine.rank() == target {
                break;
            }
        }
    }
    if engine.rank() != target {
        return Err(Error::GreedyStalled {
            rank: engine.rank(),
            target,
        });
    }
    Ok((weight, engine.rank()))
}

/// `n^{k-2} W / (k-1)!`.
pub fn scaled_weight(n: usize, k: usize, w: f64) -> f64 {
    let fact: f64 = (2..k).map(|i| i as f64).product();
    (n as f64).powi(k as i32 - 2) * w / fact
}

fn mwb(r: &Runner) -> Result<Vec<ReportRow>> {
    let cfg = r.cfg;
    let (n, k) = (cfg.n, cfg.k);
    check_spanning(n, k)?;
    let out = r.trials(0, |seed| mwb_trial(n, k, seed))?;
    let scaled: Vec<f64> = out.iter().map(|&(w, _)| scaled_weight(n, k, w)).collect();
    let (mean, se) = mean_stderr(&scaled);
    let limit = theory::mwb_limit(k, theory::DEFAULT_QUAD_TOL).value;
    let key = r.key(None, None);
    let tol = cfg.resolved_tolerance();
    let mut rows = vec![key.row("scaled_weight", mean, se, limit, tol * limit)];
    let full = out.iter().all(|&(_, b)| b == n_star(n, k));
    rows.push(key.finish("basis_size", if full { 1.0 } else { 0.0 }, 0.0, 1.0, 0.0, full));
    Ok(rows)
}

fn zero_rows(r: &Runner) -> Result<Vec<ReportRow>> {
    let cfg = r.cfg;
    let tol = cfg.resolved_tolerance();
    let mut rows = Vec::new();
    for (g, p) in cfg.points().into_iter().enumerate() {
        let (c, m) = match p {
            Point::Density(c) => (c, m_for_log_density(cfg.n, cfg.k, c)),
            Point::Columns(m) => {
                let n = cfg.n as f64;
                (cfg.k as f64 * m as f64 / n - n.ln(), m)
            }
        };
        let z: Vec<u64> = r.trials(g, |seed| {
            let h = r.sample(m, seed)?;
            Ok(degrees(&h).iter().filter(|&&d| d == 0).count() as u64)
        })?;
        let zf: Vec<f64> = z.iter().map(|&v| v as f64).collect();
        let (mean, se) = mean_stderr(&zf);
        let lambda = theory::expected_zero_row_sets(1, c);
        let key = r.key(Some(c), Some(m));
        rows.push(key.row("mean", mean, se, lambda, tol));

        let t = zf.len() as f64;
        let ratio = if mean > 0.0 { sample_variance(&zf, mean) / mean } else { f64::NAN };
        // sd of var/mean for Poisson samples, to first order
        let ratio_se = ((1.0 / lambda + 2.0) / t).sqrt();
        let ratio_ok = ratio.is_nan() && lambda < 1e-2 || (ratio - 1.0).abs() <= 0.2;
        rows.push(key.finish("dispersion", ratio, ratio_se, 1.0, 0.2, ratio_ok));

        let zero: Vec<bool> = z.iter().map(|&v| v == 0).collect();
        let (pz, pzse) = fraction(&zero);
        rows.push(key.row("p_zero", pz, pzse, (-lambda).exp(), 0.05));

        let fit = poisson_fit(&z, lambda);
        rows.push(key.finish("chi_square_p", fit.p_value, 0.0, f64::NAN, 0.001, fit.p_value > 0.001));
    }
    Ok(rows)
}
