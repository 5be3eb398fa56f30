use std::fmt::Write as _;

use serde::Serialize;

use super::ExperimentConfig;

pub const CSV_HEADER: &str =
    "kind,k,n,c,m,trials,empirical_mean,empirical_stderr,predicted,abs_err,rel_err,pass";

/// One comparison between a simulated statistic and its prediction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub kind: String,
    /// Which statistic of the run this row reports, e.g. `vertices`.
    pub metric: String,
    pub k: usize,
    pub n: usize,
    pub c: Option<f64>,
    pub m: Option<usize>,
    pub trials: usize,
    pub empirical_mean: f64,
    pub empirical_stderr: f64,
    pub predicted: f64,
    pub abs_err: f64,
    pub rel_err: Option<f64>,
    /// Absolute tolerance; the row passes when
    /// `abs_err <= max(tolerance, 3 * empirical_stderr)`.
    pub tolerance: f64,
    pub pass: bool,
}

/// Parameters shared by the rows of one grid point.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RowKey<'a> {
    pub kind: &'a str,
    pub k: usize,
    pub n: usize,
    pub c: Option<f64>,
    pub m: Option<usize>,
    pub trials: usize,
}

impl RowKey<'_> {
    /// Standard row: passes within `max(tolerance, 3 stderr)`.
    pub fn row(&self, metric: &str, mean: f64, stderr: f64, predicted: f64, tolerance: f64) -> ReportRow {
        let abs_err = (mean - predicted).abs();
        let pass = abs_err <= tolerance.max(3.0 * stderr);
        self.finish(metric, mean, stderr, predicted, tolerance, pass)
    }

    /// Row with a caller-decided verdict.
    pub fn finish(
        &self,
        metric: &str,
        mean: f64,
        stderr: f64,
        predicted: f64,
        tolerance: f64,
        pass: bool,
    ) -> ReportRow {
        let abs_err = (mean - predicted).abs();
        let rel_err = (predicted != 0.0 && predicted.is_finite()).then(|| abs_err / predicted.abs());
        ReportRow {
            kind: self.kind.to_string(),
            metric: metric.to_string(),
            k: self.k,
            n: self.n,
            c: self.c,
            m: self.m,
            trials: self.trials,
            empirical_mean: mean,
            empirical_stderr: stderr,
            predicted,
            abs_err,
            rel_err,
            tolerance,
            pass,
        }
    }
}

/// Rows of one experiment together with the configuration that produced them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn find(&self, metric: &str) -> impl Iterator<Item = &ReportRow> {
        let metric = metric.to_string();
        self.rows.iter().filter(move |r| r.metric == metric)
    }

    /// CSV with the resolved configuration echoed as `#` lines. The kind
    /// column reads `kind:metric`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in self.config.echo_lines() {
            writeln!(out, "# {line}").unwrap();
        }
        writeln!(out, "{CSV_HEADER}").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{}:{},{},{},{},{},{},{},{},{},{},{},{}",
                r.kind,
                r.metric,
                r.k,
                r.n,
                opt(r.c),
                opt(r.m),
                r.trials,
                r.empirical_mean,
                r.empirical_stderr,
                r.predicted,
                r.abs_err,
                opt(r.rel_err),
                r.pass
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
