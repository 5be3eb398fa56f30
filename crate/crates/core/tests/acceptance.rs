//! Acceptance criteria 1 to 10. Each test writes one PASS/FAIL line to
//! stderr (bypassing output capture) and then asserts its verdict.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use hyperrank::experiments::{run, ExperimentConfig, Kind, Model, Report};
use hyperrank::gf2::{BitVec, RankEngine};
use hyperrank::hypergraph::{peel_rank_identity_check, peel_two_core_random_order};
use hyperrank::sampler::{sample_m_subset, SeedSpec};
use hyperrank::theory::*;
use hyperrank::{peel_two_core, rank, span_size_oracle, ColumnSet, Gf2Matrix};

const PARALLELISM: usize = 4;

fn verdict(id: u32, name: &str, checks: &[(bool, String)], elapsed: Duration, budget: Duration) {
    let in_time = elapsed <= budget;
    let pass = in_time && checks.iter().all(|c| c.0);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.0).map(|c| c.1.as_str()).collect();
    let detail = if failed.is_empty() {
        checks.iter().map(|c| c.1.as_str()).collect::<Vec<_>>().join("; ")
    } else {
        format!("failed: {}", failed.join("; "))
    };
    let line = format!(
        "criterion {id:>2} {} {name}: {detail} [{:.2} s of {} s]\n",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(pass, "{line}");
}

fn check(ok: bool, msg: String) -> (bool, String) {
    (ok, msg)
}

fn metric_rows<'a>(rep: &'a Report, metric: &'a str) -> impl Iterator<Item = &'a hyperrank::experiments::ReportRow> {
    rep.rows.iter().filter(move |r| r.metric == metric)
}

#[test]
fn criterion_01_table() {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_hyperrank")).args(["table", "--kmax", "10"]).output().unwrap();
    let elapsed = start.elapsed();
    let text = String::from_utf8(out.stdout).unwrap();
    let published = [1.202, 1.563, 2.021, 2.507, 3.003, 3.501, 4.000, 4.500, 5.000];
    let mut checks = vec![check(out.status.success(), "table exits 0".into())];
    let values: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("k,"))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    checks.push(check(values.len() == 9, format!("{} rows", values.len())));
    for (i, (&v, &p)) in values.iter().zip(&published).enumerate() {
        checks.push(check((v - p).abs() <= 0.002, format!("k={} {v:.7} vs {p}", i + 2)));
    }
    let zeta3 = 1.202_056_9;
    checks.push(check((values[0] - zeta3).abs() <= 1e-3, format!("k=2 vs zeta(3) off by {:.1e}", (values[0] - zeta3).abs())));
    verdict(1, "table", &checks, elapsed, Duration::from_secs(10));
}

#[test]
fn criterion_02_thresholds() {
    let start = Instant::now();
    let c3 = c_star(3, DEFAULT_THRESHOLD_TOL);
    let published_c3 = 2.753699;
    let published_x = 0.9398891;
    let x = largest_fixed_point(3, published_c3, DEFAULT_FIXED_POINT_TOL);
    let x_at_c3 = largest_fixed_point(3, c3, DEFAULT_FIXED_POINT_TOL);
    let mut checks = vec![
        check((c3 - published_c3).abs() <= 1e-5, format!("c*(3) = {c3:.7} vs {published_c3} (diff {:.2e})", c3 - published_c3)),
        check(
            (x - published_x).abs() <= 1e-6,
            format!("x at c={published_c3} is {x:.7} vs {published_x} (x at c*(3) is {x_at_c3:.7})"),
        ),
    ];
    for k in 4..=12 {
        let cs = c_star(k, DEFAULT_THRESHOLD_TOL);
        let b = c_star_bounds(k).unwrap();
        checks.push(check(b.contains(cs), format!("k={k} c*={cs:.7} in [{:.7}, {}]", b.lo, b.hi)));
        let w = mwb_limit(k, DEFAULT_QUAD_TOL).value;
        let wb = mwb_large_k_bounds(k).unwrap();
        checks.push(check(wb.contains(w), format!("k={k} limit {w:.7} in [{:.7}, {:.7}]", wb.lo, wb.hi)));
    }
    verdict(2, "threshold constants", &checks, start.elapsed(), Duration::from_secs(5));
}

#[test]
fn criterion_03_peel_identity() {
    let start = Instant::now();
    let mut rng = SeedSpec::new(3, 0).rng();
    let mut failures = 0;
    for i in 0..1000u64 {
        let k = 2 + (i % 4) as usize;
        let n = k + 1 + rng.below(500 - k as u64) as usize;
        let c = 0.2 + 6.0 * rng.unit();
        let m = ((c * n as f64 / k as f64) as usize).min(hyperrank::sampler::binomial(n, k) as usize);
        let h = sample_m_subset(n, k, m, SeedSpec::new(3, i + 1)).unwrap();
        match peel_rank_identity_check(&h) {
            Ok(id) if id.total_rank == id.m1 + id.core_rank => {}
            _ => failures += 1,
        }
    }
    let checks = [check(failures == 0, format!("{failures} failures in 1000 instances, k in 2..=5, n <= 500"))];
    verdict(3, "peel identity", &checks, start.elapsed(), Duration::from_secs(30));
}

#[test]
fn criterion_04_rank_law() {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(Kind::RankSweep, 3, 100_000)
        .with_c_grid(&[1.0, 2.0, 2.6, 3.0, 4.0, 6.0])
        .with_trials(10)
        .with_seed(4)
        .with_parallelism(PARALLELISM);
    let rep = run(&cfg).unwrap();
    let checks: Vec<_> = metric_rows(&rep, "rank_fraction")
        .map(|r| {
            check(
                r.pass,
                format!("c={} {:.5} vs {:.5}", r.c.unwrap(), r.empirical_mean, r.predicted),
            )
        })
        .collect();
    verdict(4, "rank law", &checks, start.elapsed(), Duration::from_secs(300));
}

#[test]
fn criterion_05_core_sizes() {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(Kind::CoreSize, 3, 100_000)
        .with_c_grid(&[3.0, 3.5, 5.0])
        .with_trials(10)
        .with_seed(5)
        .with_parallelism(PARALLELISM);
    let rep = run(&cfg).unwrap();
    let mut checks: Vec<_> = rep
        .rows
        .iter()
        .filter(|r| r.metric == "vertices" || r.metric == "edges")
        .map(|r| {
            check(
                r.pass,
                format!("c={} {} {:.5} vs {:.5}", r.c.unwrap(), r.metric, r.empirical_mean, r.predicted),
            )
        })
        .collect();
    let below = ExperimentConfig::new(Kind::CoreSize, 3, 10_000)
        .with_c_grid(&[2.2])
        .with_trials(100)
        .with_seed(5)
        .with_parallelism(PARALLELISM);
    let rep = run(&below).unwrap();
    let empty = metric_rows(&rep, "empty_core").next().unwrap();
    checks.push(check(empty.empirical_mean >= 0.95, format!("c=2.2 empty in {:.2}", empty.empirical_mean)));
    verdict(5, "core sizes", &checks, start.elapsed(), Duration::from_secs(180));
}

#[test]
fn criterion_06_full_rank() {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(Kind::FullRank, 3, 10_000)
        .with_c_grid(&[-1.0, 0.0, 1.0, 2.0, 4.0])
        .with_trials(400)
        .with_seed(6)
        .with_parallelism(PARALLELISM);
    let rep = run(&cfg).unwrap();
    let checks: Vec<_> = metric_rows(&rep, "p_full_rank")
        .map(|r| check(r.pass, format!("c={} {:.3} vs {:.3}", r.c.unwrap(), r.empirical_mean, r.predicted)))
        .collect();
    verdict(6, "full rank", &checks, start.elapsed(), Duration::from_secs(600));
}

#[test]
fn criterion_07_hitting_time() {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(Kind::HittingTime, 3, 2000)
        .with_trials(100)
        .with_seed(7)
        .with_parallelism(PARALLELISM);
    let rep = run(&cfg).unwrap();
    let eq = metric_rows(&rep, "m1_equals_mstar").next().unwrap();
    let checks = [check(eq.empirical_mean >= 0.9, format!("m1 = m* in {:.2} of trials", eq.empirical_mean))];
    verdict(7, "hitting time", &checks, start.elapsed(), Duration::from_secs(300));
}

#[test]
fn criterion_08_zero_rows() {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(Kind::ZeroRows, 3, 10_000)
        .with_c_grid(&[0.0])
        .with_trials(1000)
        .with_seed(8)
        .with_parallelism(PARALLELISM);
    let rep = run(&cfg).unwrap();
    let mean = metric_rows(&rep, "mean").next().unwrap();
    let disp = metric_rows(&rep, "dispersion").next().unwrap();
    let checks = [
        check(mean.pass, format!("mean {:.3} vs 1", mean.empirical_mean)),
        check(
            (0.8..=1.2).contains(&disp.empirical_mean),
            format!("variance/mean {:.3}", disp.empirical_mean),
        ),
    ];
    verdict(8, "zero-row Poisson", &checks, start.elapsed(), Duration::from_secs(300));
}

#[test]
fn criterion_09_mwb() {
    let start = Instant::now();
    let mwb = |k: usize, n: usize| {
        let cfg = ExperimentConfig::new(Kind::Mwb, k, n).with_trials(100).with_seed(9).with_parallelism(PARALLELISM);
        metric_rows(&run(&cfg).unwrap(), "scaled_weight").next().unwrap().clone()
    };
    let w2 = mwb(2, 200);
    let w100 = mwb(3, 100);
    let w200 = mwb(3, 200);
    let (d100, d200) = ((w100.empirical_mean - 1.563).abs(), (w200.empirical_mean - 1.563).abs());
    let checks = [
        check(
            (w2.empirical_mean - 1.202).abs() <= 0.10 * 1.202,
            format!("k=2 n=200 W {:.4} (se {:.4}) vs 1.202", w2.empirical_mean, w2.empirical_stderr),
        ),
        check(
            (w200.empirical_mean - 1.563).abs() <= 0.15 * 1.563,
            format!("k=3 n=200 nW/2 {:.4} (se {:.4}) vs 1.563", w200.empirical_mean, w200.empirical_stderr),
        ),
        check(d200 <= d100, format!("k=3 deviation {d100:.4} at n=100, {d200:.4} at n=200")),
    ];
    verdict(9, "MWB convergence", &checks, start.elapsed(), Duration::from_secs(600));
}

#[test]
fn criterion_10_property_suites() {
    let start = Instant::now();
    let mut rng = SeedSpec::new(10, 0).rng();
    let random_matrix = |rng: &mut hyperrank::sampler::SeededRng, max_n: u64, max_m: u64| {
        let n = 1 + rng.below(max_n) as usize;
        let k = 1 + rng.below(n.min(6) as u64) as usize;
        let m = rng.below(max_m + 1) as usize;
        let cols = (0..m)
            .map(|_| {
                let mut idx: Vec<u32> = Vec::new();
                while idx.len() < k {
                    let v = rng.below(n as u64) as u32;
                    if !idx.contains(&v) {
                        idx.push(v);
                    }
                }
                ColumnSet::from_unsorted(n, &idx).unwrap()
            })
            .collect();
        Gf2Matrix::from_columns(n, cols).unwrap()
    };

    let mut stream_ok = true;
    for _ in 0..300 {
        let m = random_matrix(&mut rng, 40, 40);
        let mut e = RankEngine::new(m.n());
        for (i, c) in m.columns().iter().enumerate() {
            e.offer(c);
            let prefix = Gf2Matrix::from_columns(m.n(), m.columns()[..=i].to_vec()).unwrap();
            stream_ok &= e.rank() == rank(&prefix);
        }
        let mut b = RankEngine::new(m.n());
        for c in m.columns() {
            b.offer_bits(&BitVec::from_indices(m.n(), c.indices().iter().map(|&v| v as usize)));
        }
        stream_ok &= b.rank() == e.rank() && e.check_invariants().is_ok();
    }

    let mut span_ok = true;
    for _ in 0..300 {
        let m = random_matrix(&mut rng, 12, 16);
        let s = span_size_oracle(&m).unwrap();
        span_ok &= s.is_power_of_two() && s.trailing_zeros() as usize == rank(&m);
    }

    let mut confluent = true;
    for i in 0..200u64 {
        let k = 2 + (i % 4) as usize;
        let n = k + 1 + rng.below(60) as usize;
        let m = (rng.unit() * 2.0 * n as f64 / k as f64) as usize;
        let m = m.min(hyperrank::sampler::binomial(n, k) as usize);
        let h = sample_m_subset(n, k, m, SeedSpec::new(10, i + 1)).unwrap();
        let base = peel_two_core(&h);
        let mut edges = base.core_edges.clone();
        edges.sort();
        for s in 0..4 {
            let p = peel_two_core_random_order(&h, &mut SeedSpec::new(11, i * 4 + s).rng());
            let mut e = p.core_edges.clone();
            e.sort();
            confluent &= p.core_vertices == base.core_vertices && e == edges && p.m1 == base.m1;
        }
    }

    let n = 10_000;
    let base = ExperimentConfig::new(Kind::RankSweep, 3, n)
        .with_c_grid(&[2.0, 3.5])
        .with_trials(10)
        .with_seed(10)
        .with_parallelism(PARALLELISM);
    let fixed = run(&base).unwrap();
    let binom = run(&base.with_model(Model::Binomial)).unwrap();
    let models_ok = metric_rows(&fixed, "rank_fraction").zip(metric_rows(&binom, "rank_fraction")).all(|(a, b)| {
        let slack = 3.0 * (a.empirical_stderr.powi(2) + b.empirical_stderr.powi(2)).sqrt() + (n as f64).powf(-0.25);
        (a.empirical_mean - b.empirical_mean).abs() <= slack
    });

    let mut residual_ok = true;
    for _ in 0..1000 {
        let k = 2 + rng.below(9) as usize;
        let c = 12.0 * rng.unit();
        let x = largest_fixed_point(k, c, DEFAULT_FIXED_POINT_TOL);
        residual_ok &= (0.0..=1.0).contains(&x) && (x == 0.0 || fixed_point_residual(k, c, x).abs() <= DEFAULT_FIXED_POINT_TOL);
    }
    let continuity_ok = (3..=10).all(|k| {
        let c = c_star(k, DEFAULT_THRESHOLD_TOL);
        (rank_fraction_below(k, c) - rank_fraction_above(k, c, DEFAULT_FIXED_POINT_TOL)).abs() <= 10.0 * DEFAULT_THRESHOLD_TOL
    });

    let checks = [
        check(stream_ok, "batch/stream rank equivalence".into()),
        check(span_ok, "span oracle (m <= 16)".into()),
        check(confluent, "peel confluence".into()),
        check(models_ok, "binomial vs fixed-m".into()),
        check(residual_ok, "fixed-point residual".into()),
        check(continuity_ok, "rank continuity at c*".into()),
    ];
    verdict(10, "property suites", &checks, start.elapsed(), Duration::from_secs(120));
}
