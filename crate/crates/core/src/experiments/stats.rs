use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

/// Sample mean and standard error (`sd / sqrt(T)`, with the `T - 1`
/// variance). A single sample has standard error 0.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let t = xs.len();
    if t == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / t as f64;
    if t == 1 {
        return (mean, 0.0);
    }
    (mean, (sample_variance(xs, mean) / t as f64).sqrt())
}

pub fn sample_variance(xs: &[f64], mean: f64) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Outcome of a chi-square goodness-of-fit test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson test of observed counts against expected counts. Cells are
/// pooled left to right until each expects at least `min_expected`; a short
/// last group is merged into its predecessor.
pub fn chi_square(observed: &[u64], expected: &[f64], min_expected: f64) -> ChiSquare {
    assert_eq!(observed.len(), expected.len());
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&oi, &ei) in observed.iter().zip(expected) {
        o += oi as f64;
        e += ei;
        if e >= min_expected {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        1.0 - ChiSquared::new(dof as f64).expect("dof > 0").cdf(statistic)
    };
    ChiSquare {
        statistic,
        dof,
        p_value,
    }
}

/// Chi-square test of integer samples against `Poisson(lambda)`; the last
/// cell collects the upper tail.
pub fn poisson_fit(samples: &[u64], lambda: f64) -> ChiSquare {
    let t = samples.len() as f64;
    let top = samples.iter().copied().max().unwrap_or(0) as usize;
    let mut observed = vec![0u64; top + 2];
    for &s in samples {
        observed[s as usize] += 1;
    }
    let dist = Poisson::new(lambda).expect("lambda > 0");
    let mut expected: Vec<f64> = (0..=top as u64).map(|j| t * dist.pmf(j)).collect();
    let covered: f64 = expected.iter().sum();
    expected.push((t - covered).max(0.0));
    chi_square(&observed, &expected, 5.0)
}
