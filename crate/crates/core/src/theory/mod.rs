//! Asymptotic predictions for random k-sparse GF(2) matrices.
//!
//! Densities are measured by `c = km/n`, the average vertex degree of the
//! associated k-uniform hypergraph. Everything here is a pure function.

mod quadrature;

use serde::Serialize;

use crate::error::{Error, Result};

pub use quadrature::{adaptive_simpson, Quadrature};

pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-10;
pub const DEFAULT_THRESHOLD_TOL: f64 = 1e-6;
pub const DEFAULT_QUAD_TOL: f64 = 1e-6;

/// Fixed-point tolerance used when the solution feeds another computation.
const INNER_TOL: f64 = 1e-13;
const MAX_ITERATIONS: usize = 10_000_000;
const HAT_C_ITERATIONS: usize = 10_000;

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// All single-density predictions for `(k, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoryPoint {
    pub k: usize,
    pub c: f64,
    pub x: f64,
    pub core_v: f64,
    pub core_e: f64,
    pub rank_frac: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    pub k: usize,
    /// `None` for k = 2, where the threshold is not defined by the minimum.
    pub c_hat: Option<f64>,
    pub c_star: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MwbLimit {
    pub k: usize,
    pub value: f64,
    /// Quadrature estimate plus truncation bound.
    pub quad_error: f64,
    pub c_star: f64,
    pub c_max: f64,
}

#[inline]
fn fixed_point_map(k: usize, c: f64, x: f64) -> f64 {
    (-(-c * x).exp_m1()).powi(k as i32 - 1)
}

/// Residual `x - (1 - e^{-cx})^{k-1}`.
pub fn fixed_point_residual(k: usize, c: f64, x: f64) -> f64 {
    x - fixed_point_map(k, c, x)
}

/// Largest root in (0, 1] of `x = (1 - e^{-cx})^{k-1}`, or 0 if there is none.
///
/// The map is increasing, so iterating it from `x = 1` descends monotonically
/// to the largest fixed point. For k = 2 the map is concave and Newton's
/// method from `x = 1` descends monotonically as well, which avoids the very
/// slow linear convergence just above `c = 1`.
///
/// Panics if `k < 2`, `c < 0` or `tol <= 0`.
pub fn largest_fixed_point(k: usize, c: f64, tol: f64) -> f64 {
    assert!(k >= 2, "k must be at least 2");
    assert!(c >= 0.0 && c.is_finite(), "c must be finite and non-negative");
    assert!(tol > 0.0, "tol must be positive");
    if c == 0.0 {
        return 0.0;
    }
    if k == 2 {
        return giant_fixed_point(c, tol);
    }
    iterate(k, c, tol, MAX_ITERATIONS).unwrap_or(0.0)
}

/// Plain iteration from 1. `None` when the iterate collapses to 0.
fn iterate(k: usize, c: f64, tol: f64, cap: usize) -> Option<f64> {
    let floor = 10.0 * tol;
    let mut x = 1.0f64;
    for _ in 0..cap {
        let gx = fixed_point_map(k, c, x);
        assert!(gx <= x, "fixed-point iteration must not increase");
        if x - gx <= tol {
            return (gx > floor).then_some(gx);
        }
        if gx <= floor {
            return None;
        }
        x = gx;
    }
    Some(x)
}

fn giant_fixed_point(c: f64, tol: f64) -> f64 {
    if c <= 1.0 {
        return 0.0;
    }
    let mut x = 1.0f64;
    for _ in 0..200 {
        let e = (-c * x).exp();
        let h = x - (1.0 - e);
        if h <= tol {
            break;
        }
        let next = x - h / (1.0 - c * e);
        if next >= x || next <= 0.0 {
            break;
        }
        x = next;
    }
    x
}

/// Smallest density at which a positive fixed point exists (k >= 3).
pub fn hat_c(k: usize, tol: f64) -> Result<f64> {
    if k < 3 {
        return Err(Error::Precondition(format!(
            "hat_c is defined for k >= 3, got k={k}"
        )));
    }
    if tol <= 0.0 {
        return Err(Error::Precondition("tol must be positive".into()));
    }
    let exists = |c: f64| iterate(k, c, DEFAULT_FIXED_POINT_TOL, HAT_C_ITERATIONS).is_some();
    let mut lo = 0.0f64;
    let mut hi = k as f64;
    while !exists(hi) {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if exists(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `f(y) = y - (1 - exp(-ky / (k - (k-1)y)))`; c* comes from its largest
/// root in (0, 1).
pub fn y_equation(k: usize, y: f64) -> f64 {
    let kf = k as f64;
    y + (-kf * y / (kf - (kf - 1.0) * y)).exp_m1()
}

/// The k = 3 form `y + (2y/3 - 1) ln(1/(1-y))`, which shares its roots in
/// (0, 1) with [`y_equation`].
pub fn y_equation_k3_log_form(y: f64) -> f64 {
    y + (2.0 * y / 3.0 - 1.0) * (-(-y).ln_1p())
}

/// Density corresponding to a root `y` of the y-equation.
pub fn c_from_y(k: usize, y: f64) -> f64 {
    let kf = k as f64;
    1.0 / (y.powi(k as i32 - 2) - (kf - 1.0) / kf * y.powi(k as i32 - 1))
}

/// Largest root of [`y_equation`] in (0, 1), to machine precision.
pub fn c_star_y(k: usize) -> f64 {
    assert!(k >= 3);
    let step = 1e-3;
    let mut hi = 1.0f64;
    let mut lo = hi - step;
    while y_equation(k, lo) >= 0.0 {
        hi = lo;
        lo -= step;
        assert!(lo > 0.0, "y-equation has no negative region for k={k}");
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if y_equation(k, mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Density at which the predicted 2-core has as many edges as vertices.
/// Zero for k = 2.
///
/// The y root is bisected to machine precision and `c_from_y` is smooth
/// there, so the result is accurate far beyond any sensible `tol`.
pub fn c_star(k: usize, tol: f64) -> f64 {
    assert!(k >= 2);
    if k == 2 {
        return 0.0;
    }
    let y = c_star_y(k);
    if k == 3 {
        let r = y_equation_k3_log_form(y);
        assert!(r.abs() < 1e-9, "k=3 log form disagrees: residual {r}");
    }
    let c = c_from_y(k, y);
    debug_assert!(c.is_finite() && c > 0.0 && tol > 0.0);
    c
}

/// Predicted `(|C_2|/n, |E(C_2)|/n)` for the 2-core.
pub fn core_fractions(k: usize, c: f64, tol: f64) -> (f64, f64) {
    let x = largest_fixed_point(k, c, tol);
    core_fractions_at(k, c, x)
}

fn core_fractions_at(k: usize, c: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let kf = k as f64;
    let root = x.powf(1.0 / (kf - 1.0));
    let xk = x * root;
    let core_v = root - c * x + c * xk;
    let core_e = c * xk / kf;
    (core_v, core_e)
}

/// `1 - e^{-cx}(1 + cx)`, equal to the vertex fraction of
/// [`core_fractions`] whenever `x` is a fixed point.
pub fn core_v_alternate(k: usize, c: f64) -> f64 {
    let x = largest_fixed_point(k, c, DEFAULT_FIXED_POINT_TOL);
    core_v_alternate_at(c, x)
}

pub fn core_v_alternate_at(c: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let t = c * x;
    1.0 - (-t).exp() * (1.0 + t)
}

/// Rank/n below c*: every column is independent.
pub fn rank_fraction_below(k: usize, c: f64) -> f64 {
    c / k as f64
}

/// Rank/n above c*: `(c/k)(1 - x^{k/(k-1)}) + core_v`.
pub fn rank_fraction_above(k: usize, c: f64, tol: f64) -> f64 {
    let x = largest_fixed_point(k, c, tol);
    let (core_v, core_e) = core_fractions_at(k, c, x);
    c / k as f64 - core_e + core_v
}

/// Predicted rank/n at density `c`.
pub fn rank_fraction(k: usize, c: f64, tol: f64) -> f64 {
    if c < c_star(k, DEFAULT_THRESHOLD_TOL) {
        rank_fraction_below(k, c)
    } else {
        rank_fraction_above(k, c, tol)
    }
}

pub fn theory_point(k: usize, c: f64, tol: f64) -> TheoryPoint {
    let x = largest_fixed_point(k, c, tol);
    let (core_v, core_e) = core_fractions_at(k, c, x);
    TheoryPoint {
        k,
        c,
        x,
        core_v,
        core_e,
        rank_frac: rank_fraction(k, c, tol),
    }
}

pub fn thresholds(k: usize, tol: f64) -> Result<Thresholds> {
    if k < 2 {
        return Err(Error::Precondition(format!("k must be at least 2, got {k}")));
    }
    let c_hat = if k >= 3 { Some(hat_c(k, tol)?) } else { None };
    Ok(Thresholds {
        k,
        c_hat,
        c_star: c_star(k, tol),
    })
}

/// Limit of `P(rank = n*)` for `m = n(ln n + c)/k`.
pub fn full_rank_probability(c: f64) -> f64 {
    (-(-c).exp()).exp()
}

/// Expected number of `s`-sets of all-zero rows, `e^{-cs}/s!`.
pub fn expected_zero_row_sets(s: u32, c: f64) -> f64 {
    assert!(s >= 1, "s must be at least 1");
    let log_fact: f64 = (2..=s).map(|i| (i as f64).ln()).sum();
    (-c * s as f64 - log_fact).exp()
}

fn mwb_integrand(k: usize, c: f64) -> f64 {
    let kf = k as f64;
    let x = largest_fixed_point(k, c, INNER_TOL);
    (-c * x).exp() * (1.0 + (kf - 1.0) * c * x / kf) - c / kf * (1.0 - x)
}

// Beyond C_max the fixed point satisfies 1 - x <= min(0.01, 1.5k e^{-c}),
// so the integrand is bounded by (1 + 2.5c) e^{-0.99c}.
const TAIL_A: f64 = 2.5;
const TAIL_B: f64 = 0.99;

fn tail_bound(c: f64) -> f64 {
    (-TAIL_B * c).exp() * ((1.0 + TAIL_A * c) / TAIL_B + TAIL_A / (TAIL_B * TAIL_B))
}

fn truncation_point(k: usize, start: f64, budget: f64) -> f64 {
    let mut c = start + 1.0;
    loop {
        let x = largest_fixed_point(k, c, INNER_TOL);
        let gap = 1.0 - x;
        if tail_bound(c) <= budget && gap <= 0.01 && gap <= 1.5 * k as f64 * (-c).exp() {
            return c;
        }
        c += 0.25;
    }
}

/// Limit of `n^{k-2} E(W) / (k-1)!` for the minimum-weight basis.
pub fn mwb_limit(k: usize, quad_tol: f64) -> MwbLimit {
    assert!(k >= 2, "k must be at least 2");
    assert!(quad_tol > 0.0, "quad_tol must be positive");
    let kf = k as f64;
    let cs = c_star(k, DEFAULT_THRESHOLD_TOL);
    let c_max = truncation_point(k, cs.max(1.0), quad_tol / 2.0);
    let f = |c: f64| mwb_integrand(k, c);
    // the integrand has a kink where x(c) jumps off zero
    let pieces: Vec<(f64, f64)> = if k == 2 {
        vec![(0.0, 1.0), (1.0, c_max)]
    } else {
        vec![(cs, c_max)]
    };
    let per = quad_tol / 2.0 / pieces.len() as f64;
    let mut value = cs * (1.0 - cs / (2.0 * kf));
    let mut error = tail_bound(c_max);
    for (a, b) in pieces {
        let q = adaptive_simpson(f, a, b, per);
        value += q.value;
        error += q.error;
    }
    MwbLimit {
        k,
        value,
        quad_error: error,
        c_star: cs,
        c_max,
    }
}

/// `[(k/2)(1 - 5e^{-k}), (k/2)(1 + 5e^{-k})]`, valid for k >= 3.
pub fn mwb_large_k_bounds(k: usize) -> Result<Interval> {
    if k < 3 {
        return Err(Error::Precondition(format!(
            "large-k bounds need k >= 3, got k={k}"
        )));
    }
    let half = k as f64 / 2.0;
    let eps = 5.0 * (-(k as f64)).exp();
    Ok(Interval {
        lo: half * (1.0 - eps),
        hi: half * (1.0 + eps),
    })
}

/// `[k(1 - 1.5e^{-k}), k]`, valid for k >= 4.
pub fn c_star_bounds(k: usize) -> Result<Interval> {
    if k < 4 {
        return Err(Error::Precondition(format!(
            "c* bounds need k >= 4, got k={k}"
        )));
    }
    let kf = k as f64;
    Ok(Interval {
        lo: kf * (1.0 - 1.5 * (-kf).exp()),
        hi: kf,
    })
}
