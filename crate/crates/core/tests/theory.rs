use hyperrank::sampler::SeedSpec;
use hyperrank::theory::*;

/// Largest root of x = (1 - e^{-cx})^{k-1} by a downward scan for the first
/// sign change followed by bisection. Shares no code with the library.
fn fixed_point_oracle(k: usize, c: f64) -> f64 {
    let h = |x: f64| x - (1.0 - (-c * x).exp()).powi(k as i32 - 1);
    let step = 1e-4;
    let mut hi = 1.0;
    let mut lo = hi - step;
    while lo > step {
        if h(lo) <= 0.0 {
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if h(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        hi = lo;
        lo -= step;
    }
    0.0
}

/// ĉ_k as the minimum over x of the density whose fixed point is x,
/// C(x) = -ln(1 - x^{1/(k-1)}) / x, by a scan refined by golden section.
fn hat_c_oracle(k: usize) -> f64 {
    let f = |x: f64| -(1.0 - x.powf(1.0 / (k as f64 - 1.0))).ln() / x;
    let n = 100_000;
    let (mut best, mut at) = (f64::INFINITY, 0.5);
    for i in 1..n {
        let x = i as f64 / n as f64;
        if f(x) < best {
            best = f(x);
            at = x;
        }
    }
    let (mut a, mut b) = (at - 1.0 / n as f64, at + 1.0 / n as f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

/// c* as the root of |C_2| = |E(C_2)| above ĉ, using the oracle fixed point.
fn c_star_oracle(k: usize) -> f64 {
    let balance = |c: f64| {
        let x = fixed_point_oracle(k, c);
        let r = x.powf(1.0 / (k as f64 - 1.0));
        (r - c * x + c * x * r) - c * x * r / k as f64
    };
    let (mut lo, mut hi) = (hat_c_oracle(k) + 1e-3, k as f64 + 1.0);
    assert!(balance(lo) > 0.0 && balance(hi) < 0.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if balance(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// Reference values computed independently with 30-digit arithmetic.
const C_STAR: [f64; 11] = [
    0.0, 2.7538058, 3.9070807, 4.9621920, 5.9842773, 6.9934463, 7.9972832, 8.9988831, 9.9995449,
    10.9998161, 11.9999262,
];
const MWB: [f64; 11] = [
    1.2020569, 1.5627350, 2.0206303, 2.5071507, 3.0025516, 3.5009246, 4.0003376, 4.5001238,
    5.0000456, 5.5000172, 6.0000062,
];
const ZETA3: f64 = 1.202_056_903_159_594_3;

#[test]
fn fixed_point_matches_bisection_oracle() {
    for k in 2..=8 {
        for i in 0..60 {
            let c = 0.25 * i as f64;
            let x = largest_fixed_point(k, c, 1e-13);
            let o = fixed_point_oracle(k, c);
            // skip the narrow windows where the oracle's scan cannot resolve
            // a root close to a tangency
            if (o == 0.0) != (x == 0.0) {
                let near = k >= 3 && (c - hat_c(k, 1e-9).unwrap()).abs() < 0.01
                    || k == 2 && (c - 1.0).abs() < 0.01;
                assert!(near, "k={k} c={c}: {x} vs {o}");
                continue;
            }
            assert!((x - o).abs() < 1e-8, "k={k} c={c}: {x} vs {o}");
            assert!(fixed_point_residual(k, c, x).abs() <= 1e-13);
        }
    }
}

#[test]
fn fixed_point_residual_within_tolerance() {
    let mut rng = SeedSpec::new(17, 0).rng();
    for _ in 0..1000 {
        let k = 2 + rng.below(9) as usize;
        let c = 12.0 * rng.unit();
        for tol in [1e-6, 1e-10] {
            let x = largest_fixed_point(k, c, tol);
            assert!((0.0..=1.0).contains(&x));
            if x > 0.0 {
                assert!(fixed_point_residual(k, c, x).abs() <= tol, "k={k} c={c}");
            }
        }
    }
}

#[test]
fn hat_c_matches_minimum_oracle() {
    let mut prev = 0.0;
    for k in 3..=10 {
        let h = hat_c(k, 1e-8).unwrap();
        let o = hat_c_oracle(k);
        assert!((h - o).abs() < 1e-5, "k={k}: {h} vs {o}");
        assert!(h > prev, "hat_c must increase with k");
        assert!(h <= c_star(k, 1e-6));
        prev = h;
    }
    let h3 = hat_c(3, DEFAULT_THRESHOLD_TOL).unwrap();
    assert!(h3 > 2.4 && h3 < 2.5);
    assert!(hat_c(2, 1e-6).is_err());
}

#[test]
fn threshold_separates_empty_and_nonempty_fixed_point() {
    for k in 3..=10 {
        let h = hat_c(k, 1e-9).unwrap();
        for d in [0.1, 0.05, 0.01, 1e-3, 1e-4] {
            assert_eq!(largest_fixed_point(k, h - d, 1e-10), 0.0, "k={k} below by {d}");
            assert!(largest_fixed_point(k, h + d, 1e-10) > 0.0, "k={k} above by {d}");
        }
    }
}

#[test]
fn c_star_matches_dual_oracle_and_reference() {
    assert_eq!(c_star(2, 1e-6), 0.0);
    for k in 3..=10 {
        let c = c_star(k, 1e-8);
        let o = c_star_oracle(k);
        assert!((c - o).abs() < 1e-6, "k={k}: {c} vs {o}");
    }
    for k in 2..=12 {
        assert!((c_star(k, 1e-8) - C_STAR[k - 2]).abs() < 1e-6, "k={k}");
    }
}

#[test]
fn k3_log_form_shares_the_root() {
    let y = c_star_y(3);
    assert!(y_equation(3, y).abs() < 1e-14);
    assert!(y_equation_k3_log_form(y).abs() < 1e-12);
    assert!((y - 0.883_413_97).abs() < 1e-8);
    // the fixed point at c* is y^{k-1}
    let x = largest_fixed_point(3, c_star(3, 1e-8), 1e-14);
    assert!((x - y * y).abs() < 1e-9);
    assert!((x - 0.780_420_2).abs() < 1e-7);
}

#[test]
fn core_balance_at_c_star() {
    let tol = DEFAULT_THRESHOLD_TOL;
    for k in 3..=10 {
        let (v, e) = core_fractions(k, c_star(k, tol), DEFAULT_FIXED_POINT_TOL);
        assert!((v - e).abs() <= 10.0 * tol, "k={k}: {v} vs {e}");
    }
}

#[test]
fn core_fractions_vanish_below_threshold() {
    for k in 3..=6 {
        let h = hat_c(k, 1e-6).unwrap();
        assert_eq!(core_fractions(k, h - 0.05, 1e-10), (0.0, 0.0));
        assert_eq!(core_v_alternate(k, h - 0.05), 0.0);
    }
}

#[test]
fn two_core_vertex_formulas_agree() {
    let mut rng = SeedSpec::new(23, 0).rng();
    let mut checked = 0;
    while checked < 1000 {
        let k = 3 + rng.below(8) as usize;
        let c = hat_c(k, 1e-6).unwrap() + 0.01 + 10.0 * rng.unit();
        let x = largest_fixed_point(k, c, 1e-14);
        let (v, _) = core_fractions(k, c, 1e-14);
        assert!((v - core_v_alternate_at(c, x)).abs() < 1e-9, "k={k} c={c}");
        checked += 1;
    }
    let (v, _) = core_fractions(5, 10.0, 1e-12);
    assert!((v - core_v_alternate(5, 10.0)).abs() < 1e-9);
}

#[test]
fn rank_fraction_is_continuous_at_c_star() {
    for k in 3..=10 {
        let c = c_star(k, DEFAULT_THRESHOLD_TOL);
        let below = rank_fraction_below(k, c);
        let above = rank_fraction_above(k, c, DEFAULT_FIXED_POINT_TOL);
        assert!((below - above).abs() <= 10.0 * DEFAULT_THRESHOLD_TOL, "k={k}");
    }
    assert!((rank_fraction(3, 1.0, 1e-10) - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn rank_fraction_is_bounded() {
    for k in 2..=8 {
        for i in 0..80 {
            let c = 0.2 * i as f64;
            let p = theory_point(k, c, 1e-10);
            assert!(p.rank_frac <= (c / k as f64).min(1.0) + 1e-12, "k={k} c={c}");
            assert!(p.core_v >= 0.0 && p.core_e >= 0.0);
        }
    }
}

#[test]
fn fixed_point_lower_bound_above_c_star() {
    for k in 4..=10 {
        let cs = c_star(k, 1e-8);
        for i in 0..40 {
            let c = cs + 0.25 * i as f64;
            let x = largest_fixed_point(k, c, 1e-13);
            assert!(x >= 1.0 - 1.5 * k as f64 * (-c).exp(), "k={k} c={c}");
        }
    }
    assert!(largest_fixed_point(4, 10.0, 1e-10) >= 1.0 - 6.0 * (-10f64).exp());
}

#[test]
fn mwb_limit_matches_reference_and_zeta3() {
    for k in 2..=12 {
        let l = mwb_limit(k, DEFAULT_QUAD_TOL);
        assert!(l.value > 0.0);
        assert!(l.quad_error < 2e-6);
        assert!((l.value - MWB[k - 2]).abs() < 1e-6, "k={k}: {}", l.value);
    }
    assert!((mwb_limit(2, 1e-9).value - ZETA3).abs() < 1e-8);
}

#[test]
fn halving_quad_tol_moves_less_than_reported_error() {
    for k in 2..=10 {
        let a = mwb_limit(k, 1e-6);
        let b = mwb_limit(k, 5e-7);
        assert!((a.value - b.value).abs() < a.quad_error, "k={k}");
    }
}

#[test]
fn bounds_contain_solver_values() {
    for k in 4..=12 {
        let b = c_star_bounds(k).unwrap();
        assert!(b.contains(c_star(k, 1e-6)), "k={k}");
    }
    let b4 = c_star_bounds(4).unwrap();
    assert!((b4.lo - 3.890_113).abs() < 1e-5 && b4.hi == 4.0);
    for k in 3..=12 {
        let b = mwb_large_k_bounds(k).unwrap();
        assert!(b.contains(mwb_limit(k, 1e-6).value), "k={k}");
        assert!(b.width() / k as f64 <= 5.0 * (-(k as f64)).exp() + 1e-15);
    }
    let b3 = mwb_large_k_bounds(3).unwrap();
    assert!((b3.lo - 1.127).abs() < 1e-3 && (b3.hi - 1.873).abs() < 1e-3);
}

#[test]
fn full_rank_probability_limits() {
    assert!((full_rank_probability(0.0) - 0.367_879).abs() < 1e-6);
    assert!(full_rank_probability(40.0) > 1.0 - 1e-15);
    assert!(full_rank_probability(-10.0) < 1e-9);
    assert!((expected_zero_row_sets(2, 1.0) - (-2f64).exp() / 2.0).abs() < 1e-15);
}
