/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the per-panel Richardson error estimates.
    pub error: f64,
    pub evaluations: usize,
}

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson on `[a, b]` with absolute tolerance `eps`.
///
/// A panel is accepted when `|S_left + S_right - S_whole| <= 15 eps_panel`;
/// the Richardson-corrected value is returned and `|...| / 15` is added to
/// the error estimate. Panels are split with half the tolerance each and
/// summed left to right, so the result is deterministic.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, eps: f64) -> Quadrature {
    if a == b {
        return Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        };
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut q = Quadrature {
        value: 0.0,
        error: 0.0,
        evaluations: 3,
    };
    recurse(&f, a, b, fa, fm, fb, whole, eps, MAX_DEPTH, &mut q);
    q
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
    q: &mut Quadrature,
) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    q.evaluations += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        q.value += left + right + delta / 15.0;
        q.error += delta.abs() / 15.0;
        return;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1, q);
    recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1, q);
}
