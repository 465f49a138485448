//! Adaptive Simpson quadrature, used as an independent reference for the
//! AGM-based elliptic routines.

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
}

/// `∫_a^b f` to absolute tolerance `tol` (Richardson-corrected Simpson).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    recurse(&f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// Inverts `u = ∫_0^φ dθ / √(1 − m sin²θ)` for `φ ∈ [0, π/2]` by bisection.
pub fn invert_incomplete_first_kind(u: f64, m: f64, tol: f64) -> f64 {
    let integrand = |t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt();
    let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if adaptive_simpson(integrand, 0.0, mid, 1e-14) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
