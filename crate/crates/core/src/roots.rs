//! Bracketed scalar root finding.
//!
//! Newton steps are taken when they stay inside the current bracket and
//! shrink it fast enough; otherwise the bracket is bisected. The bracket is
//! kept throughout, so convergence never depends on the Newton iterates.

use crate::error::{Error, Result};

/// Absolute tolerance on the root location used throughout the analysis.
pub const ROOT_TOL: f64 = 1e-12;
/// Iteration cap for [`safeguarded_newton`].
pub const MAX_ITER: usize = 200;

/// Finds a root of `f` in `[lo, hi]`, where `f` returns `(value, derivative)`
/// and `f(lo)`, `f(hi)` have opposite signs (or one of them is zero).
pub fn safeguarded_newton<F>(f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    if !(lo < hi) {
        return Err(Error::RootFinding(format!("empty bracket [{lo}, {hi}]")));
    }
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::RootFinding(format!("no sign change on [{lo}, {hi}]: f = {flo}, {fhi}")));
    }
    // Orient so that f(neg) < 0 < f(pos).
    let (mut neg, mut pos) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut reference_width = hi - lo;
    let mut stalled = 0;

    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
        let (a, b) = if neg < pos { (neg, pos) } else { (pos, neg) };
        let width = b - a;
        if width <= 0.5 * reference_width {
            reference_width = width;
            stalled = 0;
        } else {
            stalled += 1;
        }

        let newton = x - fx / dfx;
        let next = if stalled < 2 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
        if (next - x).abs() <= tol || width <= tol {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::RootFinding(format!("no convergence after {max_iter} iterations (bracket [{neg}, {pos}])")))
}
