//! One-dimensional searches: golden-section maximization and bisection.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization of `f` on `[a, b]`.
///
/// Assumes `f` is unimodal on the bracket (boundary maxima are fine: the
/// bracket simply collapses onto the endpoint). Returns `(x_max, f_max)` once
/// the bracket width drops below `x_tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, x_tol: f64) -> Result<(f64, f64)> {
    if !(a < b) {
        return Err(Error::Parameter(format!("bad bracket [{a}, {b}]")));
    }
    let mut lo = a;
    let mut hi = b;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if hi - lo <= x_tol {
            let x = 0.5 * (lo + hi);
            return Ok((x, f(x)));
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    Err(Error::NonConvergence {
        context: "golden-section search",
        evals: 400,
        last: 0.5 * (lo + hi),
    })
}

/// Bisection root of `f` on `[a, b]`; requires a sign change on the bracket.
///
/// Returns the midpoint once the bracket width drops below `x_tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, x_tol: f64) -> Result<f64> {
    let mut lo = a;
    let mut hi = b;
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{a}, {b}]: f(a) = {flo:e}, f(b) = {fhi:e}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= x_tol {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence {
        context: "bisection",
        evals: 200,
        last: 0.5 * (lo + hi),
    })
}
