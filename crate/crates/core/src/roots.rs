//! Bracketed bisection, shared by every root search in the crate.

use crate::error::{Error, Result};

/// Upper bound on halvings; 200 exhausts f64 resolution for any bracket.
pub const MAX_BISECTION_ITERATIONS: usize = 200;

/// Finds a sign change of `f` in `[lo, hi]` to absolute width `x_tol`.
///
/// The endpoints may be given in either order. Returns the midpoint of the
/// final bracket, or an endpoint if `f` vanishes there exactly.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    try_bisect(|x| Ok(f(x)), lo, hi, x_tol)
}

/// Fallible variant of [`bisect`]; an error from `f` aborts the search.
pub fn try_bisect<F>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::Numeric(format!(
            "bisection bracket [{a}, {b}] has no sign change (f = {fa}, {fb})"
        )));
    }
    for _ in 0..MAX_BISECTION_ITERATIONS {
        let mid = 0.5 * (a + b);
        if b - a <= x_tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
