//! Scalar root finding.

use crate::error::{Error, Result};

/// Outcome of a bracketing solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Bracketed {
    pub root: f64,
    pub iterations: usize,
    /// Function values at the successive midpoints.
    pub trace: Vec<(f64, f64)>,
}

/// Bisection on `[lo, hi]` until the bracket is no wider than `tol`.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Bracketed>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(Bracketed { root: a, iterations: 0, trace: vec![(a, fa)] });
    }
    if fb == 0.0 {
        return Ok(Bracketed { root: b, iterations: 0, trace: vec![(b, fb)] });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { lo: a, hi: b, f_lo: fa, f_hi: fb });
    }
    let mut trace = Vec::new();
    let mut iterations = 0;
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        iterations += 1;
        trace.push((m, fm));
        if fm == 0.0 {
            return Ok(Bracketed { root: m, iterations, trace });
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(Bracketed { root: 0.5 * (a + b), iterations, trace })
}

/// Newton's method safeguarded by bisection.
///
/// `f` returns the value and derivative. Steps that leave the current
/// bracket or fail to halve it are replaced by bisection steps, so the
/// iteration converges whenever `[lo, hi]` brackets a root.
pub fn newton_bisect<F>(mut f: F, lo: f64, hi: f64, x_tol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (fa, _) = f(a);
    let (fb, _) = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo: a, hi: b, f_lo: fa, f_hi: fb });
    }
    let increasing = fb > 0.0;
    let mut x = 0.5 * (a + b);
    let mut step_before_last = b - a;
    let mut last_step = step_before_last;
    for _ in 0..max_iter {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx > 0.0) == increasing {
            b = x;
        } else {
            a = x;
        }
        let newton = x - fx / dfx;
        // Fall back to bisection when Newton leaves the bracket or the
        // step is not shrinking fast enough.
        let next = if newton > a && newton < b && (fx / dfx).abs() < 0.5 * step_before_last.abs() {
            newton
        } else {
            0.5 * (a + b)
        };
        step_before_last = last_step;
        last_step = next - x;
        let scale = x.abs().max(1.0);
        if last_step.abs() <= x_tol * scale || b - a <= x_tol * scale {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence(max_iter))
}
