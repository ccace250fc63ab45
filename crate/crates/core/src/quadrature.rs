//! Adaptive Simpson quadrature for smooth scalar integrands.

use crate::error::{Error, Result};

pub const DEFAULT_ABS_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_DEPTH: u32 = 60;
const MAX_EVALUATIONS: usize = 2_000_000;

/// Integrates `f` over `[a, b]` by recursive interval bisection.
///
/// A subinterval is accepted once the Richardson-corrected Simpson estimate
/// changes by less than `15 * tol`; the tolerance is halved at each level.
/// Reaching `max_depth` or the evaluation budget without meeting the
/// tolerance is an error. `b < a` returns the negated integral.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, abs_tol: f64, max_depth: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) || abs_tol <= 0.0 {
        return Err(Error::InvalidArgument(
            "quadrature needs finite limits and a positive tolerance".into(),
        ));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut evals = 3usize;
    let flo = f(lo);
    let fhi = f(hi);
    let mid = 0.5 * (lo + hi);
    let fmid = f(mid);
    let whole = simpson(lo, hi, flo, fmid, fhi);

    // Explicit stack to avoid deep recursion.
    struct Segment {
        lo: f64,
        hi: f64,
        flo: f64,
        fmid: f64,
        fhi: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    }
    let mut stack = vec![Segment {
        lo,
        hi,
        flo,
        fmid,
        fhi,
        whole,
        tol: abs_tol,
        depth: 0,
    }];
    let mut total = 0.0;
    while let Some(s) = stack.pop() {
        let mid = 0.5 * (s.lo + s.hi);
        let lm = 0.5 * (s.lo + mid);
        let rm = 0.5 * (mid + s.hi);
        let flm = f(lm);
        let frm = f(rm);
        evals += 2;
        let left = simpson(s.lo, mid, s.flo, flm, s.fmid);
        let right = simpson(mid, s.hi, s.fmid, frm, s.fhi);
        let delta = left + right - s.whole;
        if !delta.is_finite() {
            return Err(Error::Quadrature { lower: lo, upper: hi });
        }
        if delta.abs() <= 15.0 * s.tol {
            total += left + right + delta / 15.0;
            continue;
        }
        if s.depth + 1 >= max_depth || evals > MAX_EVALUATIONS || mid <= s.lo || mid >= s.hi {
            return Err(Error::Quadrature { lower: lo, upper: hi });
        }
        let tol = 0.5 * s.tol;
        stack.push(Segment {
            lo: mid,
            hi: s.hi,
            flo: s.fmid,
            fmid: frm,
            fhi: s.fhi,
            whole: right,
            tol,
            depth: s.depth + 1,
        });
        stack.push(Segment {
            lo: s.lo,
            hi: mid,
            flo: s.flo,
            fmid: flm,
            fhi: s.fmid,
            whole: left,
            tol,
            depth: s.depth + 1,
        });
    }
    Ok(sign * total)
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}
