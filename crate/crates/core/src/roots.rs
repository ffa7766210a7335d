//! Scalar root finding and minimization on brackets.

use crate::error::{Error, Result};

/// Bisection on a sign change of `f` over `[lo, hi]`, stopping at width `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.signum() != fhi.signum()) || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Bisection(format!(
            "no sign change on [{lo}, {hi}]: f = ({flo:e}, {fhi:e})"
        )));
    }
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
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
    Ok(0.5 * (lo + hi))
}

/// Secant iteration kept inside `[lo, hi]`; returns the last iterate that
/// did not leave the bracket.
pub fn secant_polish<F: Fn(f64) -> f64>(f: F, x0: f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let h = (hi - lo).abs().max(1e-12) * 1e-3;
    let mut a = x0;
    let mut b = (x0 + h).min(hi);
    if b == a {
        b = (x0 - h).max(lo);
    }
    let mut fa = f(a);
    let mut fb = f(b);
    let mut best = if fa.abs() <= fb.abs() { a } else { b };
    let mut best_val = fa.abs().min(fb.abs());
    for _ in 0..60 {
        if fb == fa {
            break;
        }
        let next = b - fb * (b - a) / (fb - fa);
        if !next.is_finite() || next < lo || next > hi {
            break;
        }
        a = b;
        fa = fb;
        b = next;
        fb = f(b);
        if fb.abs() < best_val {
            best = b;
            best_val = fb.abs();
        }
        if (b - a).abs() <= tol {
            break;
        }
    }
    best
}

/// Bisection to `coarse_tol` then secant polish to `fine_tol`.
pub fn refine_root<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    coarse_tol: f64,
    fine_tol: f64,
) -> Result<f64> {
    let x = bisect(&f, lo, hi, coarse_tol)?;
    let w = coarse_tol.max(fine_tol);
    let (a, b) = ((x - w).max(lo), (x + w).min(hi));
    Ok(secant_polish(&f, x, a, b, fine_tol))
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..300 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Central difference with step `h`.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Solves `g(x) = target` for a strictly monotone `g` on `[lo, hi]`.
pub fn invert_monotone<F: Fn(f64) -> f64>(
    g: F,
    target: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    bisect(|x| g(x) - target, lo, hi, tol)
}
