use crate::numerics::NumericsError;
use crate::Real;

/// Number of halvings needed to shrink `[a, b]` to width `tol`: `⌈log₂((b−a)/tol)⌉`.
pub fn bisection_iterations<T: Real>(a: T, b: T, tol: T) -> usize {
    let r = ((b - a) / tol).to_f64_lossy();
    if r <= 1.0 {
        0
    } else {
        r.log2().ceil() as usize
    }
}

/// Bisection with a fixed iteration count; the returned midpoint is within
/// `tol` of a root of `f` in `[a, b]`.
pub fn bisect<T: Real>(f: impl FnMut(T) -> T, a: T, b: T, tol: T) -> Result<T, NumericsError> {
    try_bisect(f, a, b, tol).map(|(m, _)| m)
}

/// Like [`bisect`], also returning the final bracket width.
///
/// An exact zero at a probe point ends the iteration early.
pub fn try_bisect<T: Real>(mut f: impl FnMut(T) -> T, a: T, b: T, tol: T) -> Result<(T, T), NumericsError> {
    if !(a < b) || !(tol > T::zero()) || !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::InvalidBracket { a: a.to_f64_lossy(), b: b.to_f64_lossy(), tol: tol.to_f64_lossy() });
    }
    let fa = f(a);
    let fb = f(b);
    if !(fa * fb < T::zero()) {
        return Err(NumericsError::NoSignChange {
            a: a.to_f64_lossy(),
            b: b.to_f64_lossy(),
            fa: fa.to_f64_lossy(),
            fb: fb.to_f64_lossy(),
        });
    }
    let (mut lo, mut hi) = (a, b);
    let neg_at_lo = fa < T::zero();
    let half = T::lit(0.5);
    for _ in 0..bisection_iterations(a, b, tol) {
        let m = lo + (hi - lo) * half;
        let fm = f(m);
        if fm == T::zero() {
            return Ok((m, T::zero()));
        }
        if (fm < T::zero()) == neg_at_lo {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok((lo + (hi - lo) * half, hi - lo))
}
