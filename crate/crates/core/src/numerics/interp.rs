use crate::numerics::extrap::least_squares;
use crate::numerics::{Grid, NumericsError};
use crate::Real;

/// Start index of the `m`-point window around `x` in the sorted abscissae `xs`.
fn window_start<T: Real>(xs: &[T], x: T, m: usize) -> usize {
    let m = m.min(xs.len());
    let right = xs.partition_point(|&t| t < x);
    right.saturating_sub(m / 2).min(xs.len() - m)
}

fn lagrange_window<T: Real>(xs: &[T], ys: &[T], x: T) -> T {
    let mut sum = T::zero();
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut w = T::one();
        for (k, &xk) in xs.iter().enumerate() {
            if k != i {
                w *= (x - xk) / (xi - xk);
            }
        }
        sum += w * yi;
    }
    sum
}

fn lagrange_window_derivative<T: Real>(xs: &[T], ys: &[T], x: T) -> T {
    let mut sum = T::zero();
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut dw = T::zero();
        for (l, &xl) in xs.iter().enumerate() {
            if l == i {
                continue;
            }
            let mut term = T::one() / (xi - xl);
            for (k, &xk) in xs.iter().enumerate() {
                if k != i && k != l {
                    term *= (x - xk) / (xi - xk);
                }
            }
            dw += term;
        }
        sum += dw * yi;
    }
    sum
}

/// Local `m`-point Lagrange interpolation on sorted, distinct abscissae.
pub fn lagrange_at<T: Real>(xs: &[T], ys: &[T], x: T, m: usize) -> T {
    let s = window_start(xs, x, m);
    let e = s + m.min(xs.len());
    lagrange_window(&xs[s..e], &ys[s..e], x)
}

/// Derivative of the local `m`-point Lagrange interpolant.
pub fn lagrange_derivative_at<T: Real>(xs: &[T], ys: &[T], x: T, m: usize) -> T {
    let s = window_start(xs, x, m);
    let e = s + m.min(xs.len());
    lagrange_window_derivative(&xs[s..e], &ys[s..e], x)
}

/// Uniform-grid variant of [`lagrange_at`] that avoids building the node list.
pub(crate) fn lagrange_on_grid<T: Real>(grid: &Grid<T>, ys: &[T], x: T, m: usize) -> T {
    let m = m.min(ys.len());
    let i = grid.locate(x);
    let s = (i + 1).saturating_sub(m / 2).min(ys.len() - m);
    let xs: Vec<T> = (s..s + m).map(|k| grid.node(k)).collect();
    lagrange_window(&xs, &ys[s..s + m], x)
}

/// Least-squares polynomial of the given degree, returned as coefficients in
/// the shifted variable `(x − center)/scale` together with `(center, scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    pub coefficients: Vec<T>,
    pub center: T,
    pub scale: T,
}

pub fn polyfit<T: Real>(xs: &[T], ys: &[T], degree: usize) -> Result<Polynomial<T>, NumericsError> {
    if xs.len() != ys.len() {
        return Err(NumericsError::LengthMismatch { expected: xs.len(), got: ys.len() });
    }
    let lo = xs.iter().copied().fold(T::infinity(), T::min);
    let hi = xs.iter().copied().fold(T::neg_infinity(), T::max);
    let center = (lo + hi) * T::lit(0.5);
    let mut scale = (hi - lo) * T::lit(0.5);
    if !(scale > T::zero()) {
        scale = T::one();
    }
    let rows = xs
        .iter()
        .map(|&x| {
            let u = (x - center) / scale;
            let mut p = T::one();
            (0..=degree)
                .map(|_| {
                    let v = p;
                    p *= u;
                    v
                })
                .collect()
        })
        .collect();
    let fit = least_squares(rows, ys.to_vec())?;
    Ok(Polynomial { coefficients: fit.solution, center, scale })
}

pub fn polyval<T: Real>(p: &Polynomial<T>, x: T) -> T {
    let u = (x - p.center) / p.scale;
    p.coefficients.iter().rev().fold(T::zero(), |acc, &c| acc * u + c)
}

pub fn polyval_derivative<T: Real>(p: &Polynomial<T>, x: T) -> T {
    let u = (x - p.center) / p.scale;
    let mut acc = T::zero();
    for (k, &c) in p.coefficients.iter().enumerate().skip(1).rev() {
        acc = acc * u + c * T::from_usize_lossy(k);
    }
    acc / p.scale
}
