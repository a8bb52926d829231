//! Deterministic numerical kernels shared by the rest of the crate.

mod diff;
pub(crate) mod extrap;
mod grid;
pub(crate) mod interp;
mod quad;
mod roots;

pub use diff::central_diff;
pub use extrap::{extrapolate, extrapolate_with_bound, Extrapolation, DEFAULT_CONDITION_BOUND};
pub use grid::{Grid, SampledFunction};
pub use interp::{lagrange_at, lagrange_derivative_at, polyfit, polyval, polyval_derivative, Polynomial};
pub use quad::{cumulative, trapezoid};
pub use roots::{bisect, bisection_iterations, try_bisect};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("grid needs at least {min} interval(s), got {got}")]
    TooFewIntervals { min: usize, got: usize },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("sample count {got} does not match grid length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("no sign change on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("invalid bisection arguments: a = {a}, b = {b}, tol = {tol}")]
    InvalidBracket { a: f64, b: f64, tol: f64 },
    #[error("need at least {needed} distinct n values for order {order}, got {got}")]
    InsufficientData { needed: usize, order: usize, got: usize },
    #[error("ill-conditioned fit: condition estimate {condition:.3e} exceeds {bound:.3e}")]
    IllConditioned { condition: f64, bound: f64 },
}
