//! Reference problems used throughout the tests and the CLI examples.

use crate::model::Problem;
use crate::Real;

/// Expressions `[p, r, m11, m12, m21, m22, omega]` of the smooth reference problem
/// (with `θ = π/3`): `μ = 0.075 sin 2x`, `v = 0.2 + 0.1 cos x`, `μ(π) = 0`.
pub const P1_EXPRS: [&str; 7] = [
    "0.15*cos(2*x) + 0.2 + 0.1*cos(x)",
    "0.15*cos(2*x) - 0.2 - 0.1*cos(x)",
    "0.2*cos(x - t)",
    "0.3*cos(x)*cos(t)",
    "0",
    "0.1*cos(x - t)",
    "0.1*(1 + x)",
];

/// Constant potentials `p = r = 0.2`, so `μ(π) = 0.2π ≠ 0`.
pub const COUNTER_EXPRS: [&str; 7] = ["0.2", "0.2", "0", "0", "0", "0", "0"];

pub fn p1<T: Real>(n_intervals: usize) -> Problem<T> {
    Problem::from_exprs(T::FRAC_PI_3(), P1_EXPRS, n_intervals).expect("fixture is valid")
}

/// All coefficients zero, `θ = π/2`.
pub fn p0<T: Real>(n_intervals: usize) -> Problem<T> {
    Problem::zero(T::FRAC_PI_2(), n_intervals).expect("fixture is valid")
}

pub fn counter<T: Real>(n_intervals: usize) -> Problem<T> {
    Problem::from_exprs(T::FRAC_PI_3(), COUNTER_EXPRS, n_intervals).expect("fixture is valid")
}
