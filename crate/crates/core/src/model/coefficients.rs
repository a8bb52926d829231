use crate::numerics::{cumulative, trapezoid, SampledFunction};
use crate::Real;

use super::{ModelError, Problem};

/// `|sin 2θ|` at or below this is treated as degenerate (the `v(0)` estimate divides by it).
pub const DEGENERATE_SIN_2THETA: f64 = 0.1;

/// Coefficient functions and spectral constants derived from a [`Problem`].
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients<T> {
    pub theta: T,
    /// `μ(x) = ½∫₀ˣ (p + r)`.
    pub mu: SampledFunction<T>,
    /// `v(x) = ½(p − r)`.
    pub v: SampledFunction<T>,
    /// `∫₀ˣ (M₁₁(t,t) − M₂₂(t,t)) dt`, the quoted amplitude coefficient.
    pub big_k: SampledFunction<T>,
    /// `∫₀ˣ (M₁₁(t,t) + M₂₂(t,t)) dt`, the amplitude coefficient the solutions actually carry.
    pub amp_k: SampledFunction<T>,
    /// `L(x) = ∫₀ˣ (M₁₂(t,t) − M₂₁(t,t)) dt`.
    pub big_l: SampledFunction<T>,
    /// `L′(x) = M₁₂(x,x) − M₂₁(x,x)`, evaluated exactly.
    pub big_l_prime: SampledFunction<T>,
    /// `∫₀ˣ v²`.
    pub v_sq_integral: SampledFunction<T>,
    /// `A = v(0) sin 2θ + ∫₀^π v² − L(π) − 2ω(π)`.
    pub a_const: T,
    /// `B(x) = v(0) sin 2θ + ∫₀ˣ v² − L(x)`.
    pub b_fun: SampledFunction<T>,
    pub omega_pi: T,
    pub omega_0: T,
    /// `d = π + 2θ + 2μ(π)`.
    pub d_const: T,
}

impl<T: Real> Coefficients<T> {
    pub fn mu_pi(&self) -> T {
        self.mu.last()
    }

    /// The `1/n` eigenvalue constant including the parity-dependent boundary term:
    /// `A − 2(−1)ⁿ ω(0) sin θ`.
    pub fn a_effective(&self, n: i64) -> T {
        let sign = if n.rem_euclid(2) == 0 { T::one() } else { -T::one() };
        self.a_const - T::lit(2.0) * sign * self.omega_0 * self.theta.sin()
    }

    /// Endpoint weight seen by nodal data of index parity `n`: `ω(π) + (−1)ⁿ ω(0) sin θ`.
    pub fn omega_effective(&self, n: i64) -> T {
        let sign = if n.rem_euclid(2) == 0 { T::one() } else { -T::one() };
        self.omega_pi + sign * self.omega_0 * self.theta.sin()
    }
}

pub fn derive_coefficients<T: Real>(problem: &Problem<T>) -> Result<Coefficients<T>, ModelError> {
    let grid = problem.grid;
    let expr = |field| move |source| ModelError::Expr { field, source };
    let num = |field| move |source| ModelError::Numerics { field, source };
    let p = problem.p.sample(&grid).map_err(expr("p"))?;
    let r = problem.r.sample(&grid).map_err(expr("r"))?;
    let omega = problem.omega.sample(&grid).map_err(expr("omega"))?;
    let diag = |field, k: &super::KernelSpec<T>| {
        let values = grid.nodes().into_iter().map(|x| k.eval(x, x)).collect::<Result<Vec<_>, _>>().map_err(expr(field))?;
        SampledFunction::new(grid, values).map_err(num(field))
    };
    let m11 = diag("m11", &problem.kernel.m11)?;
    let m12 = diag("m12", &problem.kernel.m12)?;
    let m21 = diag("m21", &problem.kernel.m21)?;
    let m22 = diag("m22", &problem.kernel.m22)?;

    let half = T::lit(0.5);
    let sum_pr = p.zip_with(&r, |a, b| a + b).map_err(num("mu"))?;
    let mu = cumulative(&sum_pr).map(|_, v| v * half).map_err(num("mu"))?;
    let v = p.zip_with(&r, |a, b| half * (a - b)).map_err(num("v"))?;
    let big_k = cumulative(&m11.zip_with(&m22, |a, b| a - b).map_err(num("K"))?);
    let amp_k = cumulative(&m11.zip_with(&m22, |a, b| a + b).map_err(num("K"))?);
    let big_l_prime = m12.zip_with(&m21, |a, b| a - b).map_err(num("L"))?;
    let big_l = cumulative(&big_l_prime);
    let v_sq = v.map(|_, a| a * a).map_err(num("v"))?;
    let v_sq_integral = cumulative(&v_sq);

    let theta = problem.theta();
    let boundary = v.first() * (theta + theta).sin();
    let b_fun = v_sq_integral.zip_with(&big_l, |s, l| boundary + s - l).map_err(num("B"))?;
    let omega_pi = omega.last();
    let omega_0 = omega.first();
    let two = T::lit(2.0);
    let a_const = boundary + trapezoid(&v_sq) - big_l.last() - two * omega_pi;
    let d_const = T::PI() + two * theta + two * mu.last();
    Ok(Coefficients {
        theta,
        mu,
        v,
        big_k,
        amp_k,
        big_l,
        big_l_prime,
        v_sq_integral,
        a_const,
        b_fun,
        omega_pi,
        omega_0,
        d_const,
    })
}

/// Advisory checks on the assumptions of nodal inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionReport<T> {
    pub mu_pi: T,
    /// `|μ(π)| ≤ tol`.
    pub mu_pi_ok: bool,
    /// `|sin 2θ|` too small for the `v(0)` estimate (sign of `v` unresolved).
    pub degenerate_theta: bool,
    /// `v` changes sign on the grid (invisible to `v²`).
    pub v_sign_change: bool,
}

impl<T> InversionReport<T> {
    pub fn all_clear(&self) -> bool {
        self.mu_pi_ok && !self.degenerate_theta && !self.v_sign_change
    }
}

pub fn validate_for_inversion<T: Real>(coeffs: &Coefficients<T>, tol: T) -> InversionReport<T> {
    let mu_pi = coeffs.mu_pi();
    let two_theta = coeffs.theta + coeffs.theta;
    let values = coeffs.v.values();
    let v_sign_change = values.iter().any(|&a| a > T::zero()) && values.iter().any(|&a| a < T::zero());
    InversionReport {
        mu_pi,
        mu_pi_ok: mu_pi.abs() <= tol,
        degenerate_theta: two_theta.sin().abs() <= T::lit(DEGENERATE_SIN_2THETA),
        v_sign_change,
    }
}
