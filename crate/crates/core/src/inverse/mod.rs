//! Nodal inversion: `θ`, `ω(π)`, `μ` (hence `p + r`) and `v²` (hence `p`
//! and `r` when `L` is known) from nodal points alone.

mod estimators;
mod nodal_set;
mod printed;

pub use estimators::{
    endpoint_value, estimate_f, estimate_g, estimate_h, estimate_theta, fit_phase, g_from_fit, phase_at, stage1,
    theta_sequence, HEstimate, PhaseFit,
};
pub use nodal_set::{select_nodes, NodalSet};
pub use printed::{printed_formulas, PrintedFormulas};

use crate::model::DEGENERATE_SIN_2THETA;
use crate::numerics::{Grid, NumericsError, SampledFunction, DEFAULT_CONDITION_BOUND};
use crate::Real;
use estimators::derivative_on;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InverseError {
    #[error("n = {n}: expected {n} nodes, got {got}")]
    Length { n: i64, got: usize },
    #[error("n = {n}: nodes are not strictly increasing at index {index}")]
    NotIncreasing { n: i64, index: usize },
    #[error("n = {n}: node {index} = {value} is outside (0, π)")]
    OutOfRange { n: i64, index: usize, value: f64 },
    #[error("no nodal data for n = {0}")]
    MissingIndex(i64),
    #[error("no eigenvalue found for n = {0}")]
    MissingEigenvalue(i64),
    #[error("need at least {needed} data points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("estimated θ = {0} is outside (0, π)")]
    ThetaOutOfRange(f64),
    #[error("inversion grid: {0}")]
    InvalidOptions(String),
    #[error("input function is not sampled on the inversion grid")]
    GridMismatch,
    #[error("{0} is not finite")]
    NonFinite(&'static str),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Forward(Box<crate::forward::ForwardError>),
}

/// How the nodal phase `n·xₙʲ − (j + ½)π` is read off at a grid point `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSampling {
    /// Local Lagrange interpolation through the even-`j` and the odd-`j`
    /// nodes separately, averaged. Removes the selection jitter and the
    /// `j`-alternating second-order part of the phase.
    Interpolated { points: usize },
    /// The phase at the node closest to `x`.
    Nearest,
}

/// Window for endpoint extrapolation: grid points at distance
/// `[inner, outer]` from the endpoint, fitted by a polynomial of `degree`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointFit<T> {
    pub inner: T,
    pub outer: T,
    pub degree: usize,
}

impl<T: Real> Default for EndpointFit<T> {
    fn default() -> Self {
        EndpointFit { inner: T::lit(0.2), outer: T::lit(1.2), degree: 4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InversionOptions<T> {
    pub n_list: Vec<i64>,
    pub x_lo: T,
    pub x_hi: T,
    pub grid_points: usize,
    pub sampling: PhaseSampling,
    /// Model orders of the `1/n` fits (capped at `|n_list| − 1`).
    pub theta_order: usize,
    pub phase_order: usize,
    pub h_order: usize,
    pub endpoint_fit: EndpointFit<T>,
    /// Range whose grid points count as interior (means, spreads).
    pub interior: (T, T),
    pub a_max_iter: usize,
    pub a_tol: T,
    /// `|v̂₀|` below this leaves the sign of `v` unresolved.
    pub v0_tol: T,
    pub condition_bound: T,
}

impl<T: Real> Default for InversionOptions<T> {
    fn default() -> Self {
        InversionOptions {
            n_list: vec![50, 100, 200, 400],
            x_lo: T::lit(0.05),
            x_hi: T::PI() - T::lit(0.05),
            grid_points: 101,
            sampling: PhaseSampling::Interpolated { points: 6 },
            theta_order: 1,
            phase_order: 3,
            h_order: 1,
            endpoint_fit: EndpointFit::default(),
            interior: (T::lit(0.2), T::PI() - T::lit(0.2)),
            a_max_iter: 5,
            a_tol: T::lit(1e-10),
            v0_tol: T::lit(1e-3),
            condition_bound: T::lit(DEFAULT_CONDITION_BOUND),
        }
    }
}

impl<T: Real> InversionOptions<T> {
    /// The inversion grid.
    pub fn grid(&self) -> Result<Grid<T>, InverseError> {
        if self.grid_points < 3 {
            return Err(InverseError::InvalidOptions(format!("need at least 3 points, got {}", self.grid_points)));
        }
        if !(self.x_lo > T::zero() && self.x_hi < T::PI()) {
            return Err(InverseError::InvalidOptions(format!(
                "[{}, {}] must lie inside (0, π)",
                self.x_lo, self.x_hi
            )));
        }
        Ok(Grid::interval(self.x_lo, self.x_hi, self.grid_points - 1)?)
    }

    pub(crate) fn interior_indices(&self, xs: &[T]) -> Result<Vec<usize>, InverseError> {
        let idx: Vec<usize> = (0..xs.len()).filter(|&i| xs[i] >= self.interior.0 && xs[i] <= self.interior.1).collect();
        if idx.is_empty() {
            return Err(InverseError::InvalidOptions("no grid points in the interior range".into()));
        }
        Ok(idx)
    }
}

/// The limit functions on the inversion grid with their fit residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitFunctions<T> {
    pub f_hat: SampledFunction<T>,
    pub g_hat: SampledFunction<T>,
    pub h_hat: SampledFunction<T>,
    pub f_residual: Vec<T>,
    pub h_residual: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics<T> {
    /// `f̂(π) + π/2`, which vanishes when `μ(π) = 0`.
    pub f_pi_residual: T,
    /// Relative spread of `ĥ/(μ̂ + θ̂)` over the interior.
    pub h_spread: T,
    /// Number of negative `v̂²` samples clipped to zero.
    pub clip_count: usize,
    /// `|sin 2θ̂|` too small to estimate `v(0)`.
    pub degenerate_theta: bool,
    /// Sign of `v` defaulted to `+`.
    pub v_sign_unresolved: bool,
    pub a_converged: bool,
    pub a_iterations: usize,
    /// Largest difference between the `â` and `ĥ(0)/θ̂` forms of `v̂²`.
    pub v_sq_form_gap: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction<T> {
    pub theta_hat: T,
    pub omega_pi_hat: T,
    /// `None` when `θ̂` is degenerate.
    pub v0_hat: Option<T>,
    /// The spectral constant used for `v̂²`.
    pub a_hat: T,
    /// `A` from `v̂₀² = v²(0)` (non-degenerate `θ` only).
    pub a_hat_anchor: Option<T>,
    /// `A` from the third limit.
    pub a_hat_h: T,
    pub mu_hat: SampledFunction<T>,
    pub mu_prime_hat: SampledFunction<T>,
    pub v_sq_hat: SampledFunction<T>,
    pub v_hat: SampledFunction<T>,
    pub p_hat: SampledFunction<T>,
    pub r_hat: SampledFunction<T>,
    pub limits: LimitFunctions<T>,
    pub printed: PrintedFormulas<T>,
    pub diagnostics: Diagnostics<T>,
}

/// Full reconstruction from nodal data and a known `L` (sampled on any grid
/// covering the inversion grid).
///
/// `v̂² = (ĝ′ + μ̂′(π + 2θ̂) + Â − (π + 2θ̂)²/(2π))/π + L′`. For
/// non-degenerate `θ̂` the constant `Â` is fixed by `v̂²(0) = v̂₀²`.
/// Otherwise it comes from the third limit.
pub fn reconstruct<T: Real>(
    set: &NodalSet<T>,
    l_known: &SampledFunction<T>,
    opts: &InversionOptions<T>,
) -> Result<Reconstruction<T>, InverseError> {
    let grid = opts.grid()?;
    let xs = grid.nodes();
    let interior = opts.interior_indices(&xs)?;
    let pi = T::PI();
    let two_pi = T::TAU();

    let theta = estimate_theta(set, &opts.n_list, opts.theta_order)?;
    let d = pi + theta + theta;
    let fit = fit_phase(set, opts)?;
    let (mu, mu_prime) = stage1(&fit.f, theta)?;
    let g = g_from_fit(&fit, theta)?;
    let h = estimate_h(set, opts, theta, &mu, &g)?;

    let ef = &opts.endpoint_fit;
    let (f_pi, _) = endpoint_value(&fit.f, ef, false)?;
    let (g0, dg0) = endpoint_value(&g, ef, true)?;
    let (g_pi, _) = endpoint_value(&g, ef, false)?;
    let (_, df0) = endpoint_value(&fit.f, ef, true)?;
    let (h0, _) = endpoint_value(&h.h_hat, ef, true)?;

    let omega_pi = (g_pi - pi * theta - pi * pi * T::lit(0.5)) / two_pi;
    let sin2 = (theta + theta).sin();
    let degenerate = sin2.abs() <= T::lit(DEGENERATE_SIN_2THETA);
    let v0 = (!degenerate).then(|| (g0 + theta * d) / (pi * sin2));

    let (l_prime, l_prime0) = derivative_on(l_known, &grid)?;
    // v²(0) = (ĝ′(0) + μ̂′(0) d + Â − d²/(2π))/π + L′(0), with μ̂′(0) = f̂′(0) + d/(2π).
    let a_anchor = v0.map(|v0| pi * (v0 * v0 - l_prime0) - dg0 - (df0 + d / two_pi) * d + d * d / two_pi);
    let a = a_anchor.unwrap_or(h.a_hat);

    let dg = crate::numerics::central_diff(&g)?;
    let base: Vec<T> = (0..xs.len()).map(|i| dg.values()[i] + mu_prime.values()[i] * d).collect();
    let v_sq_raw: Vec<T> = (0..xs.len()).map(|i| (base[i] + a - d * d / two_pi) / pi + l_prime[i]).collect();
    let h_form: Vec<T> = (0..xs.len()).map(|i| (base[i] - h0 / theta) / pi + l_prime[i]).collect();
    // The ĥ(0)/θ̂ form carries the third-limit constant; compare like with like.
    let shift = (a - h.a_hat) / pi;
    let v_sq_form_gap = interior.iter().fold(T::zero(), |m, &i| m.max((v_sq_raw[i] - shift - h_form[i]).abs()));

    let clip_count = v_sq_raw.iter().filter(|&&v| v < T::zero()).count();
    let v_sq: Vec<T> = v_sq_raw.iter().map(|&v| v.max(T::zero())).collect();
    let sign_known = v0.is_some_and(|v0| v0.abs() > opts.v0_tol);
    let sign = match v0 {
        Some(v0) if sign_known && v0 < T::zero() => -T::one(),
        _ => T::one(),
    };
    let v: Vec<T> = v_sq.iter().map(|&s| sign * s.sqrt()).collect();
    let p: Vec<T> = mu_prime.values().iter().zip(&v).map(|(&m, &v)| m + v).collect();
    let r: Vec<T> = mu_prime.values().iter().zip(&v).map(|(&m, &v)| m - v).collect();

    for (name, value) in [("θ̂", theta), ("ω̂(π)", omega_pi), ("Â", a)] {
        if !value.is_finite() {
            return Err(InverseError::NonFinite(name));
        }
    }
    let printed = printed_formulas(&fit.f, &g, &h.h_hat, l_known, theta, ef)?;
    Ok(Reconstruction {
        theta_hat: theta,
        omega_pi_hat: omega_pi,
        v0_hat: v0,
        a_hat: a,
        a_hat_anchor: a_anchor,
        a_hat_h: h.a_hat,
        mu_hat: mu,
        mu_prime_hat: mu_prime,
        v_sq_hat: SampledFunction::new(grid, v_sq)?,
        v_hat: SampledFunction::new(grid, v)?,
        p_hat: SampledFunction::new(grid, p)?,
        r_hat: SampledFunction::new(grid, r)?,
        limits: LimitFunctions {
            f_hat: fit.f,
            g_hat: g,
            h_hat: h.h_hat,
            f_residual: fit.residual,
            h_residual: h.residual,
        },
        printed,
        diagnostics: Diagnostics {
            f_pi_residual: f_pi + T::FRAC_PI_2(),
            h_spread: h.spread,
            clip_count,
            degenerate_theta: degenerate,
            v_sign_unresolved: !sign_known,
            a_converged: h.converged,
            a_iterations: h.iterations,
            v_sq_form_gap,
        },
    })
}
