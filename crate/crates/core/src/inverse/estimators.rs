//! Finite-`n` estimators of the nodal limits.
//!
//! Everything is phrased through the nodal phase `Φₙ(x) = n·x − (j + ½)π`
//! sampled at nodes `x = xₙʲ`. With `d = π + 2θ` (valid when `μ(π) = 0`),
//!
//! ```text
//! Φₙ(x) = f(x) + G(x)/n + H(x)/n² + …,
//! f = μ + θ − x d/(2π),     G = (π B − x A)/(2π),
//! ```
//!
//! so one least-squares fit in `1/n` per grid point yields `f` and `G`, and
//! `g = 2πG − d f` is the second limit. The third limit is formed from the
//! residual left after removing the first two orders of the nodal expansion
//! (see [`estimate_h`]).

use super::{EndpointFit, InverseError, InversionOptions, NodalSet, PhaseSampling};
use crate::numerics::{central_diff, extrapolate_with_bound, lagrange_at, polyfit, polyval, polyval_derivative};
use crate::numerics::{Grid, SampledFunction};
use crate::Real;

/// Per-index phase samples split by the parity of `j`.
struct PhaseTable<T> {
    n: i64,
    nodes: Vec<T>,
    phase: Vec<T>,
    even: (Vec<T>, Vec<T>),
    odd: (Vec<T>, Vec<T>),
}

impl<T: Real> PhaseTable<T> {
    fn new(n: i64, nodes: &[T]) -> Self {
        let nf = T::lit(n as f64);
        let phase: Vec<T> = nodes
            .iter()
            .enumerate()
            .map(|(j, &x)| nf * x - (T::from_usize_lossy(j) + T::lit(0.5)) * T::PI())
            .collect();
        let pick = |parity: usize| -> (Vec<T>, Vec<T>) {
            let idx = (parity..nodes.len()).step_by(2);
            (idx.clone().map(|j| nodes[j]).collect(), idx.map(|j| phase[j]).collect())
        };
        PhaseTable { n, nodes: nodes.to_vec(), phase: phase.clone(), even: pick(0), odd: pick(1) }
    }

    fn sample(&self, x: T, sampling: PhaseSampling) -> T {
        match sampling {
            PhaseSampling::Interpolated { points } => {
                let even = lagrange_at(&self.even.0, &self.even.1, x, points);
                if self.odd.0.is_empty() {
                    return even;
                }
                let odd = lagrange_at(&self.odd.0, &self.odd.1, x, points);
                (even + odd) * T::lit(0.5)
            }
            PhaseSampling::Nearest => {
                let right = self.nodes.partition_point(|&t| t < x);
                let j = if right == 0 {
                    0
                } else if right == self.nodes.len() || x - self.nodes[right - 1] <= self.nodes[right] - x {
                    right - 1
                } else {
                    right
                };
                self.phase[j]
            }
        }
    }
}

fn tables<T: Real>(set: &NodalSet<T>, n_list: &[i64]) -> Result<Vec<PhaseTable<T>>, InverseError> {
    n_list.iter().map(|&n| Ok(PhaseTable::new(n, set.require(n)?))).collect()
}

/// Model order actually used: at most one less than the number of indices.
fn effective_order(order: usize, count: usize) -> Result<usize, InverseError> {
    if count < 2 {
        return Err(InverseError::InsufficientData { needed: 2, got: count });
    }
    Ok(order.min(count - 1))
}

/// Nodal phase `Φₙ(x)` at an arbitrary `x`.
pub fn phase_at<T: Real>(set: &NodalSet<T>, n: i64, x: T, sampling: PhaseSampling) -> Result<T, InverseError> {
    Ok(PhaseTable::new(n, set.require(n)?).sample(x, sampling))
}

/// Single-index estimate `θ̂(n) = n·xₙ⁰ − π/2`.
pub fn theta_sequence<T: Real>(set: &NodalSet<T>, n: i64) -> Result<T, InverseError> {
    let nodes = set.require(n)?;
    Ok(T::lit(n as f64) * nodes[0] - T::FRAC_PI_2())
}

/// `θ̂` from the first nodes, extrapolated in `1/n` with the given model order.
pub fn estimate_theta<T: Real>(set: &NodalSet<T>, n_list: &[i64], order: usize) -> Result<T, InverseError> {
    let order = effective_order(order, n_list.len())?;
    let pairs = n_list.iter().map(|&n| Ok((n, theta_sequence(set, n)?))).collect::<Result<Vec<_>, InverseError>>()?;
    let theta = extrapolate_with_bound(&pairs, order, T::lit(crate::numerics::DEFAULT_CONDITION_BOUND))?.limit();
    if !(theta > T::zero() && theta < T::PI()) {
        return Err(InverseError::ThetaOutOfRange(theta.to_f64_lossy()));
    }
    Ok(theta)
}

/// Joint `1/n` fit of the nodal phase on the inversion grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFit<T> {
    /// Leading coefficient, the limit `f`.
    pub f: SampledFunction<T>,
    /// Coefficient of `1/n`.
    pub big_g: SampledFunction<T>,
    /// Root-mean-square residual of the fit at every grid point.
    pub residual: Vec<T>,
}

pub fn fit_phase<T: Real>(set: &NodalSet<T>, opts: &InversionOptions<T>) -> Result<PhaseFit<T>, InverseError> {
    let grid = opts.grid()?;
    let order = effective_order(opts.phase_order, opts.n_list.len())?;
    let tabs = tables(set, &opts.n_list)?;
    let mut f = Vec::with_capacity(grid.len());
    let mut big_g = Vec::with_capacity(grid.len());
    let mut residual = Vec::with_capacity(grid.len());
    for x in grid.nodes() {
        let pairs: Vec<(i64, T)> = tabs.iter().map(|t| (t.n, t.sample(x, opts.sampling))).collect();
        let fit = extrapolate_with_bound(&pairs, order, opts.condition_bound)?;
        f.push(fit.coefficients[0]);
        big_g.push(fit.coefficients[1]);
        residual.push(fit.residual);
    }
    Ok(PhaseFit {
        f: SampledFunction::new(grid, f)?,
        big_g: SampledFunction::new(grid, big_g)?,
        residual,
    })
}

/// The first limit `f̂` on the inversion grid.
pub fn estimate_f<T: Real>(set: &NodalSet<T>, opts: &InversionOptions<T>) -> Result<SampledFunction<T>, InverseError> {
    Ok(fit_phase(set, opts)?.f)
}

/// `μ̂ = f̂ − θ̂ + x(π + 2θ̂)/(2π)` and `μ̂′ = f̂′ + ½ + θ̂/π`.
pub fn stage1<T: Real>(
    f_hat: &SampledFunction<T>,
    theta_hat: T,
) -> Result<(SampledFunction<T>, SampledFunction<T>), InverseError> {
    let slope = (T::PI() + theta_hat + theta_hat) / T::TAU();
    let mu = f_hat.map(|x, f| f - theta_hat + x * slope)?;
    let shift = T::lit(0.5) + theta_hat / T::PI();
    let mu_prime = central_diff(f_hat)?.map(|_, df| df + shift)?;
    Ok((mu, mu_prime))
}

/// `ĝ = 2πĜ − (π + 2θ̂) f̂` from a phase fit.
pub fn g_from_fit<T: Real>(fit: &PhaseFit<T>, theta_hat: T) -> Result<SampledFunction<T>, InverseError> {
    let d = T::PI() + theta_hat + theta_hat;
    Ok(fit.big_g.zip_with(&fit.f, |g, f| T::TAU() * g - d * f)?)
}

/// The second limit `ĝ` on the inversion grid.
pub fn estimate_g<T: Real>(
    set: &NodalSet<T>,
    opts: &InversionOptions<T>,
    theta_hat: T,
) -> Result<SampledFunction<T>, InverseError> {
    g_from_fit(&fit_phase(set, opts)?, theta_hat)
}

/// Outcome of the third-limit estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct HEstimate<T> {
    pub h_hat: SampledFunction<T>,
    pub a_hat: T,
    pub iterations: usize,
    pub converged: bool,
    /// Root-mean-square residual of the `1/n` fit at every grid point.
    pub residual: Vec<T>,
    /// `(max − min)/|mean|` of `ĥ/(μ̂ + θ̂)` over the interior points.
    pub spread: T,
}

struct HContext<'a, T> {
    tabs: Vec<PhaseTable<T>>,
    opts: &'a InversionOptions<T>,
    theta: T,
    d: T,
    order: usize,
    xs: Vec<T>,
    shift: Vec<T>,
    g: &'a [T],
    interior: Vec<usize>,
}

impl<T: Real> HContext<'_, T> {
    /// `ĥ(x; Â)` at every grid point, plus fit residuals.
    fn sweep(&self, a: T) -> Result<(Vec<T>, Vec<T>), InverseError> {
        let two_pi = T::TAU();
        let d = self.d;
        let mut h = Vec::with_capacity(self.xs.len());
        let mut res = Vec::with_capacity(self.xs.len());
        for (i, &x) in self.xs.iter().enumerate() {
            let m = self.shift[i];
            let b = (self.g[i] + m * d + x * a - x * d * d / two_pi) / T::PI();
            let pairs: Vec<(i64, T)> = self
                .tabs
                .iter()
                .map(|t| {
                    let n = T::lit(t.n as f64);
                    // ε = n x − n (s + μ̂ + θ̂)/λ̂ − n B̂/(2λ̂²) with s = n x − Φₙ(x),
                    // rearranged so that no O(n) terms cancel.
                    let shift = d / two_pi + a / (two_pi * n);
                    let lambda = n + shift;
                    let phase = t.sample(x, self.opts.sampling);
                    let eps = n * (x * shift + phase - m) / lambda - n * b / (T::lit(2.0) * lambda * lambda);
                    (t.n, two_pi * n * n * eps + m * (d * d / two_pi - a))
                })
                .collect();
            let fit = extrapolate_with_bound(&pairs, self.order, self.opts.condition_bound)?;
            h.push(fit.limit());
            res.push(fit.residual);
        }
        Ok((h, res))
    }

    /// The fixed-point update `Â ← d²/(2π) − mean ĥ/(μ̂ + θ̂)`.
    fn update(&self, h: &[T]) -> T {
        let sum: T = self.interior.iter().map(|&i| h[i] / self.shift[i]).sum();
        self.d * self.d / T::TAU() - sum / T::from_usize_lossy(self.interior.len())
    }

    fn spread(&self, h: &[T]) -> T {
        let q: Vec<T> = self.interior.iter().map(|&i| h[i] / self.shift[i]).collect();
        let lo = q.iter().copied().fold(T::infinity(), T::min);
        let hi = q.iter().copied().fold(T::neg_infinity(), T::max);
        let mean = q.iter().copied().sum::<T>() / T::from_usize_lossy(q.len());
        (hi - lo) / mean.abs()
    }
}

/// The third limit `ĥ` and the spectral constant implied by it.
///
/// For a trial `Â`, the nodal expansion through `1/λ²` is removed from the
/// data (`λ̂ₙ = n + d/(2π) + Â/(2πn)`, `B̂` rebuilt from `ĝ` and `Â`), the
/// remainder is scaled by `2πn²` and extrapolated, and `ĥ` is obtained by
/// adding back `(μ̂ + θ̂)(d²/(2π) − Â)`. The consistent `Â` is the fixed point
/// of `Â ← d²/(2π) − mean ĥ/(μ̂ + θ̂)`, located with secant steps.
pub fn estimate_h<T: Real>(
    set: &NodalSet<T>,
    opts: &InversionOptions<T>,
    theta_hat: T,
    mu_hat: &SampledFunction<T>,
    g_hat: &SampledFunction<T>,
) -> Result<HEstimate<T>, InverseError> {
    let grid = opts.grid()?;
    if mu_hat.grid() != &grid || g_hat.grid() != &grid {
        return Err(InverseError::GridMismatch);
    }
    let xs = grid.nodes();
    let interior = opts.interior_indices(&xs)?;
    let ctx = HContext {
        tabs: tables(set, &opts.n_list)?,
        opts,
        theta: theta_hat,
        d: T::PI() + theta_hat + theta_hat,
        order: effective_order(opts.h_order, opts.n_list.len())?,
        shift: mu_hat.values().iter().map(|&m| m + theta_hat).collect(),
        xs,
        g: g_hat.values(),
        interior,
    };
    debug_assert!(ctx.theta > T::zero());

    // Secant iteration on F(Â) = update(Â) − Â, seeded with one plain
    // fixed-point step from Â = 0.
    let mut a0 = T::zero();
    let (h0, _) = ctx.sweep(a0)?;
    let mut f0 = ctx.update(&h0) - a0;
    let mut a1 = a0 + f0;
    let mut iterations = 1;
    let mut converged = f0.abs() <= opts.a_tol;
    while !converged && iterations < opts.a_max_iter {
        let (h1, _) = ctx.sweep(a1)?;
        let f1 = ctx.update(&h1) - a1;
        iterations += 1;
        let next = if f1 != f0 { a1 - f1 * (a1 - a0) / (f1 - f0) } else { a1 + f1 };
        converged = (next - a1).abs() <= opts.a_tol * T::one().max(a1.abs());
        a0 = a1;
        f0 = f1;
        a1 = next;
    }
    if !a1.is_finite() {
        return Err(InverseError::NonFinite("Â"));
    }
    let (h, residual) = ctx.sweep(a1)?;
    let spread = ctx.spread(&h);
    Ok(HEstimate { h_hat: SampledFunction::new(grid, h)?, a_hat: a1, iterations, converged, residual, spread })
}

/// Value and slope at `0` (`left`) or `π` of a least-squares polynomial
/// through the grid values at distances `[inner, outer]` from that endpoint.
pub fn endpoint_value<T: Real>(f: &SampledFunction<T>, fit: &EndpointFit<T>, left: bool) -> Result<(T, T), InverseError> {
    let (a, b, at) = if left {
        (fit.inner, fit.outer, T::zero())
    } else {
        (T::PI() - fit.outer, T::PI() - fit.inner, T::PI())
    };
    let (xs, ys): (Vec<T>, Vec<T>) =
        f.grid().nodes().into_iter().zip(f.values().iter().copied()).filter(|(x, _)| *x >= a && *x <= b).unzip();
    if xs.len() <= fit.degree {
        return Err(InverseError::InsufficientData { needed: fit.degree + 1, got: xs.len() });
    }
    let p = polyfit(&xs, &ys, fit.degree)?;
    Ok((polyval(&p, at), polyval_derivative(&p, at)))
}

/// Values of `f′` on `grid`, and `f′(0)`.
pub(crate) fn derivative_on<T: Real>(f: &SampledFunction<T>, grid: &Grid<T>) -> Result<(Vec<T>, T), InverseError> {
    let df = central_diff(f)?;
    let at_zero = if f.grid().lo() <= T::zero() { df.first() } else { df.interpolate(T::zero()) };
    Ok((grid.nodes().into_iter().map(|x| df.interpolate(x)).collect(), at_zero))
}
