//! Forward and inverse nodal problems for the Dirac-type integro-differential
//! system
//!
//! ```text
//! B Y' + Ω(x) Y + ∫₀ˣ M(x,t) Y(t) dt = λ Y,      x ∈ (0, π),
//! y₁(0) sin θ + y₂(0) cos θ = 0,
//! y₁(π) = ∫₀^π y₁(x) ω(x) dx,
//! ```
//!
//! with `B = [[0, 1], [-1, 0]]` and `Ω = diag(p, r)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`exprlang`]: closed-form functions of `x` / `(x, t)` parsed from text;
//! * [`numerics`]: grids, trapezoid quadrature, differences, bisection and
//!   least-squares extrapolation in `1/n`;
//! * [`model`]: the problem definition and the derived coefficient functions
//!   (`μ`, `v`, `K`, `L`, and the spectral constant `A`);
//! * [`forward`]: the ground-truth solver (trajectories, the characteristic
//!   function, eigenvalues and nodal points);
//! * [`asymptotics`]: the closed-form large-`λ` expansions;
//! * [`inverse`]: reconstruction of `θ`, `ω(π)`, `p` and `r` from nodal data.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the CLI uses.

pub mod asymptotics;
pub mod exprlang;
pub mod fixtures;
pub mod forward;
pub mod inverse;
pub mod model;
pub mod numerics;
mod scalar;

pub use scalar::Real;

pub type Grid = numerics::Grid<f64>;
pub type SampledFunction = numerics::SampledFunction<f64>;
pub type Problem = model::Problem<f64>;
pub type Coefficients = model::Coefficients<f64>;
pub type FunctionSpec = model::FunctionSpec<f64>;
pub type KernelSpec = model::KernelSpec<f64>;
pub type Trajectory = forward::Trajectory<f64>;
pub type Spectrum = forward::Spectrum<f64>;
pub type NodeList = forward::NodeList<f64>;
pub type Propagator<'a> = forward::Propagator<'a, f64>;
pub type AsymptoticConfig<'a> = asymptotics::AsymptoticConfig<'a, f64>;
pub type NodalSet = inverse::NodalSet<f64>;
pub type Reconstruction = inverse::Reconstruction<f64>;
pub type InversionOptions = inverse::InversionOptions<f64>;
