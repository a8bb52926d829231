//! Forward solver: trajectories, the characteristic function, eigenvalues
//! and nodal points.

mod kernel;
mod nodes;
mod propagator;
mod spectrum;
mod volterra;

pub use nodes::{node_count_threshold, nodes, nodes_with, NodeList};
pub use propagator::{Propagator, Scheme};
pub use spectrum::{eigenvalues, eigenvalues_with, MissingRoot, Spectrum, SpectrumEntry, BRACKET_HALF_WIDTH, WIDE_BRACKET_HALF_WIDTH};
pub use volterra::volterra_residual;

use crate::model::{ModelError, Problem};
use crate::numerics::{Grid, NumericsError};
use crate::Real;
use thiserror::Error;

/// Default bisection tolerance for eigenvalues and nodes.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default number of grid intervals.
pub const DEFAULT_GRID_N: usize = 4000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForwardError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("spectral parameter {0} is not finite")]
    NonFiniteLambda(f64),
    #[error("singular step matrix at x = {x}; increase the number of grid intervals")]
    SingularStep { x: f64 },
    #[error("non-finite state component {component} at grid index {index} (λ = {lambda}); increase the number of grid intervals")]
    NonFiniteState { lambda: f64, index: usize, component: usize },
    #[error("trajectory grid does not match the problem grid")]
    GridMismatch,
    #[error("trajectory was computed without dense state")]
    NotDense,
    #[error("invalid index range {n_min}..={n_max}")]
    InvalidRange { n_min: i64, n_max: i64 },
}

/// Sampled solution `φ(x, λ)` of the initial value problem on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub lambda: T,
    pub grid: Grid<T>,
    pub phi1: Vec<T>,
    pub phi2: Vec<T>,
    /// Running boundary integral `∫₀ˣ ω φ₁`.
    pub omega_integral: Vec<T>,
    pub(crate) states: Vec<T>,
    pub(crate) dim: usize,
}

impl<T: Real> Trajectory<T> {
    /// `Λ(λ) = φ₁(π) − ∫₀^π ω φ₁`.
    pub fn characteristic(&self) -> T {
        self.phi1[self.phi1.len() - 1] - self.omega_integral[self.omega_integral.len() - 1]
    }

    pub fn is_dense(&self) -> bool {
        !self.states.is_empty()
    }

    /// Largest `|φᵢ − otherᵢ|` over the nodes shared with a refined trajectory.
    pub fn sup_diff_against_refined(&self, fine: &Self) -> T {
        let ratio = fine.grid.n_intervals() / self.grid.n_intervals();
        let mut m = T::zero();
        for i in 0..self.phi1.len() {
            m = m.max((self.phi1[i] - fine.phi1[i * ratio]).abs());
            m = m.max((self.phi2[i] - fine.phi2[i * ratio]).abs());
        }
        m
    }
}

/// One-shot integration; prefer a [`Propagator`] to reuse the precomputation across `λ`.
pub fn integrate<T: Real>(problem: &Problem<T>, lambda: T) -> Result<Trajectory<T>, ForwardError> {
    Propagator::new(problem)?.integrate(lambda)
}

/// One-shot evaluation of the characteristic function.
pub fn characteristic<T: Real>(problem: &Problem<T>, lambda: T) -> Result<T, ForwardError> {
    Propagator::new(problem)?.characteristic(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::p1;
    use std::f64::consts::PI;

    #[test]
    fn free_system_is_exact() {
        let pb = Problem::zero(PI / 2.0, 4000).unwrap();
        let t = integrate(&pb, 2.0).unwrap();
        assert!(t.phi1[2000].abs() < 1e-12);
        assert!((t.phi2[2000] - 1.0).abs() < 1e-12);
        let pb = Problem::<f64>::zero(1.0, 4000).unwrap();
        for lambda in [0.0, 7.3, 60.0] {
            let t = integrate(&pb, lambda).unwrap();
            let worst = t.phi1.iter().zip(&t.phi2).map(|(a, b)| (a * a + b * b - 1.0).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-12, "λ = {lambda}: {worst}");
        }
    }

    #[test]
    fn initial_condition_is_bitwise() {
        let pb = p1::<f64>(200);
        for scheme in [Scheme::Rk4, Scheme::Trapezoid] {
            let t = Propagator::with_scheme(&pb, scheme).unwrap().integrate(3.3).unwrap();
            assert_eq!(t.phi1[0].to_bits(), pb.theta().cos().to_bits());
            assert_eq!(t.phi2[0].to_bits(), (-pb.theta().sin()).to_bits());
        }
    }

    #[test]
    fn characteristic_of_free_system() {
        assert!(characteristic(&Problem::zero(PI / 2.0, 4000).unwrap(), 2.0).unwrap().abs() < 1e-12);
        assert!((characteristic(&Problem::zero(PI / 3.0, 4000).unwrap(), 0.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn p1_matches_reference_solution() {
        let pb = p1::<f64>(4000);
        let prop = Propagator::new(&pb).unwrap();
        let t = prop.integrate(5.0).unwrap();
        // Reference values from an independent adaptive eighth-order integrator.
        assert!((t.phi1[4000] - -0.4753625102857487).abs() < 1e-10);
        assert!((t.phi2[4000] - 0.7847145580046502).abs() < 1e-10);
        assert!((t.characteristic() - -0.5549064710699211).abs() < 1e-10);
        assert!((prop.characteristic(5.0).unwrap() - t.characteristic()).abs() < 1e-15);
        let t40 = prop.integrate(40.0).unwrap();
        assert!((t40.phi1[4000] - 0.49603934126658866).abs() < 1e-9);
        assert!((t40.phi2[4000] - -0.8560312991703254).abs() < 1e-9);
        assert!((prop.characteristic(30.2).unwrap() - 0.9055577035491438).abs() < 1e-9);
    }

    #[test]
    fn off_grid_values_match_reference() {
        let pb = p1::<f64>(4000);
        let prop = Propagator::new(&pb).unwrap();
        let t = prop.integrate_dense(5.0).unwrap();
        let h = pb.grid.step();
        let i = (1.0 / h).floor() as usize;
        let (a, b) = prop.substep(&t, i, 1.0 - pb.grid.node(i)).unwrap();
        assert!((a - -0.7479994350041663).abs() < 1e-10);
        assert!((b - -0.6283841712670675).abs() < 1e-10);
        // A full sub-step reproduces the next grid value.
        let (c, _) = prop.substep(&t, i, h).unwrap();
        assert!((c - t.phi1[i + 1]).abs() < 1e-14);
    }

    #[test]
    fn self_convergence_orders() {
        let pb = p1::<f64>(250);
        let run = |n: usize, scheme| {
            let q = pb.with_grid_n(n).unwrap();
            Propagator::with_scheme(&q, scheme).unwrap().integrate(5.0).unwrap()
        };
        let reference = run(4000, Scheme::Rk4);
        for (scheme, expected) in [(Scheme::Rk4, 16.0), (Scheme::Trapezoid, 4.0)] {
            let ratio = run(250, scheme).sup_diff_against_refined(&reference)
                / run(500, scheme).sup_diff_against_refined(&reference);
            assert!((ratio / expected - 1.0).abs() < 0.15, "{scheme:?}: ratio {ratio}");
        }
    }
}
