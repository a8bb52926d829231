//! Fixed-grid integration of the initial value problem at a given `λ`.
//!
//! The state is evolved in the rotating frame `Z = R(−λx) Y`, where the free
//! flow `Y′ = λ[[0, −1], [1, 0]] Y` is exact: only the potential and memory
//! terms are discretized, so accuracy does not degrade with `λ` the way a
//! direct discretization of `Y` does. The augmented state carries
//! `[z₁, z₂, w, J₁, …, J_K]` with `w′ = ω y₁` (the boundary integral) and the
//! separable memory integrals `Jₖ′ = ℓₖ(x) Y`.

use rayon::prelude::*;

use super::kernel::{choose_rank, ChebyshevBasis};
use super::{ForwardError, Trajectory};
use crate::model::{ModelError, Problem};
use crate::numerics::Grid;
use crate::Real;

/// Time-stepping scheme of the [`Propagator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Classical fourth-order Runge–Kutta (default).
    #[default]
    Rk4,
    /// Linearly implicit trapezoidal rule, second order; one 2×2 solve per step.
    Trapezoid,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::Rk4 => 4,
            Scheme::Trapezoid => 2,
        }
    }
}

/// Coefficients at one abscissa.
struct At<'b, T> {
    p: T,
    r: T,
    omega: T,
    ell: &'b [T],
    /// `[M₁₁, M₁₂, M₂₁, M₂₂](x, tₖ)` for each Chebyshev node `tₖ`.
    mk: &'b [[T; 4]],
}

struct PointCoeffs<T> {
    p: T,
    r: T,
    omega: T,
    ell: Vec<T>,
    mk: Vec<[T; 4]>,
}

impl<T: Real> PointCoeffs<T> {
    fn view(&self) -> At<'_, T> {
        At { p: self.p, r: self.r, omega: self.omega, ell: &self.ell, mk: &self.mk }
    }
}

/// Per-problem precomputation shared by every `λ`: coefficient tables on the
/// half-step grid and the separable kernel basis.
pub struct Propagator<'a, T> {
    problem: &'a Problem<T>,
    scheme: Scheme,
    basis: ChebyshevBasis<T>,
    kernel_error: T,
    p: Vec<T>,
    r: Vec<T>,
    omega: Vec<T>,
    ell: Vec<T>,
    mk: Vec<[T; 4]>,
}

pub(crate) const W: usize = 2;
pub(crate) const J0: usize = 3;

impl<'a, T: Real> Propagator<'a, T> {
    pub fn new(problem: &'a Problem<T>) -> Result<Self, ForwardError> {
        Self::with_scheme(problem, Scheme::default())
    }

    pub fn with_scheme(problem: &'a Problem<T>, scheme: Scheme) -> Result<Self, ForwardError> {
        let (rank, kernel_error) = choose_rank(&problem.kernel)?;
        let basis = ChebyshevBasis::new(rank);
        let mut prop = Self {
            problem,
            scheme,
            basis,
            kernel_error,
            p: Vec::new(),
            r: Vec::new(),
            omega: Vec::new(),
            ell: Vec::new(),
            mk: Vec::new(),
        };
        let n_half = 2 * problem.grid.n_intervals() + 1;
        let points = (0..n_half)
            .into_par_iter()
            .map(|m| prop.coeffs_at(prop.half_node(m)))
            .collect::<Result<Vec<_>, _>>()?;
        prop.p = points.iter().map(|c| c.p).collect();
        prop.r = points.iter().map(|c| c.r).collect();
        prop.omega = points.iter().map(|c| c.omega).collect();
        prop.ell = points.iter().flat_map(|c| c.ell.iter().copied()).collect();
        prop.mk = points.into_iter().flat_map(|c| c.mk).collect();
        Ok(prop)
    }

    pub fn problem(&self) -> &'a Problem<T> {
        self.problem
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.problem.grid
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Number of separable terms used for the memory kernel.
    pub fn kernel_rank(&self) -> usize {
        self.basis.rank()
    }

    /// Max interpolation error of the separable kernel at the check points.
    pub fn kernel_fit_error(&self) -> T {
        self.kernel_error
    }

    pub(crate) fn state_dim(&self) -> usize {
        J0 + 2 * self.basis.rank()
    }

    fn half_node(&self, m: usize) -> T {
        let g = &self.problem.grid;
        if m.is_multiple_of(2) {
            g.node(m / 2)
        } else {
            g.lo() + (g.hi() - g.lo()) * T::from_usize_lossy(m) / T::from_usize_lossy(2 * g.n_intervals())
        }
    }

    fn coeffs_at(&self, x: T) -> Result<PointCoeffs<T>, ForwardError> {
        let pb = self.problem;
        let e = |field| move |source| ForwardError::Model(ModelError::Expr { field, source });
        let rank = self.basis.rank();
        let mut ell = vec![T::zero(); rank];
        self.basis.eval_into(x, &mut ell);
        let mut mk = Vec::with_capacity(rank);
        for &tk in self.basis.nodes() {
            let k = &pb.kernel;
            mk.push([
                k.m11.eval(x, tk).map_err(e("m11"))?,
                k.m12.eval(x, tk).map_err(e("m12"))?,
                k.m21.eval(x, tk).map_err(e("m21"))?,
                k.m22.eval(x, tk).map_err(e("m22"))?,
            ]);
        }
        Ok(PointCoeffs {
            p: pb.p.eval(x).map_err(e("p"))?,
            r: pb.r.eval(x).map_err(e("r"))?,
            omega: pb.omega.eval(x).map_err(e("omega"))?,
            ell,
            mk,
        })
    }

    fn table(&self, m: usize) -> At<'_, T> {
        let k = self.basis.rank();
        At {
            p: self.p[m],
            r: self.r[m],
            omega: self.omega[m],
            ell: &self.ell[m * k..(m + 1) * k],
            mk: &self.mk[m * k..(m + 1) * k],
        }
    }

    fn initial_state(&self) -> Vec<T> {
        let th = self.problem.theta();
        let mut u = vec![T::zero(); self.state_dim()];
        u[0] = th.cos();
        u[1] = -th.sin();
        u
    }

    /// Memory integral `I = Σₖ M(x, tₖ) Jₖ`.
    fn memory(at: &At<'_, T>, u: &[T]) -> (T, T) {
        let mut i1 = T::zero();
        let mut i2 = T::zero();
        for (k, m) in at.mk.iter().enumerate() {
            let j1 = u[J0 + 2 * k];
            let j2 = u[J0 + 2 * k + 1];
            i1 += m[0] * j1 + m[1] * j2;
            i2 += m[2] * j1 + m[3] * j2;
        }
        (i1, i2)
    }

    fn deriv(at: &At<'_, T>, (c, s): (T, T), u: &[T], du: &mut [T]) {
        let y1 = c * u[0] - s * u[1];
        let y2 = s * u[0] + c * u[1];
        let (i1, i2) = Self::memory(at, u);
        let f1 = at.r * y2 + i2;
        let f2 = -at.p * y1 - i1;
        du[0] = c * f1 + s * f2;
        du[1] = c * f2 - s * f1;
        du[W] = at.omega * y1;
        for (k, &l) in at.ell.iter().enumerate() {
            du[J0 + 2 * k] = l * y1;
            du[J0 + 2 * k + 1] = l * y2;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn rk4_step(
        a0: &At<'_, T>,
        am: &At<'_, T>,
        a1: &At<'_, T>,
        cs: [(T, T); 3],
        h: T,
        u: &mut [T],
        scratch: &mut Scratch<T>,
    ) {
        let half = h * T::lit(0.5);
        let Scratch { k1, k2, k3, k4, tmp } = scratch;
        Self::deriv(a0, cs[0], u, k1);
        axpy(tmp, u, half, k1);
        Self::deriv(am, cs[1], tmp, k2);
        axpy(tmp, u, half, k2);
        Self::deriv(am, cs[1], tmp, k3);
        axpy(tmp, u, h, k3);
        Self::deriv(a1, cs[2], tmp, k4);
        let sixth = h / T::lit(6.0);
        let two = T::lit(2.0);
        for i in 0..u.len() {
            u[i] += sixth * (k1[i] + two * (k2[i] + k3[i]) + k4[i]);
        }
    }

    fn trapezoid_step(
        a0: &At<'_, T>,
        a1: &At<'_, T>,
        cs: [(T, T); 2],
        h: T,
        x1: T,
        u: &mut [T],
        scratch: &mut Scratch<T>,
    ) -> Result<(), ForwardError> {
        let half = h * T::lit(0.5);
        let g0 = &mut scratch.k1;
        Self::deriv(a0, cs[0], u, g0);
        let (c0, s0) = cs[0];
        let y0 = (c0 * u[0] - s0 * u[1], s0 * u[0] + c0 * u[1]);
        // Explicit part of J and w at the new point.
        let jp = &mut scratch.tmp;
        jp.copy_from_slice(u);
        jp[W] += half * g0[W];
        for k in 0..a0.ell.len() {
            jp[J0 + 2 * k] += half * a0.ell[k] * y0.0;
            jp[J0 + 2 * k + 1] += half * a0.ell[k] * y0.1;
        }
        let (i1p, i2p) = Self::memory(a1, jp);
        // Diagonal trace of the separable kernel: Σₖ ℓₖ(x₁) M(x₁, tₖ).
        let mut mt = [T::zero(); 4];
        for (k, m) in a1.mk.iter().enumerate() {
            for e in 0..4 {
                mt[e] += a1.ell[k] * m[e];
            }
        }
        // F(x₁) = Q Y₁ + q.
        let q11 = half * mt[2];
        let q12 = a1.r + half * mt[3];
        let q21 = -a1.p - half * mt[0];
        let q22 = -half * mt[1];
        let (qv1, qv2) = (i2p, -i1p);
        let (c, s) = cs[1];
        // Rᵀ Q R for R = [[c, −s], [s, c]].
        let qr = [[q11 * c + q12 * s, -q11 * s + q12 * c], [q21 * c + q22 * s, -q21 * s + q22 * c]];
        let g = [[c * qr[0][0] + s * qr[1][0], c * qr[0][1] + s * qr[1][1]], [-s * qr[0][0] + c * qr[1][0], -s * qr[0][1] + c * qr[1][1]]];
        let rq = (c * qv1 + s * qv2, -s * qv1 + c * qv2);
        let a11 = T::one() - half * g[0][0];
        let a12 = -half * g[0][1];
        let a21 = -half * g[1][0];
        let a22 = T::one() - half * g[1][1];
        let b1 = u[0] + half * (g0[0] + rq.0);
        let b2 = u[1] + half * (g0[1] + rq.1);
        let det = a11 * a22 - a12 * a21;
        if !(det.abs() > T::epsilon()) || !det.is_finite() {
            return Err(ForwardError::SingularStep { x: x1.to_f64_lossy() });
        }
        let z1 = (b1 * a22 - a12 * b2) / det;
        let z2 = (a11 * b2 - a21 * b1) / det;
        let y1 = (c * z1 - s * z2, s * z1 + c * z2);
        u[0] = z1;
        u[1] = z2;
        u[W] = jp[W] + half * a1.omega * y1.0;
        for k in 0..a1.ell.len() {
            u[J0 + 2 * k] = jp[J0 + 2 * k] + half * a1.ell[k] * y1.0;
            u[J0 + 2 * k + 1] = jp[J0 + 2 * k + 1] + half * a1.ell[k] * y1.1;
        }
        Ok(())
    }

    fn trig_table(&self, lambda: T) -> Vec<(T, T)> {
        (0..=2 * self.grid().n_intervals())
            .map(|m| {
                let a = lambda * self.half_node(m);
                (a.cos(), a.sin())
            })
            .collect()
    }

    fn check_lambda(lambda: T) -> Result<(), ForwardError> {
        if lambda.is_finite() {
            Ok(())
        } else {
            Err(ForwardError::NonFiniteLambda(lambda.to_f64_lossy()))
        }
    }

    /// March over the grid, calling `visit(i, state)` at every node.
    fn march(&self, lambda: T, mut visit: impl FnMut(usize, &[T])) -> Result<(), ForwardError> {
        Self::check_lambda(lambda)?;
        let n = self.grid().n_intervals();
        let h = self.grid().step();
        let trig = self.trig_table(lambda);
        let mut u = self.initial_state();
        let mut scratch = Scratch::new(u.len());
        visit(0, &u);
        for i in 0..n {
            let m = 2 * i;
            match self.scheme {
                Scheme::Rk4 => Self::rk4_step(
                    &self.table(m),
                    &self.table(m + 1),
                    &self.table(m + 2),
                    [trig[m], trig[m + 1], trig[m + 2]],
                    h,
                    &mut u,
                    &mut scratch,
                ),
                Scheme::Trapezoid => Self::trapezoid_step(
                    &self.table(m),
                    &self.table(m + 2),
                    [trig[m], trig[m + 2]],
                    h,
                    self.half_node(m + 2),
                    &mut u,
                    &mut scratch,
                )?,
            }
            if let Some(k) = u.iter().position(|v| !v.is_finite()) {
                return Err(ForwardError::NonFiniteState { lambda: lambda.to_f64_lossy(), index: i + 1, component: k });
            }
            visit(i + 1, &u);
        }
        Ok(())
    }

    /// Solution samples `(φ₁, φ₂)` on the grid.
    pub fn integrate(&self, lambda: T) -> Result<Trajectory<T>, ForwardError> {
        self.solve(lambda, false)
    }

    /// Like [`integrate`](Self::integrate), also keeping the full augmented
    /// state so that `φ` can be evaluated between grid points.
    pub fn integrate_dense(&self, lambda: T) -> Result<Trajectory<T>, ForwardError> {
        self.solve(lambda, true)
    }

    fn solve(&self, lambda: T, dense: bool) -> Result<Trajectory<T>, ForwardError> {
        let len = self.grid().len();
        let dim = self.state_dim();
        let mut phi1 = Vec::with_capacity(len);
        let mut phi2 = Vec::with_capacity(len);
        let mut w = Vec::with_capacity(len);
        let mut states = if dense { Vec::with_capacity(len * dim) } else { Vec::new() };
        let th = self.problem.theta();
        self.march(lambda, |i, u| {
            if i == 0 {
                phi1.push(th.cos());
                phi2.push(-th.sin());
            } else {
                let a = lambda * self.half_node(2 * i);
                let (c, s) = (a.cos(), a.sin());
                phi1.push(c * u[0] - s * u[1]);
                phi2.push(s * u[0] + c * u[1]);
            }
            w.push(u[W]);
            if dense {
                states.extend_from_slice(u);
            }
        })?;
        Ok(Trajectory { lambda, grid: *self.grid(), phi1, phi2, omega_integral: w, states, dim })
    }

    /// `Λ(λ) = φ₁(π, λ) − ∫₀^π ω φ₁`, without storing the trajectory.
    pub fn characteristic(&self, lambda: T) -> Result<T, ForwardError> {
        let n = self.grid().n_intervals();
        let mut out = T::zero();
        self.march(lambda, |i, u| {
            if i == n {
                let a = lambda * self.grid().hi();
                out = a.cos() * u[0] - a.sin() * u[1] - u[W];
            }
        })?;
        Ok(out)
    }

    /// `(φ₁, φ₂)` at `xᵢ + δ`, `0 ≤ δ ≤ h`, by one partial step from the stored state at `xᵢ`.
    pub(crate) fn substep(&self, traj: &Trajectory<T>, i: usize, delta: T) -> Result<(T, T), ForwardError> {
        let dim = self.state_dim();
        let mut u = traj.states[i * dim..(i + 1) * dim].to_vec();
        let x0 = self.half_node(2 * i);
        let lambda = traj.lambda;
        let x1 = x0 + delta;
        let trig = |x: T| {
            let a = lambda * x;
            (a.cos(), a.sin())
        };
        let mut scratch = Scratch::new(dim);
        if delta > T::zero() {
            let c1 = self.coeffs_at(x1)?;
            match self.scheme {
                Scheme::Rk4 => {
                    let xm = x0 + delta * T::lit(0.5);
                    let cm = self.coeffs_at(xm)?;
                    Self::rk4_step(
                        &self.table(2 * i),
                        &cm.view(),
                        &c1.view(),
                        [trig(x0), trig(xm), trig(x1)],
                        delta,
                        &mut u,
                        &mut scratch,
                    );
                }
                Scheme::Trapezoid => {
                    Self::trapezoid_step(&self.table(2 * i), &c1.view(), [trig(x0), trig(x1)], delta, x1, &mut u, &mut scratch)?;
                }
            }
        }
        let (c, s) = trig(x1);
        Ok((c * u[0] - s * u[1], s * u[0] + c * u[1]))
    }
}

struct Scratch<T> {
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    tmp: Vec<T>,
}

impl<T: Real> Scratch<T> {
    fn new(dim: usize) -> Self {
        let z = vec![T::zero(); dim];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }
}

fn axpy<T: Real>(out: &mut [T], u: &[T], a: T, k: &[T]) {
    for i in 0..out.len() {
        out[i] = u[i] + a * k[i];
    }
}
