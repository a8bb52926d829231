//! Separable approximation of the memory kernel in its second argument:
//! `M(x, t) ≈ Σₖ M(x, tₖ) ℓₖ(t)` with Lagrange basis polynomials `ℓₖ` at
//! Chebyshev points of `[0, π]`. The memory integral then becomes a set of
//! running integrals `Jₖ(x) = ∫₀ˣ ℓₖ(t) Y(t) dt` that evolve with the state.

use crate::model::{Kernel, ModelError};
use crate::Real;

const RANKS: [usize; 10] = [1, 2, 4, 8, 12, 16, 24, 32, 48, 64];
const REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub(crate) struct ChebyshevBasis<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> ChebyshevBasis<T> {
    pub(crate) fn new(rank: usize) -> Self {
        let half_pi = T::FRAC_PI_2();
        let mut nodes = Vec::with_capacity(rank);
        let mut weights = Vec::with_capacity(rank);
        for k in 0..rank {
            let a = T::PI() * T::from_usize_lossy(2 * k + 1) / T::from_usize_lossy(2 * rank);
            nodes.push(half_pi * (T::one() - a.cos()));
            let w = a.sin();
            weights.push(if k % 2 == 0 { w } else { -w });
        }
        Self { nodes, weights }
    }

    pub(crate) fn rank(&self) -> usize {
        self.nodes.len()
    }

    pub(crate) fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Values of all basis polynomials at `t` (barycentric form).
    pub(crate) fn eval_into(&self, t: T, out: &mut [T]) {
        if let Some(k) = self.nodes.iter().position(|&tk| tk == t) {
            out.iter_mut().for_each(|o| *o = T::zero());
            out[k] = T::one();
            return;
        }
        let mut denom = T::zero();
        for (k, o) in out.iter_mut().enumerate() {
            let q = self.weights[k] / (t - self.nodes[k]);
            *o = q;
            denom += q;
        }
        out.iter_mut().for_each(|o| *o /= denom);
    }
}

/// Smallest rank whose interpolation error at check points meets the tolerance;
/// returns `(rank, achieved max error)`. Rank 0 means the kernel is identically zero.
pub(crate) fn choose_rank<T: Real>(kernel: &Kernel<T>) -> Result<(usize, T), ModelError> {
    if kernel.is_zero() {
        return Ok((0, T::zero()));
    }
    let pi = T::PI();
    let xs: Vec<T> = (0..9).map(|i| pi * T::from_usize_lossy(i) / T::lit(8.0)).collect();
    // Check points avoid both the grid of x samples and the Chebyshev nodes.
    let ts: Vec<T> = (0..41).map(|i| pi * (T::from_usize_lossy(i) + T::lit(0.37)) / T::lit(41.0)).collect();
    let mut exact = Vec::with_capacity(4 * xs.len() * ts.len());
    let mut scale = T::one();
    for (field, k) in kernel.entries() {
        for &x in &xs {
            for &t in &ts {
                let v = k.eval(x, t).map_err(|source| ModelError::Expr { field, source })?;
                scale = scale.max(v.abs());
                exact.push(v);
            }
        }
    }
    let tol = T::lit(REL_TOL) * scale;
    let mut best = (RANKS[RANKS.len() - 1], T::infinity());
    for &rank in &RANKS {
        let basis = ChebyshevBasis::new(rank);
        let mut ell = vec![T::zero(); rank];
        let mut err = T::zero();
        let mut idx = 0;
        for (field, k) in kernel.entries() {
            for &x in &xs {
                let at_nodes = basis
                    .nodes()
                    .iter()
                    .map(|&tk| k.eval(x, tk).map_err(|source| ModelError::Expr { field, source }))
                    .collect::<Result<Vec<_>, _>>()?;
                for &t in &ts {
                    basis.eval_into(t, &mut ell);
                    let approx: T = ell.iter().zip(&at_nodes).map(|(&l, &m)| l * m).sum();
                    err = err.max((approx - exact[idx]).abs());
                    idx += 1;
                }
            }
        }
        if err <= tol {
            return Ok((rank, err));
        }
        if err < best.1 {
            best = (rank, err);
        }
    }
    Ok(best)
}
