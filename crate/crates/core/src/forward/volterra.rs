use rayon::prelude::*;

use super::{ForwardError, Trajectory};
use crate::model::{ModelError, Problem};
use crate::numerics::{cumulative, SampledFunction};
use crate::Real;

/// Sup-norm mismatch of the trajectory against the right-hand sides of the
/// equivalent Volterra integral equations
///
/// ```text
/// φ₁(x) = cos(λx − θ) + ∫₀ˣ [cos λ(x−t) F₁(t) − sin λ(x−t) F₂(t)] dt,
/// φ₂(x) = sin(λx − θ) + ∫₀ˣ [sin λ(x−t) F₁(t) + cos λ(x−t) F₂(t)] dt,
/// F₁ = r φ₂ + (∫₀ᵗ M φ)₂,   F₂ = −p φ₁ − (∫₀ᵗ M φ)₁,
/// ```
///
/// with every integral (including the memory term, kernel evaluated directly)
/// done by the trapezoid rule on the trajectory's own samples.
pub fn volterra_residual<T: Real>(problem: &Problem<T>, traj: &Trajectory<T>) -> Result<(T, T), ForwardError> {
    let grid = problem.grid;
    if traj.grid != grid {
        return Err(ForwardError::GridMismatch);
    }
    let xs = grid.nodes();
    let h = grid.step();
    let half = T::lit(0.5);
    let (y1, y2) = (&traj.phi1, &traj.phi2);
    let kernel = &problem.kernel;
    let memory: Vec<(T, T)> = if kernel.is_zero() {
        vec![(T::zero(), T::zero()); xs.len()]
    } else {
        xs.par_iter()
            .enumerate()
            .map(|(i, &x)| {
                let (mut a1, mut a2) = (T::zero(), T::zero());
                for k in 0..=i {
                    let t = xs[k];
                    let w = if k == 0 || k == i { half * h } else { h };
                    let m = |field, spec: &crate::model::KernelSpec<T>| {
                        spec.eval(x, t).map_err(|source| ForwardError::Model(ModelError::Expr { field, source }))
                    };
                    let (m11, m12) = (m("m11", &kernel.m11)?, m("m12", &kernel.m12)?);
                    let (m21, m22) = (m("m21", &kernel.m21)?, m("m22", &kernel.m22)?);
                    a1 += w * (m11 * y1[k] + m12 * y2[k]);
                    a2 += w * (m21 * y1[k] + m22 * y2[k]);
                }
                if i == 0 {
                    return Ok((T::zero(), T::zero()));
                }
                Ok((a1, a2))
            })
            .collect::<Result<_, ForwardError>>()?
    };
    let e = |field| move |source| ForwardError::Model(ModelError::Expr { field, source });
    let p = problem.p.sample(&grid).map_err(e("p"))?;
    let r = problem.r.sample(&grid).map_err(e("r"))?;
    let lambda = traj.lambda;
    let n = xs.len();
    let (mut f1, mut f2) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        f1.push(r.values()[i] * y2[i] + memory[i].1);
        f2.push(-p.values()[i] * y1[i] - memory[i].0);
    }
    let trig: Vec<(T, T)> = xs.iter().map(|&x| ((lambda * x).cos(), (lambda * x).sin())).collect();
    let run = |f: &[T], pick: fn((T, T)) -> T| {
        let s = SampledFunction::new(grid, (0..n).map(|i| pick(trig[i]) * f[i]).collect())?;
        Ok::<_, ForwardError>(cumulative(&s).into_values())
    };
    let cos_of = |cs: (T, T)| cs.0;
    let sin_of = |cs: (T, T)| cs.1;
    let (cf1, sf1) = (run(&f1, cos_of)?, run(&f1, sin_of)?);
    let (cf2, sf2) = (run(&f2, cos_of)?, run(&f2, sin_of)?);
    let theta = problem.theta();
    let (mut r1, mut r2) = (T::zero(), T::zero());
    for i in 0..n {
        let (c, s) = trig[i];
        let a = lambda * xs[i] - theta;
        let rhs1 = a.cos() + c * cf1[i] + s * sf1[i] - s * cf2[i] + c * sf2[i];
        let rhs2 = a.sin() + s * cf1[i] - c * sf1[i] + c * cf2[i] + s * sf2[i];
        r1 = r1.max((y1[i] - rhs1).abs());
        r2 = r2.max((y2[i] - rhs2).abs());
    }
    Ok((r1, r2))
}
