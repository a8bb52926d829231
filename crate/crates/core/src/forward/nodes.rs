use super::{ForwardError, Propagator, Trajectory};
use crate::model::Problem;
use crate::numerics::{try_bisect, NumericsError};
use crate::Real;

/// Zeros of `φ₁(·, λₙ)` in `(0, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeList<T> {
    pub n: i64,
    pub lambda: T,
    /// All zeros found, strictly increasing.
    pub nodes: Vec<T>,
    /// Label `j` of the first zero, from its phase `λx − θ ≈ (j + ½)π`.
    /// It is `−1` when `θ > π/2`, where an extra zero precedes `xₙ⁰`.
    pub first_label: i64,
}

impl<T: Real> NodeList<T> {
    /// Whether the number of zeros equals `n`.
    pub fn count_matches(&self) -> bool {
        self.nodes.len() as i64 == self.n
    }

    /// The zeros labelled `j = 0, …, n − 1`.
    pub fn labelled_nodes(&self) -> &[T] {
        let skip = (-self.first_label).max(0) as usize;
        let skip = skip.min(self.nodes.len());
        let take = (self.n.max(0) as usize).min(self.nodes.len() - skip);
        &self.nodes[skip..skip + take]
    }
}

/// Nodal points of the eigenfunction for `λ = lambda_n`.
pub fn nodes<T: Real>(problem: &Problem<T>, lambda_n: T, n: i64, tol: T) -> Result<NodeList<T>, ForwardError> {
    nodes_with(&Propagator::new(problem)?, lambda_n, n, tol)
}

/// Sign changes of the grid samples are refined by bisection on a partial
/// integration step from the left grid point; exact zeros at interior grid
/// points are taken as they are.
pub fn nodes_with<T: Real>(prop: &Propagator<'_, T>, lambda_n: T, n: i64, tol: T) -> Result<NodeList<T>, ForwardError> {
    let traj = prop.integrate_dense(lambda_n)?;
    let found = refine(prop, &traj, tol)?;
    let theta = prop.problem().theta();
    let first_label = found
        .first()
        .map(|&x| ((lambda_n * x - theta) / T::PI() - T::lit(0.5)).round().to_f64_lossy() as i64)
        .unwrap_or(0);
    Ok(NodeList { n, lambda: lambda_n, nodes: found, first_label })
}

fn refine<T: Real>(prop: &Propagator<'_, T>, traj: &Trajectory<T>, tol: T) -> Result<Vec<T>, ForwardError> {
    let grid = traj.grid;
    let last = grid.n_intervals();
    let phi = &traj.phi1;
    // A zero sitting on an endpoint (e.g. φ₁(π) = 0 when ω ≡ 0) shows up as
    // a sample of arbitrary sign at the level set by round-off and by the
    // eigenvalue tolerance (|δφ₁(π)| ≈ π|δλ|); it is not interior.
    let scale = phi.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let level = (T::lit(64.0) * T::epsilon()).max(T::lit(4.0) * T::PI() * tol);
    let negligible = |v: T| v.abs() <= level * scale;
    let mut out = Vec::new();
    for i in 0..last {
        if (i == 0 && negligible(phi[0])) || (i + 1 == last && negligible(phi[last])) {
            continue;
        }
        if i > 0 && phi[i] == T::zero() {
            out.push(grid.node(i));
            continue;
        }
        if !(phi[i] * phi[i + 1] < T::zero()) {
            continue;
        }
        let h = grid.node(i + 1) - grid.node(i);
        let mut err = None;
        let f = |d: T| match prop.substep(traj, i, d) {
            Ok((v, _)) => v,
            Err(e) => {
                err.get_or_insert(e);
                T::zero()
            }
        };
        let x = match try_bisect(f, T::zero(), h, tol) {
            Ok((d, _)) => grid.node(i) + d,
            // The partial step disagrees in sign with the stored endpoint only
            // when |φ₁| there is at round-off level; that endpoint is the zero.
            Err(NumericsError::NoSignChange { .. }) => {
                if phi[i].abs() <= phi[i + 1].abs() {
                    grid.node(i)
                } else {
                    grid.node(i + 1)
                }
            }
            Err(e) => return Err(e.into()),
        };
        if let Some(e) = err {
            return Err(e);
        }
        out.push(x);
    }
    Ok(out)
}

/// Smallest `N₀` such that every list with `n ≥ N₀` has exactly `n` nodes.
pub fn node_count_threshold<T: Real>(lists: &[NodeList<T>]) -> i64 {
    let mut sorted: Vec<&NodeList<T>> = lists.iter().collect();
    sorted.sort_by_key(|l| l.n);
    let mut threshold = sorted.first().map_or(1, |l| l.n);
    for l in &sorted {
        if !l.count_matches() {
            threshold = l.n + 1;
        }
    }
    threshold
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{p0, p1};
    use std::f64::consts::PI;

    #[test]
    fn free_nodes() {
        let l = nodes(&p0::<f64>(4000), 4.0, 3, 1e-12).unwrap();
        assert_eq!(l.nodes.len(), 3);
        for (x, want) in l.nodes.iter().zip([PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]) {
            assert!((x - want).abs() < 1e-10);
        }
        assert_eq!(l.first_label, 0);
        assert!(l.count_matches());
    }

    #[test]
    fn obtuse_theta_has_an_extra_zero() {
        let theta = 3.0 * PI / 4.0;
        let pb = Problem::<f64>::zero(theta, 4000).unwrap();
        let lam = 5.0 + 0.5 + 0.75;
        let l = nodes(&pb, lam, 5, 1e-12).unwrap();
        assert_eq!(l.first_label, -1);
        assert_eq!(l.nodes.len(), 6);
        assert_eq!(l.labelled_nodes().len(), 5);
        assert!((l.labelled_nodes()[0] - (0.5 * PI + theta) / lam).abs() < 1e-10);
    }

    #[test]
    fn p1_reference_nodes() {
        let pb = p1::<f64>(4000);
        let prop = Propagator::new(&pb).unwrap();
        let l = nodes_with(&prop, 5.818460223326608, 5, 1e-13).unwrap();
        assert!(l.count_matches());
        assert!((l.nodes[0] - 0.4659246587169595).abs() < 1e-10);
        assert!((l.nodes[4] - 2.5989318591677737).abs() < 1e-10);
        let l = nodes_with(&prop, 50.82996540860035, 50, 1e-13).unwrap();
        assert!(l.count_matches());
        assert!((l.nodes[0] - 0.05170993441453855).abs() < 1e-10);
        assert!((l.nodes[49] - 3.0798073124254985).abs() < 1e-10);
    }

    #[test]
    fn threshold() {
        let mk = |n, len| NodeList { n, lambda: 0.0, nodes: vec![0.5; len], first_label: 0 };
        assert_eq!(node_count_threshold(&[mk(1, 2), mk(2, 2), mk(3, 3)]), 2);
        assert_eq!(node_count_threshold(&[mk(1, 1), mk(2, 2)]), 1);
    }
}
