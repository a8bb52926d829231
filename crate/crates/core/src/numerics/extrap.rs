use crate::numerics::NumericsError;
use crate::Real;

/// Default upper bound on the condition estimate of an extrapolation fit.
pub const DEFAULT_CONDITION_BOUND: f64 = 1e10;

/// Result of a least-squares fit in powers of `1/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation<T> {
    /// Fitted coefficients `c₀, c₁, …` of `c₀ + c₁/n + … + c_k/nᵏ`.
    pub coefficients: Vec<T>,
    /// Root-mean-square residual of the fit.
    pub residual: T,
    pub condition: T,
}

impl<T: Real> Extrapolation<T> {
    pub fn limit(&self) -> T {
        self.coefficients[0]
    }
}

/// Least-squares limit of a sequence indexed by `n`; returns `c₀`.
pub fn extrapolate<T: Real>(pairs: &[(i64, T)], model_order: usize) -> Result<T, NumericsError> {
    extrapolate_with_bound(pairs, model_order, T::lit(DEFAULT_CONDITION_BOUND)).map(|e| e.limit())
}

pub fn extrapolate_with_bound<T: Real>(
    pairs: &[(i64, T)],
    model_order: usize,
    condition_bound: T,
) -> Result<Extrapolation<T>, NumericsError> {
    let mut ns: Vec<i64> = pairs.iter().map(|p| p.0).filter(|&n| n != 0).collect();
    ns.sort_unstable();
    ns.dedup();
    let needed = model_order + 1;
    if ns.len() < needed || pairs.iter().any(|p| p.0 == 0) {
        return Err(NumericsError::InsufficientData { needed, order: model_order, got: ns.len() });
    }
    // Columns in u = n_min/n keep the design matrix entries in [-1, 1].
    let scale = T::lit(pairs.iter().map(|p| p.0.unsigned_abs()).min().unwrap_or(1) as f64);
    let rows: Vec<Vec<T>> = pairs
        .iter()
        .map(|&(n, _)| {
            let u = scale / T::lit(n as f64);
            let mut row = Vec::with_capacity(needed);
            let mut p = T::one();
            for _ in 0..needed {
                row.push(p);
                p *= u;
            }
            row
        })
        .collect();
    let rhs: Vec<T> = pairs.iter().map(|p| p.1).collect();
    let fit = least_squares(rows, rhs)?;
    if !(fit.condition <= condition_bound) {
        return Err(NumericsError::IllConditioned {
            condition: fit.condition.to_f64_lossy(),
            bound: condition_bound.to_f64_lossy(),
        });
    }
    let mut coefficients = fit.solution;
    let mut s = T::one();
    for c in coefficients.iter_mut() {
        *c *= s;
        s *= scale;
    }
    Ok(Extrapolation { coefficients, residual: fit.rms_residual, condition: fit.condition })
}

pub(crate) struct LeastSquares<T> {
    pub solution: Vec<T>,
    pub rms_residual: T,
    pub condition: T,
}

/// Householder QR least squares for a small dense system (`rows × cols`, rows ≥ cols).
pub(crate) fn least_squares<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Result<LeastSquares<T>, NumericsError> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    if m < n || n == 0 {
        return Err(NumericsError::InsufficientData { needed: n.max(1), order: n.saturating_sub(1), got: m });
    }
    for k in 0..n {
        let norm = (k..m).map(|i| a[i][k] * a[i][k]).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if a[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        for j in k..n {
            let dot: T = (k..m).map(|i| v[i - k] * a[i][j]).sum();
            let s = (dot + dot) / vnorm2;
            for i in k..m {
                a[i][j] -= s * v[i - k];
            }
        }
        let dot: T = (k..m).map(|i| v[i - k] * b[i]).sum();
        let s = (dot + dot) / vnorm2;
        for i in k..m {
            b[i] -= s * v[i - k];
        }
    }
    let diag: Vec<T> = (0..n).map(|i| a[i][i].abs()).collect();
    let dmax = diag.iter().copied().fold(T::zero(), T::max);
    let dmin = diag.iter().copied().fold(T::infinity(), T::min);
    let condition = if dmin == T::zero() { T::infinity() } else { dmax / dmin };
    if !condition.is_finite() {
        return Err(NumericsError::IllConditioned { condition: f64::INFINITY, bound: f64::INFINITY });
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    let rss: T = b[n..].iter().map(|&r| r * r).sum();
    let rms_residual = (rss / T::from_usize_lossy(m)).sqrt();
    Ok(LeastSquares { solution: x, rms_residual, condition })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequence() {
        let pairs: Vec<(i64, f64)> = [10, 20, 40].iter().map(|&n| (n, 2.75)).collect();
        assert!((extrapolate(&pairs, 1).unwrap() - 2.75).abs() < 1e-14);
    }

    #[test]
    fn exact_first_order_model() {
        let pairs: Vec<(i64, f64)> = [10, 20, 40].iter().map(|&n| (n, 5.0 + 3.0 / n as f64)).collect();
        assert!((extrapolate(&pairs, 1).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn second_order_model() {
        let pairs: Vec<(i64, f64)> =
            (8..=64).map(|n| (n, 1.0 + 1.0 / n as f64 + 1.0 / (n * n) as f64)).collect();
        let e = extrapolate_with_bound(&pairs, 2, DEFAULT_CONDITION_BOUND).unwrap();
        assert!((e.limit() - 1.0).abs() < 1e-9);
        assert!((e.coefficients[1] - 1.0).abs() < 1e-8);
        assert!(e.residual < 1e-12);
    }

    #[test]
    fn too_few_points() {
        let pairs = [(10_i64, 1.0_f64), (10, 1.1)];
        assert!(matches!(extrapolate(&pairs, 1), Err(NumericsError::InsufficientData { .. })));
    }

    #[test]
    fn condition_bound_is_enforced() {
        let pairs: Vec<(i64, f64)> = (1000..1004).map(|n| (n, 1.0 / n as f64)).collect();
        assert!(matches!(
            extrapolate_with_bound(&pairs, 3, 10.0),
            Err(NumericsError::IllConditioned { .. })
        ));
    }

    #[test]
    fn negative_indices() {
        let pairs: Vec<(i64, f64)> = [-10, -20, -40].iter().map(|&n| (n, 1.0 - 2.0 / n as f64)).collect();
        assert!((extrapolate(&pairs, 1).unwrap() - 1.0).abs() < 1e-12);
    }
}
