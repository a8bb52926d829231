use crate::numerics::{NumericsError, SampledFunction};
use crate::Real;

/// Second-order finite differences: central in the interior, one-sided
/// three-point stencils at both ends.
pub fn central_diff<T: Real>(f: &SampledFunction<T>) -> Result<SampledFunction<T>, NumericsError> {
    let n = f.grid().n_intervals();
    if n < 2 {
        return Err(NumericsError::TooFewIntervals { min: 2, got: n });
    }
    let h = f.grid().step();
    let v = f.values();
    let two_h = h + h;
    let mut d = Vec::with_capacity(v.len());
    d.push((-T::lit(3.0) * v[0] + T::lit(4.0) * v[1] - v[2]) / two_h);
    for i in 1..n {
        d.push((v[i + 1] - v[i - 1]) / two_h);
    }
    d.push((T::lit(3.0) * v[n] - T::lit(4.0) * v[n - 1] + v[n - 2]) / two_h);
    SampledFunction::new(*f.grid(), d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid;

    #[test]
    fn constant_and_affine() {
        let g = Grid::<f64>::new(9).unwrap();
        let c = central_diff(&SampledFunction::from_fn(g, |_| 2.5).unwrap()).unwrap();
        assert!(c.values().iter().all(|v| v.abs() < 1e-12));
        let a = central_diff(&SampledFunction::from_fn(g, |x| x).unwrap()).unwrap();
        assert!(a.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn sine_derivative() {
        let g = Grid::<f64>::new(2000).unwrap();
        let d = central_diff(&SampledFunction::from_fn(g, f64::sin).unwrap()).unwrap();
        assert!(d.sup_diff_on(f64::cos, 0.0, std::f64::consts::PI) < 1e-5);
    }

    #[test]
    fn needs_two_intervals() {
        let g = Grid::<f64>::new(1).unwrap();
        assert!(central_diff(&SampledFunction::zeros(g)).is_err());
    }
}
