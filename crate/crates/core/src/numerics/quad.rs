use crate::numerics::SampledFunction;
use crate::Real;

/// Composite trapezoid rule over the whole grid.
pub fn trapezoid<T: Real>(f: &SampledFunction<T>) -> T {
    // Same accumulation order as `cumulative`, so both agree bitwise.
    running(f).last().copied().unwrap_or_else(T::zero)
}

/// Running trapezoid integral: `out[0] = 0`, `out[i] = ∫_{x₀}^{xᵢ} f`.
pub fn cumulative<T: Real>(f: &SampledFunction<T>) -> SampledFunction<T> {
    SampledFunction::new(*f.grid(), running(f)).expect("partial sums of finite samples are finite")
}

fn running<T: Real>(f: &SampledFunction<T>) -> Vec<T> {
    let half_h = f.grid().step() * T::lit(0.5);
    let v = f.values();
    let mut out = Vec::with_capacity(v.len());
    let mut acc = T::zero();
    out.push(acc);
    for w in v.windows(2) {
        acc += half_h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}
