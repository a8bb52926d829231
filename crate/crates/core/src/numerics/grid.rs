use crate::numerics::NumericsError;
use crate::Real;

/// Uniform grid `lo = x₀ < x₁ < … < x_N = hi`.
///
/// The default grid covers `[0, π]`; sub-intervals are used for inversion
/// grids. The last node is stored exactly (`x_N = hi`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    lo: T,
    hi: T,
    n_intervals: usize,
}

impl<T: Real> Grid<T> {
    /// Grid with `n_intervals` intervals on `[0, π]`.
    pub fn new(n_intervals: usize) -> Result<Self, NumericsError> {
        Self::interval(T::zero(), T::PI(), n_intervals)
    }

    pub fn interval(lo: T, hi: T, n_intervals: usize) -> Result<Self, NumericsError> {
        if n_intervals < 1 {
            return Err(NumericsError::TooFewIntervals { min: 1, got: n_intervals });
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(NumericsError::InvalidInterval { lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
        }
        Ok(Self { lo, hi, n_intervals })
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    /// Number of nodes, `N + 1`.
    pub fn len(&self) -> usize {
        self.n_intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lo(&self) -> T {
        self.lo
    }

    pub fn hi(&self) -> T {
        self.hi
    }

    pub fn step(&self) -> T {
        (self.hi - self.lo) / T::from_usize_lossy(self.n_intervals)
    }

    /// Node `xᵢ = lo + i (hi − lo) / N`.
    pub fn node(&self, i: usize) -> T {
        if i == self.n_intervals {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * T::from_usize_lossy(i) / T::from_usize_lossy(self.n_intervals)
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Index of the interval `[xᵢ, xᵢ₊₁]` containing `x` (clamped).
    pub fn locate(&self, x: T) -> usize {
        let u = ((x - self.lo) / self.step()).floor();
        let i = u.to_f64_lossy();
        if i.is_nan() || i < 0.0 {
            0
        } else {
            (i as usize).min(self.n_intervals - 1)
        }
    }

    /// Same grid with twice as many intervals.
    pub fn refined(&self) -> Self {
        Self { n_intervals: 2 * self.n_intervals, ..*self }
    }
}

/// Values of a scalar function on the nodes of a [`Grid`]; all values finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    grid: Grid<T>,
    values: Vec<T>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(grid: Grid<T>, values: Vec<T>) -> Result<Self, NumericsError> {
        if values.len() != grid.len() {
            return Err(NumericsError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some((index, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(NumericsError::NonFinite { index, value: v.to_f64_lossy() });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid<T>, f: impl Fn(T) -> T) -> Result<Self, NumericsError> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn zeros(grid: Grid<T>) -> Self {
        Self { grid, values: vec![T::zero(); grid.len()] }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn first(&self) -> T {
        self.values[0]
    }

    pub fn last(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// Pointwise map; fails only if the map produces a non-finite value.
    pub fn map(&self, f: impl Fn(T, T) -> T) -> Result<Self, NumericsError> {
        let values = self.grid.nodes().into_iter().zip(&self.values).map(|(x, &v)| f(x, v)).collect();
        Self::new(self.grid, values)
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self, NumericsError> {
        if other.values.len() != self.values.len() {
            return Err(NumericsError::LengthMismatch { expected: self.values.len(), got: other.values.len() });
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.grid, values)
    }

    /// Cubic Lagrange interpolation through the four nearest samples.
    pub fn interpolate(&self, x: T) -> T {
        crate::numerics::interp::lagrange_on_grid(&self.grid, &self.values, x, 4)
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Sup norm of `self − g` restricted to nodes in `[a, b]`.
    pub fn sup_diff_on(&self, g: impl Fn(T) -> T, a: T, b: T) -> T {
        self.grid
            .nodes()
            .into_iter()
            .zip(&self.values)
            .filter(|(x, _)| *x >= a && *x <= b)
            .fold(T::zero(), |m, (x, &v)| m.max((v - g(x)).abs()))
    }
}
