//! Problem definition and the coefficient functions derived from it.

mod coefficients;
mod spec;

pub use coefficients::{derive_coefficients, validate_for_inversion, Coefficients, InversionReport, DEGENERATE_SIN_2THETA};
pub use spec::{FunctionSpec, KernelSpec};

use crate::exprlang::{parse, Arity, ExprError};
use crate::numerics::{Grid, NumericsError};
use crate::Real;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("theta = {0} is outside the open interval 0 < θ < π")]
    ThetaOutOfRange(f64),
    #[error("{field}: {source}")]
    Expr {
        field: &'static str,
        #[source]
        source: ExprError,
    },
    #[error("{field}: {source}")]
    Numerics {
        field: &'static str,
        #[source]
        source: NumericsError,
    },
    #[error("{field}: sample table has {got} values, expected {expected}")]
    TableShape { field: &'static str, expected: usize, got: usize },
}

/// The four entries of the memory kernel `M(x, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel<T> {
    pub m11: KernelSpec<T>,
    pub m12: KernelSpec<T>,
    pub m21: KernelSpec<T>,
    pub m22: KernelSpec<T>,
}

impl<T: Real> Kernel<T> {
    pub fn zero() -> Self {
        Self { m11: KernelSpec::zero(), m12: KernelSpec::zero(), m21: KernelSpec::zero(), m22: KernelSpec::zero() }
    }

    pub fn entries(&self) -> [(&'static str, &KernelSpec<T>); 4] {
        [("m11", &self.m11), ("m12", &self.m12), ("m21", &self.m21), ("m22", &self.m22)]
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|(_, k)| k.is_zero())
    }
}

/// A boundary value problem on `[0, π]`: Dirac system with potential
/// `diag(p, r)`, memory kernel `M`, boundary angle `θ` at `x = 0` and
/// integral condition `y₁(π) = ∫ ω y₁` at `x = π`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem<T> {
    theta: T,
    pub p: FunctionSpec<T>,
    pub r: FunctionSpec<T>,
    pub kernel: Kernel<T>,
    pub omega: FunctionSpec<T>,
    pub grid: Grid<T>,
}

impl<T: Real> Problem<T> {
    pub fn new(
        theta: T,
        p: FunctionSpec<T>,
        r: FunctionSpec<T>,
        kernel: Kernel<T>,
        omega: FunctionSpec<T>,
        grid: Grid<T>,
    ) -> Result<Self, ModelError> {
        check_theta(theta)?;
        Ok(Self { theta, p, r, kernel, omega, grid })
    }

    /// Build a problem from expression strings: `[p, r, m11, m12, m21, m22, omega]`.
    pub fn from_exprs(theta: T, exprs: [&str; 7], n_intervals: usize) -> Result<Self, ModelError> {
        let uni = |field, s: &str| {
            parse(s, Arity::Univariate).map(FunctionSpec::Expr).map_err(|source| ModelError::Expr { field, source })
        };
        let bi = |field, s: &str| {
            parse(s, Arity::Bivariate).map(KernelSpec::Expr).map_err(|source| ModelError::Expr { field, source })
        };
        let grid = Grid::new(n_intervals).map_err(|source| ModelError::Numerics { field: "grid_n", source })?;
        let kernel = Kernel {
            m11: bi("m11", exprs[2])?,
            m12: bi("m12", exprs[3])?,
            m21: bi("m21", exprs[4])?,
            m22: bi("m22", exprs[5])?,
        };
        Self::new(theta, uni("p", exprs[0])?, uni("r", exprs[1])?, kernel, uni("omega", exprs[6])?, grid)
    }

    /// All coefficients identically zero.
    pub fn zero(theta: T, n_intervals: usize) -> Result<Self, ModelError> {
        Self::from_exprs(theta, ["0"; 7], n_intervals)
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// Same problem on a different grid.
    pub fn with_grid(&self, grid: Grid<T>) -> Self {
        Self { grid, ..self.clone() }
    }

    pub fn with_grid_n(&self, n_intervals: usize) -> Result<Self, ModelError> {
        let grid = Grid::new(n_intervals).map_err(|source| ModelError::Numerics { field: "grid_n", source })?;
        Ok(self.with_grid(grid))
    }
}

pub(crate) fn check_theta<T: Real>(theta: T) -> Result<(), ModelError> {
    if theta > T::zero() && theta < T::PI() {
        Ok(())
    } else {
        Err(ModelError::ThetaOutOfRange(theta.to_f64_lossy()))
    }
}
