use crate::exprlang::{parse, Arity, ExprAst, ExprError};
use crate::numerics::{Grid, SampledFunction};
use crate::Real;

use super::ModelError;

/// A function of `x` on `[0, π]`: an expression, or samples on a uniform grid
/// (evaluated off-grid by cubic interpolation).
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec<T> {
    Expr(ExprAst),
    Samples(SampledFunction<T>),
}

impl<T: Real> FunctionSpec<T> {
    pub fn zero() -> Self {
        FunctionSpec::Expr(parse("0", Arity::Univariate).expect("literal parses"))
    }

    pub fn parse(source: &str) -> Result<Self, ExprError> {
        parse(source, Arity::Univariate).map(FunctionSpec::Expr)
    }

    pub fn eval(&self, x: T) -> Result<T, ExprError> {
        match self {
            FunctionSpec::Expr(e) => e.evaluate(x, None),
            FunctionSpec::Samples(s) => Ok(s.interpolate(x)),
        }
    }

    pub fn sample(&self, grid: &Grid<T>) -> Result<SampledFunction<T>, ExprError> {
        match self {
            FunctionSpec::Expr(e) => e.sample(grid, None),
            FunctionSpec::Samples(s) if s.grid() == grid => Ok(s.clone()),
            FunctionSpec::Samples(s) => {
                Ok(SampledFunction::from_fn(*grid, |x| s.interpolate(x)).expect("interpolated samples are finite"))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FunctionSpec::Expr(e) => e.is_literal_zero(),
            FunctionSpec::Samples(s) => s.values().iter().all(|v| *v == T::zero()),
        }
    }
}

/// A function of `(x, t)` on the square `[0, π]²`: an expression, or a
/// row-major table `values[i·(N+1) + k] = M(xᵢ, t_k)` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec<T> {
    Expr(ExprAst),
    Table { grid: Grid<T>, values: Vec<T> },
}

impl<T: Real> KernelSpec<T> {
    pub fn zero() -> Self {
        KernelSpec::Expr(parse("0", Arity::Bivariate).expect("literal parses"))
    }

    pub fn parse(source: &str) -> Result<Self, ExprError> {
        parse(source, Arity::Bivariate).map(KernelSpec::Expr)
    }

    pub fn table(field: &'static str, grid: Grid<T>, values: Vec<T>) -> Result<Self, ModelError> {
        let expected = grid.len() * grid.len();
        if values.len() != expected {
            return Err(ModelError::TableShape { field, expected, got: values.len() });
        }
        Ok(KernelSpec::Table { grid, values })
    }

    pub fn eval(&self, x: T, t: T) -> Result<T, ExprError> {
        match self {
            KernelSpec::Expr(e) => e.evaluate(x, Some(t)),
            KernelSpec::Table { grid, values } => Ok(bicubic(grid, values, x, t)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            KernelSpec::Expr(e) => e.is_literal_zero(),
            KernelSpec::Table { values, .. } => values.iter().all(|v| *v == T::zero()),
        }
    }
}

fn cubic_weights<T: Real>(grid: &Grid<T>, x: T) -> (usize, [T; 4]) {
    let n = grid.len();
    let s = (grid.locate(x) + 1).saturating_sub(2).min(n.saturating_sub(4));
    let m = 4.min(n);
    let mut w = [T::zero(); 4];
    for (i, wi) in w.iter_mut().enumerate().take(m) {
        let xi = grid.node(s + i);
        let mut l = T::one();
        for k in 0..m {
            if k != i {
                let xk = grid.node(s + k);
                l *= (x - xk) / (xi - xk);
            }
        }
        *wi = l;
    }
    (s, w)
}

fn bicubic<T: Real>(grid: &Grid<T>, values: &[T], x: T, t: T) -> T {
    let n = grid.len();
    let m = 4.min(n);
    let (sx, wx) = cubic_weights(grid, x);
    let (st, wt) = cubic_weights(grid, t);
    let mut acc = T::zero();
    for i in 0..m {
        let row = &values[(sx + i) * n..(sx + i + 1) * n];
        let mut r = T::zero();
        for k in 0..m {
            r += wt[k] * row[st + k];
        }
        acc += wx[i] * r;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_kernels_interpolate_smooth_data() {
        let g = Grid::<f64>::new(64).unwrap();
        let nodes = g.nodes();
        let values: Vec<f64> = nodes.iter().flat_map(|&x| nodes.iter().map(move |&t| (x - t).cos())).collect();
        let k = KernelSpec::table("m11", g, values).unwrap();
        assert!((k.eval(1.0, 0.3).unwrap() - 0.7_f64.cos()).abs() < 1e-6);
        assert!(matches!(KernelSpec::table("m11", g, vec![0.0; 3]), Err(ModelError::TableShape { .. })));
    }

    #[test]
    fn sampled_functions_resample() {
        let g = Grid::<f64>::new(200).unwrap();
        let f = FunctionSpec::Samples(SampledFunction::from_fn(g, f64::sin).unwrap());
        let s = f.sample(&Grid::new(77).unwrap()).unwrap();
        assert!(s.sup_diff_on(f64::sin, 0.0, 4.0) < 1e-7);
        assert!(FunctionSpec::<f64>::zero().is_zero());
        assert!(!FunctionSpec::<f64>::parse("x").unwrap().is_zero());
    }
}
