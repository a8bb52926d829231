//! A small expression language for the coefficient functions of a problem.
//!
//! Grammar, loosest to tightest: `+ -`, `* /`, unary `-`, `^` (right
//! associative). Identifiers are `x`, `t`, `pi` and the functions `sin`,
//! `cos`, `exp`, `sqrt`, `abs`.

mod display;
mod parser;

use crate::numerics::{Grid, SampledFunction};
use crate::Real;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arity {
    /// A function of `x` only.
    Univariate,
    /// A function of `(x, t)`.
    Bivariate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(Var),
    Pi,
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression together with its declared arity.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprAst {
    root: Node,
    arity: Arity,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("variable `t` at offset {offset} is not allowed in a function of x alone")]
    Arity { offset: usize },
    #[error("a value for t is required by a function of (x, t)")]
    MissingT,
    #[error("a function of x alone does not take t")]
    UnexpectedT,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("at grid index {index} (x = {x}): {source}")]
    AtGridPoint {
        index: usize,
        x: f64,
        #[source]
        source: Box<ExprError>,
    },
}

/// Parse `source` as an expression of the given arity.
pub fn parse(source: &str, arity: Arity) -> Result<ExprAst, ExprError> {
    let root = parser::Parser::new(source, arity).parse()?;
    Ok(ExprAst { root, arity })
}

impl ExprAst {
    pub fn from_node(root: Node, arity: Arity) -> Result<Self, ExprError> {
        if arity == Arity::Univariate && root.mentions_t() {
            return Err(ExprError::Arity { offset: 0 });
        }
        Ok(Self { root, arity })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    /// True if the expression is the literal `0` (possibly negated or parenthesised).
    pub fn is_literal_zero(&self) -> bool {
        fn zero(n: &Node) -> bool {
            match n {
                Node::Const(c) => *c == 0.0,
                Node::Neg(a) => zero(a),
                _ => false,
            }
        }
        zero(&self.root)
    }

    pub fn evaluate<T: Real>(&self, x: T, t: Option<T>) -> Result<T, ExprError> {
        let t = match (self.arity, t) {
            (Arity::Univariate, None) => T::zero(),
            (Arity::Univariate, Some(_)) => return Err(ExprError::UnexpectedT),
            (Arity::Bivariate, Some(t)) => t,
            (Arity::Bivariate, None) => return Err(ExprError::MissingT),
        };
        eval(&self.root, x, t)
    }

    /// Evaluate on every node of `grid`; for bivariate expressions `t_slice` fixes `t`.
    pub fn sample<T: Real>(&self, grid: &Grid<T>, t_slice: Option<T>) -> Result<SampledFunction<T>, ExprError> {
        let values = grid
            .nodes()
            .into_iter()
            .enumerate()
            .map(|(index, x)| {
                self.evaluate(x, t_slice)
                    .map_err(|e| ExprError::AtGridPoint { index, x: x.to_f64_lossy(), source: Box::new(e) })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SampledFunction::new(*grid, values).expect("evaluation yields finite values"))
    }
}

/// Free-function form of [`ExprAst::evaluate`].
pub fn evaluate<T: Real>(expr: &ExprAst, x: T, t: Option<T>) -> Result<T, ExprError> {
    expr.evaluate(x, t)
}

/// Free-function form of [`ExprAst::sample`].
pub fn sample<T: Real>(expr: &ExprAst, grid: &Grid<T>, t_slice: Option<T>) -> Result<SampledFunction<T>, ExprError> {
    expr.sample(grid, t_slice)
}

impl Node {
    fn mentions_t(&self) -> bool {
        match self {
            Node::Var(Var::T) => true,
            Node::Const(_) | Node::Var(Var::X) | Node::Pi => false,
            Node::Neg(a) | Node::Call(_, a) => a.mentions_t(),
            Node::Binary(_, a, b) => a.mentions_t() || b.mentions_t(),
        }
    }
}

fn finite<T: Real>(v: T, what: impl FnOnce() -> String) -> Result<T, ExprError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ExprError::Domain(what()))
    }
}

fn eval<T: Real>(node: &Node, x: T, t: T) -> Result<T, ExprError> {
    match node {
        Node::Const(c) => Ok(T::lit(*c)),
        Node::Var(Var::X) => Ok(x),
        Node::Var(Var::T) => Ok(t),
        Node::Pi => Ok(T::PI()),
        Node::Neg(a) => Ok(-eval(a, x, t)?),
        Node::Call(f, a) => {
            let a = eval(a, x, t)?;
            let v = match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Abs => a.abs(),
                Func::Sqrt => {
                    if a < T::zero() {
                        return Err(ExprError::Domain(format!("sqrt of negative value {a}")));
                    }
                    a.sqrt()
                }
            };
            finite(v, || format!("{}({a}) is not finite", f.name()))
        }
        Node::Binary(op, a, b) => {
            let a = eval(a, x, t)?;
            let b = eval(b, x, t)?;
            let v = match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => {
                    if a < T::zero() && b.fract() != T::zero() {
                        return Err(ExprError::Domain(format!("negative base {a} with non-integer exponent {b}")));
                    }
                    a.powf(b)
                }
            };
            finite(v, || format!("{a} {} {b} is not finite", display::op_symbol(*op)))
        }
    }
}
