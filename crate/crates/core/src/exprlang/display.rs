use super::{BinOp, ExprAst, Node, Var};
use std::fmt;

pub(super) fn op_symbol(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Div => "/",
        BinOp::Pow => "^",
    }
}

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn precedence(n: &Node) -> u8 {
    match n {
        Node::Binary(BinOp::Add | BinOp::Sub, ..) => SUM,
        Node::Binary(BinOp::Mul | BinOp::Div, ..) => PRODUCT,
        Node::Neg(_) => UNARY,
        Node::Binary(BinOp::Pow, ..) => POWER,
        Node::Const(_) | Node::Var(_) | Node::Pi | Node::Call(..) => ATOM,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, n: &Node, min: u8) -> fmt::Result {
    if precedence(n) < min {
        write!(f, "(")?;
        write_node(f, n)?;
        write!(f, ")")
    } else {
        write_node(f, n)
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, n: &Node) -> fmt::Result {
    match n {
        // `{}` on f64 prints the shortest representation that reparses exactly.
        Node::Const(c) => write!(f, "{c}"),
        Node::Var(Var::X) => write!(f, "x"),
        Node::Var(Var::T) => write!(f, "t"),
        Node::Pi => write!(f, "pi"),
        Node::Neg(a) => {
            write!(f, "-")?;
            write_at(f, a, UNARY)
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(f, a)?;
            write!(f, ")")
        }
        Node::Binary(op, a, b) => {
            let (lmin, rmin) = match op {
                BinOp::Add | BinOp::Sub => (SUM, SUM + 1),
                BinOp::Mul | BinOp::Div => (PRODUCT, PRODUCT + 1),
                BinOp::Pow => (ATOM, UNARY),
            };
            write_at(f, a, lmin)?;
            match op {
                BinOp::Add | BinOp::Sub => write!(f, " {} ", op_symbol(*op))?,
                _ => write!(f, "{}", op_symbol(*op))?,
            }
            write_at(f, b, rmin)
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, self)
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, self.root())
    }
}
