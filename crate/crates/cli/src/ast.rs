//! Syntax tree of the expression language.

use num_complex::Complex64;

use crate::error::Span;

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub statements: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Let {
        name: String,
        expr: Expr,
    },
    Check {
        label: String,
        lhs: Expr,
        rhs: Expr,
        tol: Option<f64>,
    },
    Print(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Scalar(Complex64),
    Var(String),
    /// `mat([[..], ..])`, row-major.
    Mat(Vec<Vec<Complex64>>),
    /// `sym(num; den)`, coefficients in ascending powers of `n`.
    Sym {
        num: Vec<Complex64>,
        den: Vec<Complex64>,
    },
    Call {
        func: Builtin,
        args: Vec<Arg>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Arg {
    Expr(Expr),
    Fn(FnName, Span),
    Set(SetExpr, Span),
}

/// Scalar function reference: a registry name, `powk(s)`, or `f*g` for the
/// joint function `(s, t) ↦ f(s) g(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FnName {
    Named(String),
    Param(String, f64),
    Tensor(Box<FnName>, Box<FnName>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetExpr {
    Plane,
    Reals,
    Nonneg,
    Posreals,
    Punctured(Vec<Complex64>),
}

impl SetExpr {
    pub fn keyword(&self) -> &'static str {
        match self {
            SetExpr::Plane => "plane",
            SetExpr::Reals => "reals",
            SetExpr::Nonneg => "nonneg",
            SetExpr::Posreals => "posreals",
            SetExpr::Punctured(_) => "punctured",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Zt,
    Unzt,
    Adj,
    Abs,
    Spec,
    Apply,
    Pow,
    Cpow,
    Exp,
    Log,
    Inv,
    Res,
    Tensor,
    Dot,
    Dsum,
    Joint,
    Fp,
    Mul,
    Add,
    Sub,
    Norm,
}

/// Kind of argument a builtin expects in each position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Expr,
    Fn,
    /// Optional trailing compatible set.
    Set,
}

impl Builtin {
    pub const ALL: [Builtin; 21] = [
        Builtin::Zt,
        Builtin::Unzt,
        Builtin::Adj,
        Builtin::Abs,
        Builtin::Spec,
        Builtin::Apply,
        Builtin::Pow,
        Builtin::Cpow,
        Builtin::Exp,
        Builtin::Log,
        Builtin::Inv,
        Builtin::Res,
        Builtin::Tensor,
        Builtin::Dot,
        Builtin::Dsum,
        Builtin::Joint,
        Builtin::Fp,
        Builtin::Mul,
        Builtin::Add,
        Builtin::Sub,
        Builtin::Norm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Zt => "zt",
            Builtin::Unzt => "unzt",
            Builtin::Adj => "adj",
            Builtin::Abs => "abs",
            Builtin::Spec => "spec",
            Builtin::Apply => "apply",
            Builtin::Pow => "pow",
            Builtin::Cpow => "cpow",
            Builtin::Exp => "exp",
            Builtin::Log => "log",
            Builtin::Inv => "inv",
            Builtin::Res => "res",
            Builtin::Tensor => "tensor",
            Builtin::Dot => "dot",
            Builtin::Dsum => "dsum",
            Builtin::Joint => "joint",
            Builtin::Fp => "fp",
            Builtin::Mul => "mul",
            Builtin::Add => "add",
            Builtin::Sub => "sub",
            Builtin::Norm => "norm",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn slots(self) -> &'static [Slot] {
        use Slot::*;
        match self {
            Builtin::Zt
            | Builtin::Unzt
            | Builtin::Adj
            | Builtin::Abs
            | Builtin::Spec
            | Builtin::Exp
            | Builtin::Log
            | Builtin::Inv
            | Builtin::Norm => &[Expr],
            Builtin::Apply => &[Fn, Expr, Set],
            Builtin::Pow
            | Builtin::Cpow
            | Builtin::Res
            | Builtin::Tensor
            | Builtin::Dot
            | Builtin::Dsum
            | Builtin::Mul
            | Builtin::Add
            | Builtin::Sub => &[Expr, Expr],
            Builtin::Joint => &[Fn, Expr, Expr],
            Builtin::Fp => &[Expr, Expr, Expr, Fn],
        }
    }
}
