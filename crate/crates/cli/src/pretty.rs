//! Source form of a parsed program; `parse(pretty(p)) == p`.

use std::fmt::Write;

use num_complex::Complex64;

use crate::ast::{Arg, Expr, ExprKind, FnName, Program, SetExpr, StmtKind};

pub fn pretty_program(p: &Program) -> String {
    let mut out = String::new();
    for s in &p.statements {
        match &s.kind {
            StmtKind::Let { name, expr } => writeln!(out, "let {name} = {};", pretty_expr(expr)),
            StmtKind::Check {
                label,
                lhs,
                rhs,
                tol,
            } => {
                write!(
                    out,
                    "check {} {} ~ {}",
                    quote(label),
                    pretty_expr(lhs),
                    pretty_expr(rhs)
                )
                .unwrap();
                if let Some(t) = tol {
                    write!(out, " tol {t}").unwrap();
                }
                writeln!(out, ";")
            }
            StmtKind::Print(e) => writeln!(out, "print {};", pretty_expr(e)),
        }
        .unwrap();
    }
    out
}

pub fn pretty_expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Scalar(c) => scalar(*c),
        ExprKind::Var(name) => name.clone(),
        ExprKind::Mat(rows) => {
            let rows: Vec<String> = rows.iter().map(|r| format!("[{}]", list(r))).collect();
            format!("mat([{}])", rows.join(", "))
        }
        ExprKind::Sym { num, den } => format!("sym({}; {})", list(num), list(den)),
        ExprKind::Call { func, args } => {
            let args: Vec<String> = args
                .iter()
                .map(|a| match a {
                    Arg::Expr(e) => pretty_expr(e),
                    Arg::Fn(f, _) => fname(f),
                    Arg::Set(s, _) => set(s),
                })
                .collect();
            format!("{}({})", func.name(), args.join(", "))
        }
    }
}

pub fn fname(f: &FnName) -> String {
    match f {
        FnName::Named(n) => n.clone(),
        FnName::Param(n, x) => format!("{n}({x})"),
        FnName::Tensor(a, b) => format!("{}*{}", fname(a), fname(b)),
    }
}

fn set(s: &SetExpr) -> String {
    match s {
        SetExpr::Punctured(points) => format!("punctured({})", list(points)),
        other => other.keyword().to_string(),
    }
}

fn list(v: &[Complex64]) -> String {
    v.iter().map(|c| scalar(*c)).collect::<Vec<_>>().join(", ")
}

/// Shortest round-tripping decimal form, e.g. `1`, `-2.5i`, `1-0.5i`.
pub fn scalar(c: Complex64) -> String {
    match (c.re == 0.0, c.im == 0.0) {
        (_, true) => format!("{}", c.re + 0.0),
        (true, false) => format!("{}i", c.im),
        (false, false) if c.im < 0.0 => format!("{}-{}i", c.re, -c.im),
        (false, false) => format!("{}+{}i", c.re, c.im),
    }
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
