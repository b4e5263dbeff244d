//! Recursive-descent parser.
//!
//! ```text
//! program := stmt*
//! stmt    := "let" IDENT "=" expr ";"
//!          | "check" STRING expr "~" expr ["tol" NUMBER] ";"
//!          | "print" expr ";"
//! expr    := scalar | IDENT | "mat" "(" matrix ")" | "sym" "(" list ";" list ")"
//!          | BUILTIN "(" arg ("," arg)* ")"
//! scalar  := ["-"] NUMBER [("+" | "-") IMAG] | ["-"] IMAG
//! fname   := IDENT ["(" ["-"] NUMBER ")"] ["*" fname]
//! set     := "plane" | "reals" | "nonneg" | "posreals" | "punctured" "(" list ")"
//! ```

use num_complex::Complex64;

use crate::ast::{Arg, Builtin, Expr, ExprKind, FnName, Program, SetExpr, Slot, Stmt, StmtKind};
use crate::error::{CliError, Span};
use crate::lexer::{tokenize, Tok, Token};

pub fn parse_program(text: &str) -> Result<Program, CliError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let mut statements = Vec::new();
    while p.peek() != &Tok::Eof {
        statements.push(p.stmt()?);
    }
    Ok(Program { statements })
}

/// A single expression followed by end of input.
pub fn parse_expr(text: &str) -> Result<Expr, CliError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    p.expect(&Tok::Eof)?;
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, what: &str) -> CliError {
        CliError::syntax(
            format!("expected {what}, found {}", self.peek().describe()),
            self.span(),
        )
    }

    fn expect(&mut self, tok: &Tok) -> Result<Span, CliError> {
        if self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<(String, Span), CliError> {
        match self.peek().clone() {
            Tok::Ident(name) => Ok((name, self.bump().span)),
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn stmt(&mut self) -> Result<Stmt, CliError> {
        let span = self.span();
        let kind = match self.peek() {
            Tok::Let => {
                self.bump();
                let (name, _) = self.ident()?;
                if Builtin::from_name(&name).is_some() || name == "mat" || name == "sym" {
                    return Err(CliError::syntax(
                        format!("`{name}` is a builtin and cannot be rebound"),
                        span,
                    ));
                }
                self.expect(&Tok::Eq)?;
                let expr = self.expr()?;
                StmtKind::Let { name, expr }
            }
            Tok::Check => {
                self.bump();
                let label = match self.peek().clone() {
                    Tok::Str(s) => {
                        self.bump();
                        s
                    }
                    _ => return Err(self.unexpected("check label string")),
                };
                let lhs = self.expr()?;
                self.expect(&Tok::Tilde)?;
                let rhs = self.expr()?;
                let tol = if self.peek() == &Tok::Ident("tol".into()) {
                    self.bump();
                    match *self.peek() {
                        Tok::Num(x) => {
                            self.bump();
                            Some(x)
                        }
                        _ => return Err(self.unexpected("tolerance")),
                    }
                } else {
                    None
                };
                StmtKind::Check {
                    label,
                    lhs,
                    rhs,
                    tol,
                }
            }
            Tok::Print => {
                self.bump();
                StmtKind::Print(self.expr()?)
            }
            _ => return Err(self.unexpected("`let`, `check` or `print`")),
        };
        self.expect(&Tok::Semi)?;
        Ok(Stmt { kind, span })
    }

    fn expr(&mut self) -> Result<Expr, CliError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Num(_) | Tok::Imag(_) | Tok::Minus => Ok(Expr {
                kind: ExprKind::Scalar(self.scalar()?),
                span,
            }),
            Tok::Ident(name) => {
                self.bump();
                if self.peek() != &Tok::LParen {
                    return Ok(Expr {
                        kind: ExprKind::Var(name),
                        span,
                    });
                }
                self.bump();
                let kind = match name.as_str() {
                    "mat" => ExprKind::Mat(self.matrix()?),
                    "sym" => {
                        let num = self.list()?;
                        self.expect(&Tok::Semi)?;
                        let den = self.list()?;
                        ExprKind::Sym { num, den }
                    }
                    _ => {
                        let func = Builtin::from_name(&name).ok_or_else(|| {
                            CliError::syntax(format!("unknown function `{name}`"), span)
                        })?;
                        ExprKind::Call {
                            func,
                            args: self.args(func)?,
                        }
                    }
                };
                self.expect(&Tok::RParen)?;
                Ok(Expr { kind, span })
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    fn args(&mut self, func: Builtin) -> Result<Vec<Arg>, CliError> {
        let mut args = Vec::new();
        for (k, slot) in func.slots().iter().enumerate() {
            if k > 0 {
                if *slot == Slot::Set && self.peek() == &Tok::RParen {
                    break;
                }
                self.expect(&Tok::Comma)?;
            }
            let span = self.span();
            args.push(match slot {
                Slot::Expr => Arg::Expr(self.expr()?),
                Slot::Fn => Arg::Fn(self.fname()?, span),
                Slot::Set => Arg::Set(self.set()?, span),
            });
        }
        Ok(args)
    }

    fn fname(&mut self) -> Result<FnName, CliError> {
        let (name, _) = self.ident()?;
        let mut f = if self.peek() == &Tok::LParen {
            self.bump();
            let negative = self.peek() == &Tok::Minus;
            if negative {
                self.bump();
            }
            let x = match *self.peek() {
                Tok::Num(x) => {
                    self.bump();
                    x
                }
                _ => return Err(self.unexpected("function parameter")),
            };
            self.expect(&Tok::RParen)?;
            FnName::Param(name, if negative { -x } else { x })
        } else {
            FnName::Named(name)
        };
        if self.peek() == &Tok::Star {
            self.bump();
            f = FnName::Tensor(Box::new(f), Box::new(self.fname()?));
        }
        Ok(f)
    }

    fn set(&mut self) -> Result<SetExpr, CliError> {
        let span = self.span();
        let (name, _) = self.ident()?;
        Ok(match name.as_str() {
            "plane" => SetExpr::Plane,
            "reals" => SetExpr::Reals,
            "nonneg" => SetExpr::Nonneg,
            "posreals" => SetExpr::Posreals,
            "punctured" => {
                self.expect(&Tok::LParen)?;
                let points = self.list()?;
                self.expect(&Tok::RParen)?;
                SetExpr::Punctured(points)
            }
            _ => return Err(CliError::syntax(format!("unknown set `{name}`"), span)),
        })
    }

    fn scalar(&mut self) -> Result<Complex64, CliError> {
        let sign = if self.peek() == &Tok::Minus {
            self.bump();
            -1.0
        } else {
            1.0
        };
        match *self.peek() {
            Tok::Imag(y) => {
                self.bump();
                Ok(Complex64::new(0.0, sign * y))
            }
            Tok::Num(x) => {
                self.bump();
                let im_sign = match (self.peek(), self.peek_at(1)) {
                    (Tok::Plus, Tok::Imag(_)) => 1.0,
                    (Tok::Minus, Tok::Imag(_)) => -1.0,
                    _ => return Ok(Complex64::new(sign * x, 0.0)),
                };
                self.bump();
                let Tok::Imag(y) = self.bump().tok else {
                    unreachable!()
                };
                Ok(Complex64::new(sign * x, im_sign * y))
            }
            _ => Err(self.unexpected("number")),
        }
    }

    /// Comma-separated scalars, at least one.
    fn list(&mut self) -> Result<Vec<Complex64>, CliError> {
        let mut out = vec![self.scalar()?];
        while self.peek() == &Tok::Comma {
            self.bump();
            out.push(self.scalar()?);
        }
        Ok(out)
    }

    fn matrix(&mut self) -> Result<Vec<Vec<Complex64>>, CliError> {
        self.expect(&Tok::LBracket)?;
        let mut rows = Vec::new();
        loop {
            let span = self.span();
            self.expect(&Tok::LBracket)?;
            let row = self.list()?;
            self.expect(&Tok::RBracket)?;
            if let Some(first) = rows.first() {
                let first: &Vec<Complex64> = first;
                if first.len() != row.len() {
                    return Err(CliError::syntax(
                        format!("row has {} entries, expected {}", row.len(), first.len()),
                        span,
                    ));
                }
            }
            rows.push(row);
            if self.peek() != &Tok::Comma {
                break;
            }
            self.bump();
        }
        self.expect(&Tok::RBracket)?;
        Ok(rows)
    }
}
