//! Type checking and evaluation of programs.

use std::collections::HashMap;

use num_complex::Complex64;
use opmod_core::calculus::{
    apply_function, exp_op, ln_op, power_complex, power_real, resolvent, spectrum,
};
use opmod_core::commuting::{dot_product, dot_sum, fuglede_putnam_check, joint_calculus};
use opmod_core::linalg::CMat;
use opmod_core::tensor::tensor_op;
use opmod_core::{
    z_from_bounded, AdjointableOp, CommutingPair, CompatibleSet, JointFn, OpError, RationalSymbol,
    RegularOp, ScalarFn, SpectrumSet, DEFAULT_TOL,
};

use crate::ast::{Arg, Builtin, Expr, ExprKind, FnName, Program, SetExpr, StmtKind};
use crate::error::{CliError, Span};
use crate::json::{self, Json};
use crate::parser::parse_program;
use crate::pretty;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ty {
    Scalar,
    Operator,
    Symbol,
    Spectrum,
}

impl Ty {
    pub fn name(self) -> &'static str {
        match self {
            Ty::Scalar => "scalar",
            Ty::Operator => "operator",
            Ty::Symbol => "symbol",
            Ty::Spectrum => "spectrum",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Scalar(Complex64),
    Op(RegularOp),
    Sym(RationalSymbol),
    Spectrum(SpectrumSet),
}

impl Value {
    pub fn to_json(&self) -> Result<Json, OpError> {
        Ok(match self {
            Value::Scalar(c) => json::complex(*c, c.norm()),
            Value::Op(r) => {
                let t = r.to_bounded()?;
                let scale = t.norm();
                Json::obj([(
                    "blocks",
                    Json::Arr(t.blocks().iter().map(|b| json::matrix(b, scale)).collect()),
                )])
            }
            Value::Sym(f) => {
                let coeffs = |p: &opmod_core::unbounded::Poly| {
                    let cs: Vec<Complex64> = p.coeffs().iter().map(|c| c.to_complex()).collect();
                    let scale = cs.iter().map(|c| c.norm()).fold(0.0, f64::max);
                    Json::Arr(cs.iter().map(|c| json::complex(*c, scale)).collect())
                };
                Json::obj([
                    ("num", coeffs(f.numerator())),
                    ("den", coeffs(f.denominator())),
                ])
            }
            Value::Spectrum(s) => json::sorted_points(&s.values()),
        })
    }
}

/// Scalar function named in the registry.
pub fn resolve_fn(f: &FnName) -> Option<ScalarFn> {
    match f {
        FnName::Named(n) => ScalarFn::from_registry(n),
        FnName::Param(n, s) if n == "powk" => Some(ScalarFn::powk(*s)),
        _ => None,
    }
}

/// Joint function: `add mul fst snd`, or `f*g` for registry functions `f, g`.
pub fn resolve_joint(f: &FnName) -> Option<JointFn> {
    match f {
        FnName::Named(n) => JointFn::from_registry(n),
        FnName::Tensor(a, b) => Some(JointFn::tensor(&resolve_fn(a)?, &resolve_fn(b)?)),
        FnName::Param(..) => None,
    }
}

fn set_of(s: &SetExpr) -> Result<CompatibleSet, OpError> {
    Ok(match s {
        SetExpr::Plane => CompatibleSet::plane(),
        SetExpr::Reals => CompatibleSet::real_line(),
        SetExpr::Nonneg => CompatibleSet::nonnegative_reals(),
        SetExpr::Posreals => CompatibleSet::positive_reals(),
        SetExpr::Punctured(points) => CompatibleSet::punctured(points.clone())?,
    })
}

/// Checks that every identifier is bound before use and that every call
/// receives arguments of the types it accepts.
pub fn type_check(p: &Program) -> Result<(), CliError> {
    let mut env: HashMap<String, Ty> = HashMap::new();
    for s in &p.statements {
        match &s.kind {
            StmtKind::Let { name, expr } => {
                let ty = type_of(expr, &env)?;
                env.insert(name.clone(), ty);
            }
            StmtKind::Check { lhs, rhs, tol, .. } => {
                let (a, b) = (type_of(lhs, &env)?, type_of(rhs, &env)?);
                if a != b {
                    return Err(CliError::type_error(
                        format!("cannot compare {} with {}", a.name(), b.name()),
                        rhs.span,
                    ));
                }
                if tol.is_some_and(|t| !(t >= 0.0)) {
                    return Err(CliError::type_error(
                        "tolerance must be non-negative",
                        s.span,
                    ));
                }
            }
            StmtKind::Print(e) => {
                type_of(e, &env)?;
            }
        }
    }
    Ok(())
}

fn type_of(e: &Expr, env: &HashMap<String, Ty>) -> Result<Ty, CliError> {
    use Ty::*;
    match &e.kind {
        ExprKind::Scalar(_) => Ok(Scalar),
        ExprKind::Var(name) => env
            .get(name)
            .copied()
            .ok_or_else(|| CliError::type_error(format!("`{name}` is not bound"), e.span)),
        ExprKind::Mat(_) => Ok(Operator),
        ExprKind::Sym { .. } => Ok(Symbol),
        ExprKind::Call { func, args } => {
            let mut tys = Vec::new();
            for a in args {
                match a {
                    Arg::Expr(x) => tys.push(type_of(x, env)?),
                    Arg::Fn(f, span) => {
                        let known = if *func == Builtin::Joint {
                            resolve_joint(f).is_some()
                        } else {
                            resolve_fn(f).is_some()
                        };
                        if !known {
                            return Err(CliError::type_error(
                                format!("unknown function `{}`", pretty::fname(f)),
                                *span,
                            ));
                        }
                    }
                    Arg::Set(..) => {}
                }
            }
            let result = match (func, tys.as_slice()) {
                (
                    Builtin::Zt | Builtin::Unzt | Builtin::Exp | Builtin::Log | Builtin::Apply,
                    [Operator],
                ) => Some(Operator),
                (Builtin::Adj | Builtin::Inv, [t @ (Operator | Symbol | Scalar)]) => Some(*t),
                (Builtin::Abs, [t @ (Operator | Scalar)]) => Some(*t),
                (Builtin::Norm, [Operator | Scalar]) => Some(Scalar),
                (Builtin::Spec, [Operator]) => Some(Spectrum),
                (Builtin::Pow | Builtin::Cpow | Builtin::Res, [Operator, Scalar]) => Some(Operator),
                (
                    Builtin::Tensor | Builtin::Dot | Builtin::Dsum | Builtin::Joint,
                    [Operator, Operator],
                ) => Some(Operator),
                (Builtin::Fp, [Operator, Operator, Operator]) => Some(Scalar),
                (Builtin::Mul, [Operator, Operator] | [Scalar, Operator] | [Operator, Scalar]) => {
                    Some(Operator)
                }
                (Builtin::Mul | Builtin::Add | Builtin::Sub, [a, b])
                    if a == b && *a != Spectrum =>
                {
                    Some(*a)
                }
                _ => None,
            };
            result.ok_or_else(|| {
                let got: Vec<&str> = tys.iter().map(|t| t.name()).collect();
                CliError::type_error(
                    format!("`{}` does not accept ({})", func.name(), got.join(", ")),
                    e.span,
                )
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub label: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub span: Span,
}

/// Everything a program run produced, up to the first evaluation error.
#[derive(Debug)]
pub struct SessionResult {
    pub outputs: Vec<(Span, Json)>,
    pub checks: Vec<CheckRecord>,
    pub error: Option<CliError>,
}

impl SessionResult {
    /// A session that stopped before running any statement.
    pub fn failed(error: CliError) -> Self {
        SessionResult {
            outputs: Vec::new(),
            checks: Vec::new(),
            error: Some(error),
        }
    }

    /// 0 all checks pass, 1 some check failed, 2 evaluation error, 3 parse or type error.
    pub fn exit_status(&self) -> i32 {
        match &self.error {
            Some(e) => e.exit_code(),
            None if self.checks.iter().any(|c| !c.passed) => 1,
            None => 0,
        }
    }

    pub fn to_json(&self) -> Json {
        let outputs = self
            .outputs
            .iter()
            .map(|(span, v)| {
                Json::obj([("line", Json::Int(span.line as i64)), ("value", v.clone())])
            })
            .collect();
        let checks = self
            .checks
            .iter()
            .map(|c| {
                Json::obj([
                    ("name", Json::Str(c.label.clone())),
                    ("line", Json::Int(c.span.line as i64)),
                    ("passed", Json::Bool(c.passed)),
                    ("residual", Json::Num(c.residual)),
                    ("tolerance", Json::Num(c.tolerance)),
                ])
            })
            .collect();
        let error = match &self.error {
            None => Json::Null,
            Some(e) => {
                let span = e.span().unwrap_or(Span { line: 0, col: 0 });
                Json::obj([
                    ("kind", Json::Str(e.kind().into())),
                    ("message", Json::Str(e.message())),
                    ("line", Json::Int(span.line as i64)),
                    ("column", Json::Int(span.col as i64)),
                ])
            }
        };
        Json::obj([
            ("outputs", Json::Arr(outputs)),
            ("checks", Json::Arr(checks)),
            ("error", error),
            ("status", Json::Int(self.exit_status() as i64)),
        ])
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SessionConfig {
    /// Default check tolerance and tolerance of the calculus decisions.
    pub tol: f64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig { tol: DEFAULT_TOL }
    }
}

impl SessionConfig {
    /// Reads `OPMOD_TOL`, falling back to the default on absence.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var("OPMOD_TOL") {
            Err(_) => Ok(Self::default()),
            Ok(text) => match text.trim().parse::<f64>() {
                Ok(t) if t > 0.0 && t.is_finite() => Ok(SessionConfig { tol: t }),
                _ => Err(format!("OPMOD_TOL must be a positive number, got `{text}`")),
            },
        }
    }
}

/// Parses, type checks and runs `text`. Parse and type errors are returned
/// as `Err`; evaluation errors end the run and are recorded in the result.
pub fn run_source(text: &str, cfg: SessionConfig) -> Result<SessionResult, CliError> {
    let program = parse_program(text)?;
    type_check(&program)?;
    Ok(eval_session(&program, cfg))
}

/// Evaluates one closed expression, e.g. `spec(mat([[1, 2], [0, 3]]))`.
pub fn eval_expr(text: &str, cfg: SessionConfig) -> Result<Value, CliError> {
    let expr = crate::parser::parse_expr(text)?;
    let span = expr.span;
    let program = Program {
        statements: vec![crate::ast::Stmt {
            kind: StmtKind::Print(expr),
            span,
        }],
    };
    type_check(&program)?;
    let StmtKind::Print(expr) = &program.statements[0].kind else {
        unreachable!()
    };
    let ev = Evaluator {
        env: HashMap::new(),
        tol: cfg.tol,
    };
    ev.eval(expr)
        .map_err(|(source, span)| CliError::Eval { source, span })
}

/// Runs the statements of a type-checked program in order.
pub fn eval_session(p: &Program, cfg: SessionConfig) -> SessionResult {
    let mut ev = Evaluator {
        env: HashMap::new(),
        tol: cfg.tol,
    };
    let mut result = SessionResult {
        outputs: Vec::new(),
        checks: Vec::new(),
        error: None,
    };
    for s in &p.statements {
        let step = (|| -> Result<(), (OpError, Span)> {
            match &s.kind {
                StmtKind::Let { name, expr } => {
                    let v = ev.eval(expr)?;
                    ev.env.insert(name.clone(), v);
                }
                StmtKind::Print(e) => {
                    let v = ev.eval(e)?;
                    result
                        .outputs
                        .push((s.span, v.to_json().map_err(|err| (err, e.span))?));
                }
                StmtKind::Check {
                    label,
                    lhs,
                    rhs,
                    tol,
                } => {
                    let (a, b) = (ev.eval(lhs)?, ev.eval(rhs)?);
                    let residual = distance(&a, &b).map_err(|err| (err, s.span))?;
                    let tolerance = tol.unwrap_or(cfg.tol);
                    result.checks.push(CheckRecord {
                        label: label.clone(),
                        passed: residual <= tolerance,
                        residual,
                        tolerance,
                        span: s.span,
                    });
                }
            }
            Ok(())
        })();
        if let Err((source, span)) = step {
            result.error = Some(CliError::Eval { source, span });
            break;
        }
    }
    result
}

/// Operator-norm distance, modulus, Hausdorff distance, or `0` / `∞` for
/// exactly equal / different symbols.
fn distance(a: &Value, b: &Value) -> Result<f64, OpError> {
    Ok(match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => (x - y).norm(),
        (Value::Op(x), Value::Op(y)) => {
            let (x, y) = (x.to_bounded()?, y.to_bounded()?);
            if x.domain() != y.domain() || x.codomain() != y.codomain() {
                return Err(OpError::DescriptorMismatch(
                    "compared operators act between different modules".into(),
                ));
            }
            x.distance(&y)
        }
        (Value::Sym(f), Value::Sym(g)) => {
            if f.sub(g).is_zero() {
                0.0
            } else {
                f64::INFINITY
            }
        }
        (Value::Spectrum(s), Value::Spectrum(t)) => s.hausdorff(t),
        _ => unreachable!("operand types are checked before evaluation"),
    })
}

struct Evaluator {
    env: HashMap<String, Value>,
    tol: f64,
}

type EvalResult<T> = Result<T, (OpError, Span)>;

impl Evaluator {
    fn eval(&self, e: &Expr) -> EvalResult<Value> {
        let at = |err: OpError| (err, e.span);
        Ok(match &e.kind {
            ExprKind::Scalar(c) => Value::Scalar(*c),
            ExprKind::Var(name) => self.env[name].clone(),
            ExprKind::Mat(rows) => {
                let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
                let m = CMat::from_row_slice(rows.len(), rows[0].len(), &flat);
                Value::Op(z_from_bounded(&AdjointableOp::from_matrix(m).map_err(at)?))
            }
            ExprKind::Sym { num, den } => {
                Value::Sym(RationalSymbol::from_coeffs(num, den).map_err(at)?)
            }
            ExprKind::Call { func, args } => self.call(*func, args).map_err(at)?,
        })
    }

    fn call(&self, func: Builtin, args: &[Arg]) -> Result<Value, OpError> {
        let mut vals = Vec::new();
        let mut fname = None;
        let mut set = None;
        for a in args {
            match a {
                Arg::Expr(x) => vals.push(self.eval(x).map_err(|(err, _)| err)?),
                Arg::Fn(f, _) => fname = Some(f),
                Arg::Set(s, _) => set = Some(s),
            }
        }
        let tol = self.tol;
        let op = |k: usize| match &vals[k] {
            Value::Op(r) => r,
            _ => unreachable!("operand types are checked before evaluation"),
        };
        let scalar = |k: usize| match &vals[k] {
            Value::Scalar(c) => *c,
            _ => unreachable!("operand types are checked before evaluation"),
        };
        let reg = |t: AdjointableOp| Value::Op(z_from_bounded(&t));
        Ok(match func {
            Builtin::Zt => reg(op(0).z().clone()),
            Builtin::Unzt => Value::Op(RegularOp::from_z(op(0).to_bounded()?)?),
            Builtin::Adj => match &vals[0] {
                Value::Op(r) => Value::Op(r.adjoint()),
                Value::Sym(f) => Value::Sym(f.conj()),
                Value::Scalar(c) => Value::Scalar(c.conj()),
                Value::Spectrum(_) => unreachable!(),
            },
            Builtin::Abs => match &vals[0] {
                Value::Op(r) => Value::Op(r.absolute_value()),
                Value::Scalar(c) => Value::Scalar(Complex64::new(c.norm(), 0.0)),
                _ => unreachable!(),
            },
            Builtin::Norm => match &vals[0] {
                Value::Op(r) => Value::Scalar(Complex64::new(r.to_bounded()?.norm(), 0.0)),
                Value::Scalar(c) => Value::Scalar(Complex64::new(c.norm(), 0.0)),
                _ => unreachable!(),
            },
            Builtin::Spec => Value::Spectrum(spectrum(op(0), tol)?),
            Builtin::Apply => {
                let name = fname.expect("apply has a function slot");
                let f = resolve_fn(name).expect("function names are checked before evaluation");
                Value::Op(match set {
                    Some(s) => apply_function(&f, op(0), &set_of(s)?, tol)?,
                    None => apply_default(name, &f, op(0), tol)?,
                })
            }
            Builtin::Pow => {
                let s = scalar(1);
                if s.im != 0.0 {
                    return Err(OpError::InvalidArgument(format!(
                        "pow takes a real exponent, got {s}; use cpow"
                    )));
                }
                Value::Op(power_real(op(0), s.re, tol)?)
            }
            Builtin::Cpow => Value::Op(power_complex(op(0), scalar(1), tol)?),
            Builtin::Exp => Value::Op(exp_op(op(0), tol)?),
            Builtin::Log => Value::Op(ln_op(op(0), tol)?),
            Builtin::Inv => match &vals[0] {
                Value::Op(r) => Value::Op(r.invert()?),
                Value::Sym(f) => Value::Sym(f.inverse().ok_or(OpError::NotInvertible)?),
                Value::Scalar(c) if *c == Complex64::new(0.0, 0.0) => {
                    return Err(OpError::NotInvertible)
                }
                Value::Scalar(c) => Value::Scalar(c.inv()),
                Value::Spectrum(_) => unreachable!(),
            },
            Builtin::Res => reg(resolvent(op(0), scalar(1), tol)?),
            Builtin::Tensor => Value::Op(tensor_op(op(0), op(1))?),
            Builtin::Dot => Value::Op(dot_product(
                &CommutingPair::certified(op(0).clone(), op(1).clone(), tol)?,
                tol,
            )?),
            Builtin::Dsum => Value::Op(dot_sum(
                &CommutingPair::certified(op(0).clone(), op(1).clone(), tol)?,
                tol,
            )?),
            Builtin::Joint => {
                let h = resolve_joint(fname.expect("joint has a function slot"))
                    .expect("checked before evaluation");
                let pair = CommutingPair::certified(op(0).clone(), op(1).clone(), tol)?;
                let plane = CompatibleSet::plane();
                Value::Op(joint_calculus(&h, &pair, &plane, &plane, tol)?)
            }
            Builtin::Fp => {
                let f = resolve_fn(fname.expect("fp has a function slot"))
                    .expect("checked before evaluation");
                let report = fuglede_putnam_check(&op(0).to_bounded()?, op(1), op(2), &[f], tol)?;
                Value::Scalar(Complex64::new(report.max_residual(), 0.0))
            }
            Builtin::Mul => match (&vals[0], &vals[1]) {
                (Value::Op(a), Value::Op(b)) => reg(a.to_bounded()?.compose(&b.to_bounded()?)?),
                (Value::Scalar(c), Value::Op(a)) | (Value::Op(a), Value::Scalar(c)) => {
                    reg(a.to_bounded()?.scale(*c))
                }
                (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a * b),
                (Value::Sym(f), Value::Sym(g)) => Value::Sym(f.mul(g)),
                _ => unreachable!(),
            },
            Builtin::Add | Builtin::Sub => {
                let sign = if func == Builtin::Add { 1.0 } else { -1.0 };
                match (&vals[0], &vals[1]) {
                    (Value::Op(a), Value::Op(b)) => reg(a
                        .to_bounded()?
                        .try_add(&b.to_bounded()?.scale(Complex64::new(sign, 0.0)))?),
                    (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a + b * sign),
                    (Value::Sym(f), Value::Sym(g)) => {
                        Value::Sym(if sign > 0.0 { f.add(g) } else { f.sub(g) })
                    }
                    _ => unreachable!(),
                }
            }
        })
    }
}

/// Without an explicit set, `apply` uses the natural domain of the function:
/// the power calculus for `sqrt` and `powk`, the logarithm of strictly
/// positive operators for `log`, `C \ {0}` for `recip`, and `C` otherwise.
fn apply_default(
    name: &FnName,
    f: &ScalarFn,
    r: &RegularOp,
    tol: f64,
) -> Result<RegularOp, OpError> {
    match name {
        FnName::Named(n) if n == "log" => ln_op(r, tol),
        FnName::Named(n) if n == "sqrt" => power_real(r, 0.5, tol),
        FnName::Param(_, s) if *s >= 0.0 => power_real(r, *s, tol),
        FnName::Param(..) => apply_function(f, r, &CompatibleSet::positive_reals(), tol),
        FnName::Named(n) if n == "recip" => apply_function(
            f,
            r,
            &CompatibleSet::punctured(vec![Complex64::new(0.0, 0.0)])?,
            tol,
        ),
        _ => apply_function(f, r, &CompatibleSet::plane(), tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> SessionResult {
        run_source(text, SessionConfig::default()).unwrap()
    }

    #[test]
    fn spectrum_of_a_diagonal_matrix() {
        let r = run("print spec(mat([[2,0],[0,1]]));");
        let parsed: Vec<[f64; 2]> = serde_json::from_str(&r.outputs[0].1.render()).unwrap();
        assert_eq!(parsed, vec![[1.0, 0.0], [2.0, 0.0]]);
        assert_eq!(r.exit_status(), 0);
    }

    #[test]
    fn z_transform_of_a_scalar() {
        let r = run("print zt(mat([[1]]));");
        let parsed: serde_json::Value = serde_json::from_str(&r.outputs[0].1.render()).unwrap();
        let re = parsed["blocks"][0][0][0][0].as_f64().unwrap();
        assert!((re - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn failing_check_sets_status_one() {
        let r = run("let t = mat([[1,0],[0,2]]); check \"wrong\" t ~ adj(mat([[1,1],[0,2]]));");
        assert_eq!(r.checks.len(), 1);
        assert!(!r.checks[0].passed);
        assert_eq!(r.exit_status(), 1);
    }

    #[test]
    fn logarithm_of_zero_is_an_evaluation_error() {
        let r = run("print apply(log, mat([[0]]));");
        assert_eq!(r.exit_status(), 2);
        assert_eq!(r.error.as_ref().unwrap().kind(), "NotStrictlyPositive");
    }

    #[test]
    fn type_errors() {
        let cfg = SessionConfig::default();
        let err = run_source("print spec(x);", cfg).unwrap_err();
        assert_eq!((err.kind(), err.exit_code()), ("TypeError", 3));
        assert!(run_source("print tensor(1, mat([[1]]));", cfg).is_err());
        assert!(run_source("check \"x\" 1 ~ mat([[1]]);", cfg).is_err());
        assert!(run_source("print apply(cosh, mat([[1]]));", cfg).is_err());
        assert!(run_source("print joint(exp, mat([[1]]), mat([[1]]));", cfg).is_err());
        assert!(run_source("print joint(exp*sq, mat([[1]]), mat([[1]]));", cfg).is_ok());
    }

    #[test]
    fn symbols() {
        let r = run(
            "let f = sym(1; 1, 1); check \"inverse\" mul(f, inv(f)) ~ sym(1; 1); print inv(f);",
        );
        assert_eq!(r.exit_status(), 0);
        assert_eq!(r.outputs[0].1.render(), "{\"num\":[[1.0000000000000000e0,0.0000000000000000e0],[1.0000000000000000e0,0.0000000000000000e0]],\"den\":[[1.0000000000000000e0,0.0000000000000000e0]]}");
        let r = run("print inv(sym(0, 1; 1));");
        assert_eq!(r.error.unwrap().kind(), "NotInvertible");
    }
}
