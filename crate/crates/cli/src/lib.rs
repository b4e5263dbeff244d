//! Expression language, session evaluator and verification-suite runner for
//! the operator calculus in `opmod-core`.

pub mod ast;
pub mod error;
pub mod eval;
pub mod json;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod verify;

pub use error::{CliError, Span};
pub use eval::{eval_expr, run_source, SessionConfig, SessionResult, Value};
pub use parser::{parse_expr, parse_program};
pub use verify::{run_verification_suite, VerificationReport};
