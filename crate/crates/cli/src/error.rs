use std::fmt;

use opmod_core::OpError;
use thiserror::Error;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{span}: syntax error: {message}")]
    Syntax { message: String, span: Span },

    #[error("{span}: type error: {message}")]
    Type { message: String, span: Span },

    #[error("{span}: {source}")]
    Eval { source: OpError, span: Span },

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn syntax(message: impl Into<String>, span: Span) -> Self {
        CliError::Syntax {
            message: message.into(),
            span,
        }
    }

    pub fn type_error(message: impl Into<String>, span: Span) -> Self {
        CliError::Type {
            message: message.into(),
            span,
        }
    }

    pub fn span(&self) -> Option<Span> {
        match self {
            CliError::Syntax { span, .. }
            | CliError::Type { span, .. }
            | CliError::Eval { span, .. } => Some(*span),
            _ => None,
        }
    }

    /// Process exit status: 3 for programs that do not parse or type check,
    /// 2 for everything that fails while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Syntax { .. } | CliError::Type { .. } => 3,
            _ => 2,
        }
    }

    /// The description without its source position.
    pub fn message(&self) -> String {
        match self {
            CliError::Syntax { message, .. } | CliError::Type { message, .. } => message.clone(),
            CliError::Eval { source, .. } => source.to_string(),
            other => other.to_string(),
        }
    }

    /// Stable identifier used in JSON output.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Syntax { .. } => "SyntaxError",
            CliError::Type { .. } => "TypeError",
            CliError::Eval { source, .. } => source.kind(),
            CliError::UnknownSuite(_) => "UnknownSuite",
            CliError::Io { .. } => "IoError",
        }
    }
}
