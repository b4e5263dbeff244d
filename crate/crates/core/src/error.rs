use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the operator calculus.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpError {
    #[error("element is not normal (commutator norm {residual:.3e} exceeds {tol:.3e})")]
    NotNormal { residual: f64, tol: f64 },

    #[error("function `{function}` is undefined at spectral point {point}")]
    FunctionUndefinedAtSpectrum { function: String, point: Complex64 },

    #[error("descriptor mismatch: {0}")]
    DescriptorMismatch(String),

    #[error("density element does not define a positive functional")]
    NotPositiveFunctional,

    #[error("operator is unbounded: no everywhere-defined representative")]
    UnboundedOperator,

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("operator is not invertible")]
    NotInvertible,

    #[error("set is not compatible with the operator: {0}")]
    NotCompatible(String),

    #[error("operator is not positive")]
    NotPositive,

    #[error("operator is not strictly positive")]
    NotStrictlyPositive,

    #[error("{point} lies in the spectrum")]
    SpectrumHit { point: Complex64 },

    #[error("operators do not commute (residual {residual:.3e})")]
    NotCommuting { residual: f64 },

    #[error("U does not intertwine S and T (residual {residual:.3e} exceeds {tol:.3e})")]
    IntertwiningViolated { residual: f64, tol: f64 },

    #[error("symbol is not in C0(N)")]
    NotInC0,

    #[error("set membership is undecidable at {point}")]
    UndecidableMembership { point: Complex64 },

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl OpError {
    /// Stable identifier for the error kind, used in reports and exit messages.
    pub fn kind(&self) -> &'static str {
        match self {
            OpError::NotNormal { .. } => "NotNormal",
            OpError::FunctionUndefinedAtSpectrum { .. } => "FunctionUndefinedAtSpectrum",
            OpError::DescriptorMismatch(_) => "DescriptorMismatch",
            OpError::NotPositiveFunctional => "NotPositiveFunctional",
            OpError::UnboundedOperator => "UnboundedOperator",
            OpError::DomainViolation(_) => "DomainViolation",
            OpError::NotInvertible => "NotInvertible",
            OpError::NotCompatible(_) => "NotCompatible",
            OpError::NotPositive => "NotPositive",
            OpError::NotStrictlyPositive => "NotStrictlyPositive",
            OpError::SpectrumHit { .. } => "SpectrumHit",
            OpError::NotCommuting { .. } => "NotCommuting",
            OpError::IntertwiningViolated { .. } => "IntertwiningViolated",
            OpError::NotInC0 => "NotInC0",
            OpError::UndecidableMembership { .. } => "UndecidableMembership",
            OpError::InvalidSymbol(_) => "InvalidSymbol",
            OpError::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, OpError>;
