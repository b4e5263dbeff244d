//! Multiplication operators by rational sequences on `c₀(ℕ)`.
//!
//! Here unboundedness is genuine: `f(n) = n` has no bounded representative,
//! and questions about domains, invertibility and compatibility reduce to
//! exact degree arithmetic and integer root screening.

mod poly;
mod symbol;
mod window;

pub use poly::{ComplexRational, Poly};
pub use symbol::{compatible_symbol, symbol_arith, RationalSymbol, SymbolOp};
pub use window::{
    decay_slope, inverse_power, measured_growth, oracle_compare, truncation_errors, truncation_net,
    window_has_zero, window_sup, window_values, DomainProbe, GrowthClass, OracleReport, TableFn,
    TailStrategy, WindowConfig, WindowSup,
};
