//! Regular operators on finite-dimensional Hilbert C*-modules.
//!
//! The crate realises the z-transform picture of regular operators on free
//! modules `A^p` over block-diagonal C*-algebras, the functional calculus of
//! normal regular operators, strong commutation and tensor products, and a
//! symbolic commutative model (multiplication operators by rational
//! sequences) in which unboundedness is genuine and every domain question is
//! decidable.

pub mod algebra;
pub mod calculus;
pub mod commuting;
pub mod error;
pub mod functions;
pub mod linalg;
pub mod module_space;
pub mod regular;
pub mod sample;
pub mod tensor;
pub mod unbounded;

pub use algebra::{
    approximate_unit, AlgebraDescriptor, AlgebraElement, NormalEigensystem, DEFAULT_TOL,
};
pub use calculus::{CompatibleSet, SpectrumSet};
pub use commuting::{CommutingPair, IntertwiningReport, JointFn};
pub use error::{OpError, Result};
pub use functions::ScalarFn;
pub use module_space::{
    inner_product, localize, localize_op, theta, AdjointableOp, LocalizedSpace, ModuleDescriptor,
    ModuleVector,
};
pub use num_complex::Complex64;
pub use regular::{bounded_from_z, z_from_bounded, Flags, RegularOp};
pub use tensor::TensorModule;
pub use unbounded::{RationalSymbol, WindowConfig};
