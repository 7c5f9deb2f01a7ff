//! Thermodynamically consistent Markovian master equations.
//!
//! The crate builds GKLS generators whose jump operators are eigenoperators of
//! the free system dynamics and whose rates obey detailed balance, audits
//! arbitrary generators against the same structural requirements, and checks
//! the commutation of reduced and free dynamics on explicit
//! system-plus-environment models.

pub mod composite;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod generator;
pub mod linalg;
pub mod liouville;
pub mod presets;
pub mod validator;

pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::{LiouvilleVector, Operator};
pub use liouville::{
    assemble_superop, devectorize, eigenoperator_basis, hs_inner, vectorize, EigenoperatorBasis, Spectrum,
    SuperOpKind, SuperOperator,
};

pub use num_complex::Complex64;
