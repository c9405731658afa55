//! Exact Fourier expansions of Kohnen-plus-space Eisenstein series of
//! half-integral weight over `Q` and real quadratic fields.
//!
//! The crate is organised bottom-up:
//!
//! * [`base_field`], [`ideal`], [`class_group`]: arithmetic of the base field.
//! * [`quad_invariants`]: local square-class invariants and the `mod 4` test.
//! * [`lvalues`]: exact and numeric L-values at non-positive integers.
//! * [`eisenstein`]: coefficient formulas, q-expansions and Hecke operators.
//! * [`local_oracle`]: finite-sum checks of the local identities over `Q_p`.

pub mod arith;
pub mod base_field;
pub mod class_group;
pub mod cyclo;
pub mod eisenstein;
pub mod ideal;
pub mod local_oracle;
pub mod lvalues;
pub mod quad_invariants;

pub use base_field::{BaseField, FieldElement};
pub use cyclo::CycRat;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("computation failed: {0}")]
    Computation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
