//! Cesàro function and sequence spaces over exact step functions.
//!
//! Functions live on `[0,1]` or on the half-line and are piecewise constant
//! with finitely many breakpoints. Operator images (`Cf`, `C²f`, Copson) are
//! kept in closed form so norms can be evaluated exactly where possible.

pub mod duality;
pub mod error;
pub mod function;
pub mod inequalities;
pub mod interpolation;
pub mod lp;
pub mod norms;
pub mod operators;
pub mod pava;
pub mod piecewise;
pub mod quadrature;
pub mod sampling;
pub mod sequence;
pub mod space;
pub mod suite;
pub mod weight;

pub use error::{CesError, Result};
pub use function::{Domain, DomainKind, StepFunction};
pub use norms::{norm, seq_norm, Method, NormValue};
pub use sequence::Sequence;
pub use space::SpaceSpec;
pub use weight::{ConcaveGauge, SeqWeight, Weight};
