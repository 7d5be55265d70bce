//! Bounds and exact laminate constructions for the effective conductivity of
//! three-dimensional two-phase composites in a magnetic field.
//!
//! Phases are transversely isotropic about the field axis `e₃`:
//!
//! ```text
//! σ = [[a, −c, 0], [c, a, 0], [0, 0, b]],   a, b > 0.
//! ```

// `!(x > 0.0)` is used on purpose so NaN lands in the error branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds_elem;
pub mod bounds_hs;
pub mod error;
pub mod extrapolate;
pub mod gamma;
pub mod gfun;
pub mod laminate;
pub mod quadrature;
pub mod tensor;
pub mod verdict;

pub use error::{Error, Result};
pub use tensor::{Matrix3, Matrix6, PhaseDistribution, TIConductivity, Vector3};
pub use verdict::BoundsVerdict;
