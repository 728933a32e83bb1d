//! Numerical laboratory for spectral minimal partitions on planar domains:
//! flux-pi magnetic Laplacians, nodal partition extraction, exact eigenvalue
//! counting on the unit square, and the explicit constants of the linear
//! lower bound on odd critical points.

// `!(x > 0)` guards reject NaN inputs; `x <= 0` would let them through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops in the numeric kernels mirror the stencil/band arithmetic.
#![allow(clippy::needless_range_loop)]

pub mod certificate;
pub mod constants;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod operator;
pub mod partition;
pub mod scalar;
pub mod search;
pub mod weyl;

pub use error::{Error, Result};
pub use scalar::Real;

/// Concrete double-precision aliases; the CLI and the acceptance suite use
/// these throughout.
pub type DomainSpec64 = geometry::DomainSpec<f64>;
pub type Grid64 = geometry::Grid<f64>;
pub type PoleConfig64 = geometry::PoleConfig<f64>;
pub type SparseOperator64 = operator::SparseOperator<f64>;
pub type Spectrum64 = eigen::Spectrum<f64>;
pub type ConstantLedger64 = constants::ConstantLedger<f64>;
