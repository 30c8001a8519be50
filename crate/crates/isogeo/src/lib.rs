//! Numerical toolkit for four-dimensional Lorentzian geometry.
//!
//! The crate evaluates user-specified metrics (10 independent components,
//! each an expression over chart coordinates and named parameters) and
//! derives everything needed for pointwise curvature analysis and geodesic
//! experiments:
//!
//! * exact first and second metric derivatives via second-order jets
//!   ([`expr::jet`]), no finite differencing anywhere in the pipeline;
//! * Christoffel symbols, Riemann/Ricci/Weyl tensors and their conformal
//!   behaviour ([`curvature`]);
//! * an adapted complex null tetrad with the pairing g(e1,e4) = 1,
//!   g(e2,e3) = -1 ([`frame`]);
//! * the ten Weyl frame scalars, the principal quartic and Petrov
//!   classification with projective root clustering ([`petrov`]);
//! * adaptive geodesic integration plus conformal-invariance and principal
//!   congruence diagnostics ([`geodesic`]);
//! * lightlike hypersurface tests and their null-generator foliation
//!   ([`lightlike`]).
//!
//! Everything works in geometric units (G = c = 1) and radians. Signature
//! is (1,3): exactly one positive and three negative eigenvalues.

// tensor contractions read best with the same index letters across every
// factor, so plain index loops stay
#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod frame;
pub mod geodesic;
pub mod lightlike;
pub mod metric;
pub mod petrov;
pub mod report;

pub use error::{Error, Result};

/// Number of chart dimensions. Fixed: the tetrad construction, the Weyl
/// scalar table and the principal quartic are all specific to 4D.
pub const DIM: usize = 4;
