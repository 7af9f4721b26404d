//! Numerical laboratory for eigenfunctions on the classical compact
//! symmetric spaces and the minimal submanifolds arising as their zero
//! fibres.
//!
//! The crate is organized along the pipeline:
//!
//! * [`matrix`] — dense complex matrices, canonical basis matrices, the
//!   trace metric and the matrix exponential;
//! * [`groups`] — SO(n), SU(n), U(n), Sp(n) and the ten symmetric-space
//!   families: Haar sampling, membership residuals, retraction,
//!   orthonormal algebra/horizontal bases;
//! * [`catalog`] — the eigenfunction families, parameter validation and
//!   evaluation through closed trace-term shapes;
//! * [`geometry`] — directional derivatives (exact and finite-difference),
//!   tension field, conformality operator, eigen-identity residuals and
//!   product rules;
//! * [`fiber`] — fibre location by Riemannian descent, regularity
//!   certification, the gallery of known critical points, and the
//!   mean-curvature witness of minimality.

pub mod catalog;
pub mod fiber;
pub mod geometry;
pub mod groups;
pub mod matrix;

pub use catalog::{build, default_member, default_params, EigenfunctionSpec, Params};
pub use geometry::{DerivativeEngine, EngineMode};
pub use groups::{GroupId, Space, SpaceDescriptor};
pub use matrix::{ComplexMatrix, C64};
