//! Numerical calculus of anisotropic (direction-dependent) tensors.
//!
//! Objects live on a conic domain `A` of the tangent bundle of a chart and
//! carry a declared degree of positive homogeneity in the fiber variable
//! `y`. Two operators move between homogeneity levels: the vertical
//! derivative (one covariant index more, one degree less) and the Liouville
//! contraction (one index less, one degree more). The crate implements the
//! resulting ladder of tensors, its decomposition into base and residues,
//! and its counterpart for connection-type objects:
//!
//! * [`field`]: tensor fields, differentiation engine, Euler defects
//! * [`ladder`]: projections, decomposition, reconstruction, residue removal
//! * [`metrics`]: Lagrangians, Legendre transformations, anisotropic metrics
//! * [`connections`]: sprays, nonlinear and anisotropic connections,
//!   canonical objects of a Lagrangian, torsion and Landsberg residues
//! * [`geodesic`]: integration of the geodesic spray
//! * [`linearconn`]: linear connections on the vertical bundle
//! * [`atlas`]: chart transitions and transformation cocycles
//! * [`functional`]: action functionals and their restrictions/extensions
//! * [`catalog`]: built-in examples
//!
//! Exact derivatives come from truncated Taylor arithmetic ([`jet`]);
//! finite differences are available for fields known only by value.

pub mod atlas;
pub mod catalog;
pub mod connections;
pub mod domain;
pub mod error;
pub mod field;
pub mod functional;
pub mod geodesic;
pub mod jet;
pub mod ladder;
pub mod linalg;
pub mod linearconn;
pub mod metrics;

pub use domain::{ConicDomain, Point, SamplerSpec};
pub use error::{Error, Result};
pub use field::{
    homogeneity_defect, liouville_contract, vertical_derivative, x_derivative, DiffEngine,
    DiffMethod, TensorField,
};
pub use jet::Jet;
