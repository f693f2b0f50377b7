//! Numerical toolkit for waist isoperimetry on the sphere and the randomized
//! intersection and inclusion phenomena it implies for symmetric convex bodies.
//!
//! The crate is organized bottom-up:
//!
//! * [`measure`] evaluates subsphere-neighborhood measures exactly (through the
//!   regularized incomplete beta function) and by Monte Carlo, together with the
//!   closed-form cap, waist and chi-square bounds.
//! * [`bodies`] presents convex bodies as bundles of evaluators (support, gauge,
//!   radial, membership, projection) with the usual combinators.
//! * [`geometry`] samples Haar rotations and subspaces, builds certified nets on
//!   the sphere and lifts projections to odd waists.
//! * [`estimators`] turns those pieces into measurable quantities: sphere
//!   fractions of neighborhoods, covering numbers, diameters and inradii.
//! * [`experiments`] runs the reproducible harnesses and produces
//!   [`report::ExperimentReport`] values.

pub mod bodies;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod geometry;
pub mod measure;
pub mod optimize;
pub mod report;
pub mod rng;
pub mod special;
pub mod verify;

pub use bodies::{Body, BodySpec, ConvexBody};
pub use error::{Error, Result};
pub use geometry::{Rotation, SphereNet, Subspace};
pub use measure::{BoundConstants, McEstimate, SubsphereQuery};
pub use optimize::OptimizerConfig;
pub use report::ExperimentReport;

/// Dense column vector used throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix used for rotations and frames.
pub type Matrix = nalgebra::DMatrix<f64>;
