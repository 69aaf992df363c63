//! Start-up rotational flow of a generalized (fractional) second grade fluid
//! between two coaxial cylinders that begin rotating with constant angular
//! accelerations.
//!
//! The crate evaluates the exact eigenfunction-series solution for the
//! velocity and shear stress and carries two independent numerical oracles
//! for it: an implicit Grünwald-Letnikov finite-difference solver of the
//! governing PDE ([`fd`]) and numerical Laplace inversion of the per-mode
//! transforms ([`transform`]).

pub mod analytic;
pub mod eigen;
pub mod error;
pub mod fd;
pub mod params;
pub mod special;
pub mod transform;
pub mod validation;

pub use analytic::{FieldSample, Flow};
pub use eigen::{approximate_roots, find_roots, EigenvalueSet};
pub use error::{Error, Result};
pub use params::{AnnulusGeometry, FluidParams, Inversion, SeriesControls, Strategy};
