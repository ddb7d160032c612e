//! Numerical verification of improved L^p-Poincaré inequalities on the
//! hyperbolic space H^N.
//!
//! The crate evaluates the weights and sharp constants attached to the
//! inequalities, solves the transcendental equations that locate the
//! critical radii, builds the test-function families used to probe
//! sharpness, and certifies every inequality instance by adaptive
//! quadrature with an explicit error budget.
//!
//! Module map:
//!
//! * [`hyp`]: parameters, coordinates, Green's function and weights.
//! * [`quadrature`]: adaptive Gauss–Kronrod engine, radial and half-space
//!   integrals.
//! * [`constants`]: closed-form constants and brute-force optimizers.
//! * [`testfun`]: test-function constructors and seeded random families.
//! * [`verify`]: inequality reports, proof-step checks, sharpness scans.
//! * [`rp`]: root finding for the critical radii.
//! * [`report`]: CSV/JSON envelopes and golden-file comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod hyp;
pub mod optim;
pub mod quadrature;
pub mod report;
pub mod roots;
pub mod rp;
pub mod special;
pub mod testfun;
pub mod verify;

pub use error::{Error, Result};
pub use hyp::{HalfSpacePoint, Params};
pub use quadrature::{QuadResult, Tolerance};
pub use verify::{InequalityKind, InequalityReport};
