//! Numerical and exact-symbolic toolkit for a family of norm-preserving
//! mappings on the plane and on four-dimensional space.
//!
//! The central object is the planar mapping `f` that doubles the polar angle
//! of its argument while preserving the radius, together with two extensions
//! to four dimensions: the blockwise extension `g` and the shared-norm
//! variant `h`. The crate provides
//!
//! * closed-form Fréchet derivatives and coderivative case analyses for all
//!   three mappings ([`analytic`]),
//! * definition-level numerical oracles — finite-difference Jacobians,
//!   coderivative limit quotients, directional probes ([`oracles`]),
//! * covering-constant estimators with a spectral and a definitional
//!   sampling strategy ([`covering`]),
//! * exact sparse-polynomial verification of the algebraic identities that
//!   drive the covering analysis ([`polyid`]), and
//! * a damped-Newton solver for parameterized coincidence equations with a
//!   certified distance bound ([`coincidence`]).
//!
//! All sampling is deterministic given a master seed; see [`sampling`].

pub mod coincidence;
pub mod analytic;
pub mod covering;
mod error;
pub mod mappings;
pub mod matrix;
pub mod oracles;
pub mod point;
pub mod polyid;
pub mod sampling;

pub use error::{Error, Result};
pub use mappings::MapId;
pub use matrix::{Mat2, Mat4};
pub use point::{Point2, Point4};
