//! Computing with polyhedral difference-of-convex (DC) functions and the
//! sets they carve out as sublevel sets at weakly regular values.
//!
//! The crate provides exact piecewise-affine DC calculus, Clarke
//! subdifferentials with full-dimensional cell certification, min-norm-point
//! descent flows that realize deformation retractions, Euler characteristics
//! of planar sublevel sets through the winding number of the subgradient
//! field, singular-set extraction, and the complete planar sector
//! classification of locally WDC sets.

pub mod aura;
pub mod dc;
pub mod error;
pub mod fractal;
pub mod geom;
pub mod lp;
pub mod planar;
pub mod polytope;
pub mod pwa1;
pub mod retraction;
pub mod sample;
pub mod schema;
pub mod singular;
pub mod subdiff;
pub mod svg;
pub mod topology;

mod arrangement;

pub use error::{Error, Result};
