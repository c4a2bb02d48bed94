//! Flat geodesic representatives of free homotopy classes.

pub mod annulus;
pub mod curve;
pub mod cylinder;
pub mod intersect;
pub mod segments;
pub mod strip;
pub mod tighten;

pub use curve::{CurveClass, CurveError};
