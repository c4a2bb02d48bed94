//! Flat surfaces defined by polygon gluings with half-translation holonomy:
//! exact construction and validation, flat geodesics of simple closed curves,
//! Dehn-Thurston coordinates over a pants decomposition, and counting of
//! integral multicurves by flat length.
//!
//! Everything combinatorial runs on exact rational arithmetic; lengths are
//! reported as doubles whose squares are exact.

pub mod fixtures;
pub mod geodesic;
pub mod geom;
pub mod lamination;
pub mod strebel;
pub mod volume;
pub mod num;

pub use geom::surface::{HalfTranslationSurface, SurfaceError, SurfaceSpec};
pub use geom::Vec2;
pub use num::Rat;
