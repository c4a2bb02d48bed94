//! Dehn-Thurston coordinates over a pants decomposition.

pub mod coords;
pub mod dt;
pub mod twist;
pub mod realize;

pub use dt::{DtError, DtVector, PantsStructure};
pub use realize::{DtRealizer, IntegralMulticurve};
