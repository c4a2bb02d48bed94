//! Thurston volume estimation: multicurve counting, thick-thin data and the
//! paper-scale bounds.

pub mod bounds;
pub mod count;
pub mod estimate;
pub mod thickthin;

pub use bounds::{bound_report, BoundReport};
pub use count::{count_multicurves, CountConfig, CountError, CountResult};
pub use estimate::{volume_estimate, EstimateError, VolumeEstimate};
pub use thickthin::{thick_thin, ThickThin, ThickThinInput};
