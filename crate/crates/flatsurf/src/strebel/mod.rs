//! Jenkins-Strebel surfaces and the packaged parametric families.

pub mod chain;
pub mod spec;

pub use chain::ChainSurface;
pub use spec::{build_strebel, StrebelError, StrebelSpec, StrebelSurface};
