//! Baseline duration laws and the densities derived from them:
//! length-biased, current-duration, scaled, mixed and log-transformed.

mod baseline;
mod derived;
mod grid;
mod mixing;

pub use baseline::{BaselineModel, CustomDensity};
pub use derived::{DerivedDensity, Support};
pub use grid::PchipInterpolant;
pub use mixing::MixingLaw;
