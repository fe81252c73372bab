//! Semiparametric Fisher-information bounds for the regression parameter of
//! an accelerated-failure-time model under two cross-sectional sampling
//! schemes: length-biased observation of completed durations and
//! current-duration observation of elapsed times.

pub mod cli;
pub mod config;
pub mod covariate;
pub mod density;
pub mod empirical;
pub mod error;
pub mod fisher;
pub mod quadrature;
pub mod rng;
pub mod sampler;

pub use covariate::{CovariateModel, InfoBoundReport, SampledCovariateLaw};
pub use density::{BaselineModel, CustomDensity, DerivedDensity, MixingLaw, PchipInterpolant, Support};
pub use error::{Error, Result};
pub use fisher::{
    ClosedFormFamily, InfoScaleResult, MixtureContractionReport, PatienceReport, Scheme,
};
pub use quadrature::QuadResult;
pub use rng::CounterRng;
pub use sampler::{EpisodeRecord, SamplerConfig};
