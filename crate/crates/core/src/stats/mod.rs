//! Estimators and hypothesis tests.

mod histogram;
pub mod ks;
pub mod laws;
mod rigidity;
mod spacing;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensembles::EnsembleError;

pub use histogram::{spectral_density, HistogramEstimate, Normalization};
pub use ks::{ks_one_sample, ks_two_sample, KsResult};
pub use rigidity::{
    msd_tagged, number_variance, poisson_disk_samples, power_law_fit, stationarity_test, terminal_states,
    MsdFit, PowerFit, StationarityResult, TagSelection, VarianceRow, SUPPORT_FRACTION,
};
pub use spacing::{
    central_window, pooled_spacings, spacing_distribution, unfolded_spacings, Unfolding, MIN_SPACINGS,
};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("empty input: {0}")]
    Empty(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{found} spacings in the window, at least {required} required")]
    InsufficientSpacings { found: usize, required: usize },
    #[error("radius {radius} exceeds the admissible fraction of the sample support {support}")]
    RadiusBeyondSupport { radius: f64, support: f64 },
    #[error("configuration with {found} points where {expected} were expected")]
    MismatchedN { expected: usize, found: usize },
    #[error("lags must span at least one decade, got a ratio of {ratio}")]
    InsufficientLagRange { ratio: f64 },
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

/// Outcome of one check as written to the verdict block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Verdict {
    /// Passes when `statistic <= threshold`.
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self { name: name.into(), statistic, threshold, pass: statistic <= threshold }
    }

    /// Passes when `statistic < threshold`.
    pub fn below(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self { name: name.into(), statistic, threshold, pass: statistic < threshold }
    }
}
