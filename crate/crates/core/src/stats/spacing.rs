use serde::{Deserialize, Serialize};

use super::histogram::{HistogramEstimate, Normalization};
use super::laws::semicircle_cdf;
use super::StatsError;
use crate::Configuration;

pub const MIN_SPACINGS: usize = 10;

/// Map to a unit-density scale before taking spacings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Unfolding {
    /// Positions are already at constant density.
    Uniform,
    /// Gaussian β-ensemble with `n` points: `x ↦ N F_sc(x / √(βN/2))`.
    Semicircle { n: usize, beta: f64 },
}

impl Unfolding {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Unfolding::Uniform => x,
            Unfolding::Semicircle { n, beta } => {
                let n = n as f64;
                n * semicircle_cdf(x / (beta * n / 2.0).sqrt())
            }
        }
    }
}

/// Window `|x| < fraction · √(2βN)` around the centre of the semicircle.
pub fn central_window(n: usize, beta: f64, fraction: f64) -> (f64, f64) {
    let edge = (2.0 * beta * n as f64).sqrt();
    (-fraction * edge, fraction * edge)
}

/// Unfolded nearest-neighbour spacings of the points in `window`,
/// normalized to mean one.
pub fn unfolded_spacings(
    config: &Configuration,
    window: (f64, f64),
    unfolding: Unfolding,
) -> Result<Vec<f64>, StatsError> {
    if config.dim() != 1 {
        return Err(StatsError::Invalid("spacings need a configuration on the line".into()));
    }
    let mut xs: Vec<f64> = config.coords().iter().copied().filter(|&x| x >= window.0 && x <= window.1).collect();
    xs.sort_by(f64::total_cmp);
    let u: Vec<f64> = xs.iter().map(|&x| unfolding.apply(x)).collect();
    let mut s: Vec<f64> = u.windows(2).map(|w| w[1] - w[0]).collect();
    if s.len() < MIN_SPACINGS {
        return Err(StatsError::InsufficientSpacings { found: s.len(), required: MIN_SPACINGS });
    }
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    for v in &mut s {
        *v /= mean;
    }
    Ok(s)
}

/// Pooled unfolded spacings over many configurations.
pub fn pooled_spacings(
    configs: &[Configuration],
    window: (f64, f64),
    unfolding: Unfolding,
) -> Result<Vec<f64>, StatsError> {
    let mut out = Vec::new();
    for c in configs {
        out.extend(unfolded_spacings(c, window, unfolding)?);
    }
    Ok(out)
}

/// Density histogram of unfolded spacings on `[0, 4]`.
pub fn spacing_distribution(
    config: &Configuration,
    window: (f64, f64),
    unfolding: Unfolding,
    bins: usize,
) -> Result<HistogramEstimate, StatsError> {
    let s = unfolded_spacings(config, window, unfolding)?;
    HistogramEstimate::from_data(HistogramEstimate::uniform_edges(0.0, 4.0, bins), s, Normalization::Density, 1)
}
