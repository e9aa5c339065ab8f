use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::EnsembleError;
use crate::Configuration;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingRegime {
    Bulk,
    SoftEdge,
    HardEdge,
    GinibreBulk,
}

/// Local rescaling of raw finite-N spectra.
///
/// With the sampler's normalizations (Gaussian weight `e^{-x²/2}`, semicircle
/// radius `√(2βN)`; Laguerre weight `e^{-βx/2}`; Ginibre density `1/π`):
///
/// * `Bulk`: `x ↦ x √(2N/β) / π`, unit density at the origin,
/// * `SoftEdge`: `x ↦ N^{1/6} (x √(2/β) − 2√N)`,
/// * `HardEdge`: `x ↦ 4N x`,
/// * `GinibreBulk`: the identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingMap {
    pub regime: ScalingRegime,
    pub n: usize,
    pub beta: f64,
}

impl ScalingMap {
    pub fn new(regime: ScalingRegime, n: usize, beta: f64) -> Self {
        Self { regime, n, beta }
    }

    pub fn apply_scalar(&self, x: f64) -> f64 {
        let n = self.n as f64;
        match self.regime {
            ScalingRegime::Bulk => x * self.bulk_density(),
            ScalingRegime::SoftEdge => n.powf(1.0 / 6.0) * (x * (2.0 / self.beta).sqrt() - 2.0 * n.sqrt()),
            ScalingRegime::HardEdge => 4.0 * n * x,
            ScalingRegime::GinibreBulk => x,
        }
    }

    pub fn invert_scalar(&self, y: f64) -> f64 {
        let n = self.n as f64;
        match self.regime {
            ScalingRegime::Bulk => y / self.bulk_density(),
            ScalingRegime::SoftEdge => (y / n.powf(1.0 / 6.0) + 2.0 * n.sqrt()) / (2.0 / self.beta).sqrt(),
            ScalingRegime::HardEdge => y / (4.0 * n),
            ScalingRegime::GinibreBulk => y,
        }
    }

    /// Semicircle density `N ρ_sc(0)` at the origin of the Gaussian ensemble.
    fn bulk_density(&self) -> f64 {
        (2.0 * self.n as f64 / self.beta).sqrt() / PI
    }

    fn check(&self, config: &Configuration) -> Result<(), EnsembleError> {
        let mismatch = |why: &str| {
            Err(EnsembleError::RegimeMismatch(format!("{:?}: {why}", self.regime)))
        };
        if self.n == 0 || !(self.beta > 0.0) {
            return mismatch("needs n >= 1 and beta > 0");
        }
        match self.regime {
            ScalingRegime::GinibreBulk if config.dim() != 2 => mismatch("needs a planar configuration"),
            ScalingRegime::Bulk | ScalingRegime::SoftEdge | ScalingRegime::HardEdge if config.dim() != 1 => {
                mismatch("needs a configuration on the line")
            }
            ScalingRegime::HardEdge if config.coords().iter().any(|&x| x < 0.0) => {
                mismatch("needs a configuration on the half line")
            }
            _ => Ok(()),
        }
    }
}

pub fn rescale(config: &Configuration, map: &ScalingMap) -> Result<Configuration, EnsembleError> {
    map.check(config)?;
    let coords = config.coords().iter().map(|&x| map.apply_scalar(x)).collect();
    Ok(Configuration::from_flat(config.dim(), coords).expect("shape preserved"))
}

pub fn unscale(config: &Configuration, map: &ScalingMap) -> Result<Configuration, EnsembleError> {
    let coords = config.coords().iter().map(|&y| map.invert_scalar(y)).collect();
    Ok(Configuration::from_flat(config.dim(), coords).expect("shape preserved"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_edge_maps_the_edge_to_zero() {
        let n = 400;
        let map = ScalingMap::new(ScalingRegime::SoftEdge, n, 2.0);
        let edge = 2.0 * (n as f64).sqrt();
        assert_eq!(map.apply_scalar(edge), 0.0);
    }

    #[test]
    fn regime_mismatch_is_rejected() {
        let line = Configuration::line(vec![-1.0, 2.0]);
        let plane = Configuration::plane(&[[0.0, 1.0]]);
        assert!(rescale(&line, &ScalingMap::new(ScalingRegime::GinibreBulk, 2, 2.0)).is_err());
        assert!(rescale(&plane, &ScalingMap::new(ScalingRegime::Bulk, 1, 2.0)).is_err());
        assert!(rescale(&line, &ScalingMap::new(ScalingRegime::HardEdge, 2, 2.0)).is_err());
        assert!(rescale(&line, &ScalingMap::new(ScalingRegime::Bulk, 0, 2.0)).is_err());
    }
}
