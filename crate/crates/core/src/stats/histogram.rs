use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::ensembles::{rescale, ScalingMap};
use crate::Configuration;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Integrates to one over the binned range.
    Density,
    /// Sums to one over the bins.
    Probability,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramEstimate {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub values: Vec<f64>,
    pub mode: Normalization,
    pub replicas: usize,
    /// Points that fell outside the binned range.
    pub outside: u64,
}

impl HistogramEstimate {
    pub fn uniform_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
        (0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect()
    }

    /// Bins `data` (half-open bins, the last one closed) and normalizes.
    pub fn from_data(
        edges: Vec<f64>,
        data: impl IntoIterator<Item = f64>,
        mode: Normalization,
        replicas: usize,
    ) -> Result<Self, StatsError> {
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(StatsError::Invalid("bin edges must be strictly increasing".into()));
        }
        let bins = edges.len() - 1;
        let (lo, hi) = (edges[0], edges[bins]);
        let mut counts = vec![0u64; bins];
        let mut outside = 0;
        for x in data {
            if !(x >= lo && x <= hi) {
                outside += 1;
                continue;
            }
            let k = edges.partition_point(|&e| e <= x).saturating_sub(1).min(bins - 1);
            counts[k] += 1;
        }
        let total: u64 = counts.iter().sum();
        let values = counts
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                if total == 0 {
                    return 0.0;
                }
                let p = c as f64 / total as f64;
                match mode {
                    Normalization::Density => p / (edges[k + 1] - edges[k]),
                    Normalization::Probability => p,
                }
            })
            .collect();
        Ok(Self { edges, counts, values, mode, replicas, outside })
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// `Σ value · width` in density mode, `Σ value` otherwise.
    pub fn total_mass(&self) -> f64 {
        match self.mode {
            Normalization::Density => self
                .values
                .iter()
                .zip(self.edges.windows(2))
                .map(|(v, w)| v * (w[1] - w[0]))
                .sum(),
            Normalization::Probability => self.values.iter().sum(),
        }
    }
}

/// Replica-averaged density of rescaled points, binned on `[lo, hi]`.
/// Planar configurations are binned by modulus.
pub fn spectral_density(
    samples: &[Configuration],
    scaling: &ScalingMap,
    range: (f64, f64),
    bins: usize,
) -> Result<HistogramEstimate, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::Empty("spectral density needs at least one configuration".into()));
    }
    let mut points = Vec::new();
    for c in samples {
        let r = rescale(c, scaling)?;
        if r.dim() == 1 {
            points.extend_from_slice(r.coords());
        } else {
            points.extend((0..r.len()).map(|i| r.radius(i)));
        }
    }
    HistogramEstimate::from_data(
        HistogramEstimate::uniform_edges(range.0, range.1, bins),
        points,
        Normalization::Density,
        samples.len(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::ScalingRegime;

    #[test]
    fn single_point_density() {
        let h = HistogramEstimate::from_data(vec![-1.0, 1.0], [0.0], Normalization::Density, 1).unwrap();
        assert_eq!(h.values, vec![0.5]);
    }

    #[test]
    fn density_mass_is_one() {
        let data = (0..1000).map(|i| ((i * 7919) % 1000) as f64 / 997.0);
        let edges = vec![0.0, 0.1, 0.35, 0.5, 0.9, 1.0];
        let h = HistogramEstimate::from_data(edges, data, Normalization::Density, 1).unwrap();
        assert!((h.total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(h.outside, 2);
    }

    #[test]
    fn empty_input_is_an_error() {
        let map = ScalingMap::new(ScalingRegime::Bulk, 4, 2.0);
        assert!(spectral_density(&[], &map, (-1.0, 1.0), 4).is_err());
    }
}
