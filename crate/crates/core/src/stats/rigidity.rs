use std::f64::consts::PI;

use rand::RngExt;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::ks::{ks_two_sample, two_sample_statistic};
use super::StatsError;
use crate::dynamics::LabeledPath;
use crate::rng::replica_rng;
use crate::Configuration;

/// Largest admissible counting radius relative to the sample support.
pub const SUPPORT_FRACTION: f64 = 0.7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub radius: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Variance of the number of points in the centered disk of each radius.
pub fn number_variance(samples: &[Configuration], radii: &[f64]) -> Result<Vec<VarianceRow>, StatsError> {
    if samples.len() < 2 {
        return Err(StatsError::Empty("number variance needs at least two samples".into()));
    }
    if samples.iter().any(|c| c.dim() != 2) {
        return Err(StatsError::Invalid("number variance needs planar configurations".into()));
    }
    let support = samples.iter().map(|c| c.max_radius()).fold(f64::INFINITY, f64::min);
    let n = samples.len() as f64;
    radii
        .iter()
        .map(|&radius| {
            if !(radius > 0.0 && radius <= SUPPORT_FRACTION * support) {
                return Err(StatsError::RadiusBeyondSupport { radius, support });
            }
            let counts: Vec<f64> = samples
                .iter()
                .map(|c| (0..c.len()).filter(|&i| c.radius(i) < radius).count() as f64)
                .collect();
            let mean = counts.iter().sum::<f64>() / n;
            let variance = counts.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / (n - 1.0);
            Ok(VarianceRow { radius, mean, variance })
        })
        .collect()
}

/// Poisson configurations of intensity `1/π` on the disk of radius
/// `support` (mean count `support²`).
pub fn poisson_disk_samples(support: f64, count: usize, seed: u64) -> Vec<Configuration> {
    (0..count as u64)
        .map(|r| {
            let mut rng = replica_rng(seed, r);
            let k = Poisson::new(support * support).expect("positive mean").sample(&mut rng) as usize;
            let points: Vec<[f64; 2]> = (0..k)
                .map(|_| {
                    let rad = support * rng.random::<f64>().sqrt();
                    let phi = 2.0 * PI * rng.random::<f64>();
                    [rad * phi.cos(), rad * phi.sin()]
                })
                .collect();
            Configuration::plane(&points)
        })
        .collect()
}

/// Least-squares fit of `log y = log c + α log x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Root mean square residual in log space.
    pub residual: f64,
}

pub fn power_law_fit(xs: &[f64], ys: &[f64]) -> Result<PowerFit, StatsError> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(StatsError::Invalid("power-law fit needs at least two paired points".into()));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(StatsError::Invalid("power-law fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(StatsError::Invalid("power-law fit needs distinct abscissae".into()));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let rss: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - exponent * x).powi(2)).sum();
    Ok(PowerFit { exponent, prefactor: intercept.exp(), residual: (rss / n).sqrt() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationarityResult {
    /// Two-sample KS statistic of the replica-pooled point marginals.
    pub statistic: f64,
    /// p-value from one seeded point per configuration, so that each side
    /// is an i.i.d. sample.
    pub p_value: f64,
    pub configurations: usize,
}

fn marginal(c: &Configuration) -> Vec<f64> {
    if c.dim() == 1 {
        c.coords().to_vec()
    } else {
        (0..c.len()).map(|i| c.radius(i)).collect()
    }
}

/// Compares terminal configurations with equilibrium configurations
/// (planar ones through their moduli).
pub fn stationarity_test(
    terminal: &[Configuration],
    equilibrium: &[Configuration],
    seed: u64,
) -> Result<StationarityResult, StatsError> {
    if terminal.is_empty() || equilibrium.is_empty() {
        return Err(StatsError::Empty("stationarity test needs configurations on both sides".into()));
    }
    let n = terminal[0].len();
    if let Some(bad) = terminal.iter().chain(equilibrium).find(|c| c.len() != n || c.is_empty()) {
        return Err(StatsError::MismatchedN { expected: n, found: bad.len() });
    }
    let pooled = |cs: &[Configuration]| cs.iter().flat_map(marginal).collect::<Vec<f64>>();
    let statistic = two_sample_statistic(&pooled(terminal), &pooled(equilibrium));
    let pick = |cs: &[Configuration], side: u64| -> Vec<f64> {
        cs.iter()
            .enumerate()
            .map(|(k, c)| {
                let mut rng = replica_rng(seed ^ side, k as u64);
                marginal(c)[rng.random_range(0..n)]
            })
            .collect()
    };
    let p_value = ks_two_sample(&pick(terminal, 0), &pick(equilibrium, 0x9e37_79b9)).p_value;
    Ok(StationarityResult { statistic, p_value, configurations: terminal.len() })
}

/// Terminal configurations of a set of paths.
pub fn terminal_states(paths: &[LabeledPath]) -> Vec<Configuration> {
    paths.iter().map(|p| p.final_state().clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MsdFit {
    pub lags: Vec<f64>,
    pub msd: Vec<f64>,
    pub exponent: f64,
    pub residual: f64,
    pub replicas: usize,
    /// Tagged particles per replica, averaged over replicas.
    pub mean_tags: f64,
}

/// Which labels are tagged, decided on the initial configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TagSelection {
    /// The particle closest to the origin.
    Closest,
    /// Every particle within `fraction` of the spectral radius
    /// (the largest initial modulus).
    Bulk { fraction: f64 },
}

impl TagSelection {
    pub fn tags(&self, init: &Configuration) -> Vec<usize> {
        match *self {
            TagSelection::Closest => (0..init.len())
                .min_by(|&a, &b| init.radius(a).total_cmp(&init.radius(b)))
                .into_iter()
                .collect(),
            TagSelection::Bulk { fraction } => {
                let cut = fraction * init.max_radius();
                (0..init.len()).filter(|&i| init.radius(i) <= cut).collect()
            }
        }
    }
}

/// Mean squared displacement of the tagged particles at up to `n_lags`
/// log-spaced lags in `lag_range`, averaged over tags, time origins on the
/// output grid and replicas, with a log-log least-squares exponent.
/// The output grid must be uniform.
pub fn msd_tagged(
    paths: &[LabeledPath],
    selection: TagSelection,
    lag_range: (f64, f64),
    n_lags: usize,
) -> Result<MsdFit, StatsError> {
    if paths.len() < 2 {
        return Err(StatsError::Empty("MSD needs at least two replicas".into()));
    }
    let times = &paths[0].times;
    if paths.iter().any(|p| p.times != *times) {
        return Err(StatsError::Invalid("paths must share one output grid".into()));
    }
    let (lo, hi) = lag_range;
    if !(lo > 0.0 && hi >= 10.0 * lo) || n_lags < 2 || times.len() < 2 {
        return Err(StatsError::InsufficientLagRange { ratio: hi / lo });
    }
    let h = times[1] - times[0];
    let mut lag_steps: Vec<usize> = (0..n_lags)
        .map(|j| {
            let target = lo * (hi / lo).powf(j as f64 / (n_lags - 1) as f64);
            (target / h).round() as usize
        })
        .filter(|&l| l >= 1 && l < times.len())
        .collect();
    lag_steps.dedup();
    let span = match (lag_steps.first(), lag_steps.last()) {
        (Some(&a), Some(&b)) => b as f64 / a as f64,
        _ => 0.0,
    };
    if lag_steps.len() < 2 || span < 10.0 - 1e-9 {
        return Err(StatsError::InsufficientLagRange { ratio: span });
    }
    let dim = paths[0].dim();
    let mut msd = vec![0.0; lag_steps.len()];
    let mut total_tags = 0usize;
    for p in paths {
        let tags = selection.tags(p.initial());
        if tags.is_empty() {
            return Err(StatsError::Empty("no tagged particle in a replica".into()));
        }
        total_tags += tags.len();
        for (slot, &l) in msd.iter_mut().zip(&lag_steps) {
            let mut acc = 0.0;
            let origins = times.len() - l;
            for k in 0..origins {
                let (a, b) = (&p.positions[k], &p.positions[k + l]);
                for &t in &tags {
                    let (x0, x1) = (a.point(t), b.point(t));
                    acc += (0..dim).map(|c| (x1[c] - x0[c]).powi(2)).sum::<f64>();
                }
            }
            *slot += acc / (origins * tags.len()) as f64;
        }
    }
    for v in &mut msd {
        *v /= paths.len() as f64;
    }
    let lags: Vec<f64> = lag_steps.iter().map(|&l| l as f64 * h).collect();
    let fit = power_law_fit(&lags, &msd)?;
    Ok(MsdFit {
        lags,
        msd,
        exponent: fit.exponent,
        residual: fit.residual,
        replicas: paths.len(),
        mean_tags: total_tags as f64 / paths.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        let f = power_law_fit(&xs, &ys).unwrap();
        assert!((f.exponent - 1.5).abs() < 1e-12);
        assert!((f.prefactor - 3.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_has_zero_number_variance() {
        let mut pts = Vec::new();
        for i in -10..=10 {
            for j in -10..=10 {
                pts.push([i as f64 + 0.5, j as f64 + 0.5]);
            }
        }
        let c = Configuration::plane(&pts);
        let rows = number_variance(&[c.clone(), c], &[2.0, 3.0, 5.0]).unwrap();
        assert!(rows.iter().all(|r| r.variance == 0.0));
    }

    #[test]
    fn radius_beyond_support() {
        let c = Configuration::plane(&[[1.0, 0.0], [0.0, 1.0]]);
        assert!(matches!(
            number_variance(&[c.clone(), c], &[0.9]),
            Err(StatsError::RadiusBeyondSupport { .. })
        ));
    }

    #[test]
    fn mismatched_n() {
        let a = Configuration::line(vec![0.0, 1.0]);
        let b = Configuration::line(vec![0.0, 1.0, 2.0]);
        assert!(matches!(stationarity_test(&[a], &[b], 0), Err(StatsError::MismatchedN { .. })));
    }
}
