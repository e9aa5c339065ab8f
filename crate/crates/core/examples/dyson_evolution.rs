//! Dyson Brownian motion with harmonic confinement started from GUE
//! spectra. The Gaussian ensemble is invariant, so the terminal marginal
//! should match a fresh equilibrium draw.

use logdyn::dynamics::{evolve_replicas, DriftModel, EvolveOptions};
use logdyn::ensembles::{sample_many, EnsembleSpec};
use logdyn::stats::{stationarity_test, terminal_states};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (n, replicas) = (64, 100);
    let model = DriftModel::dyson(2.0, f64::INFINITY).with_confinement(0.5);
    let start: Vec<_> = sample_many(&EnsembleSpec::gaussian(n, 2.0, 1), replicas)?
        .into_iter()
        .map(|s| s.config)
        .collect();
    let opts = EvolveOptions::new(0.1, 1e-4, 2);
    let paths = evolve_replicas(&start, &model, &opts).into_iter().collect::<Result<Vec<_>, _>>()?;

    let rejections: u64 = paths.iter().map(|p| p.diagnostics.rejections).sum();
    let min_gap = paths.iter().map(|p| p.diagnostics.min_gap).fold(f64::INFINITY, f64::min);
    println!("{replicas} replicas, N={n}: rejections {rejections}, min gap {min_gap:.3e}");

    let fresh: Vec<_> = sample_many(&EnsembleSpec::gaussian(n, 2.0, 99), replicas)?
        .into_iter()
        .map(|s| s.config)
        .collect();
    let r = stationarity_test(&terminal_states(&paths), &fresh, 7)?;
    println!("terminal vs equilibrium: KS {:.4}, p {:.3}", r.statistic, r.p_value);
    Ok(())
}
