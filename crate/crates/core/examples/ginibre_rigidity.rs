//! Number variance of Ginibre points in centred disks (growth like the
//! radius, against the area for Poisson points), and the mean squared
//! displacement of bulk particles under Ginibre dynamics.

use logdyn::dynamics::{evolve_replicas, DriftModel, EvolveOptions};
use logdyn::ensembles::{sample_many, EnsembleSpec};
use logdyn::stats::{msd_tagged, number_variance, poisson_disk_samples, power_law_fit, TagSelection};
use logdyn::Configuration;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 256;
    let configs: Vec<Configuration> =
        sample_many(&EnsembleSpec::ginibre(n, 6), 60)?.into_iter().map(|s| s.config).collect();
    let radii: Vec<f64> = (2..=10).map(f64::from).collect();
    let support = (n as f64).sqrt();
    for (name, samples) in [("ginibre", configs.clone()), ("poisson", poisson_disk_samples(support, 60, 6))] {
        let rows = number_variance(&samples, &radii)?;
        let fit = power_law_fit(&radii, &rows.iter().map(|r| r.variance).collect::<Vec<_>>())?;
        println!("{name:<8} number variance ~ R^{:.2}", fit.exponent);
    }

    let opts = EvolveOptions::new(1.0, 1e-3, 8).output_intervals(100);
    let paths = evolve_replicas(&configs[..20], &DriftModel::ginibre2(f64::INFINITY), &opts)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let fit = msd_tagged(&paths, TagSelection::Bulk { fraction: 0.5 }, (0.1, 1.0), 12)?;
    println!("ginibre2 MSD exponent over [0.1, 1]: {:.3}", fit.exponent);
    Ok(())
}
