//! Re-solves the first m particles with the tail frozen at its reference
//! path, and shows how a tail perturbation propagates to the head.

use logdyn::dynamics::{evolve, DriftModel, EvolveOptions};
use logdyn::ensembles::{sample, EnsembleSpec};
use logdyn::ifc::{consistency_report, perturbation_probe};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 16;
    let model = DriftModel::dyson(2.0, f64::INFINITY).with_confinement(0.5);
    let start = sample(&EnsembleSpec::gaussian(n, 2.0, 8))?.config;
    let reference = evolve(&start, &model, &EvolveOptions::new(0.05, 1e-3, 8).record_noise(true))?;

    println!("   m  max_dev     perturbed_dev (eps=1e-6)");
    for row in consistency_report(&reference, &model, &[1, 4, 8, 15, 16], 1e-6)? {
        let p = row.perturbed_dev.map_or("-".to_string(), |v| format!("{v:.3e}"));
        println!("{:>4}  {:.3e}  {p}", row.m, row.max_dev);
    }

    println!("\nhead m=4, shifting one tail label by 1e-6:");
    for label in [4, 8, 15] {
        let dev = perturbation_probe(&reference, &model, 4, label, 1e-6)?;
        println!("  label {label:>2}: head deviation {dev:.3e}");
    }
    Ok(())
}
