//! Unfolded nearest-neighbour spacings of GUE spectra against the Wigner
//! surmise, and of Poisson points against the exponential law.

use logdyn::ensembles::{sample_many, EnsembleSpec};
use logdyn::rng::replica_rng;
use logdyn::stats::laws::{exponential_cdf, surmise_cdf};
use logdyn::stats::{central_window, ks_one_sample, pooled_spacings, spacing_distribution, Unfolding};
use logdyn::Configuration;
use rand::RngExt;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (n, reps) = (200, 200);
    let configs: Vec<Configuration> =
        sample_many(&EnsembleSpec::gaussian(n, 2.0, 4), reps)?.into_iter().map(|s| s.config).collect();
    let window = central_window(n, 2.0, 0.5);
    let unfolding = Unfolding::Semicircle { n, beta: 2.0 };
    let s = pooled_spacings(&configs, window, unfolding)?;
    let ks = ks_one_sample(&s, surmise_cdf);
    println!("GUE: {} spacings, KS vs surmise {:.4}", s.len(), ks.statistic);

    let h = spacing_distribution(&configs[0], window, unfolding, 8)?;
    for (c, v) in h.centers().iter().zip(&h.values) {
        println!("  s={c:.2}  p={v:.3}");
    }

    let mut rng = replica_rng(4, 0);
    let poisson: Vec<Configuration> = (0..reps)
        .map(|_| Configuration::line((0..n).map(|_| rng.random::<f64>() * n as f64).collect()))
        .collect();
    let s = pooled_spacings(&poisson, (0.0, n as f64), Unfolding::Uniform)?;
    println!("Poisson: KS vs exponential {:.4}", ks_one_sample(&s, exponential_cdf).statistic);
    Ok(())
}
