//! Draws Gaussian, Laguerre and Ginibre spectra and compares them with their
//! macroscopic laws.
//!
//! ```text
//! cargo run --release --example sample_ensembles
//! ```

use logdyn::ensembles::{rescale, sample, sample_many, EnsembleSpec, ScalingMap, ScalingRegime};
use logdyn::stats::laws::{disk_radial_cdf, semicircle_cdf};
use logdyn::stats::ks_one_sample;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 400;
    for beta in [1.0, 2.0, 4.0] {
        let spec = EnsembleSpec::gaussian(n, beta, 11);
        let scale = (beta * n as f64 / 2.0).sqrt();
        let xs: Vec<f64> = sample(&spec)?.config.coords().iter().map(|x| x / scale).collect();
        let ks = ks_one_sample(&xs, semicircle_cdf);
        println!("G{beta}E  N={n}  KS vs semicircle {:.4}  p={:.3}", ks.statistic, ks.p_value);
    }

    // hard edge: smallest Laguerre points on the 4N x scale
    let lue = EnsembleSpec::laguerre(200, 2.0, 1.0, 3);
    let hard = rescale(&sample(&lue)?.config, &ScalingMap::new(ScalingRegime::HardEdge, 200, 2.0))?;
    println!("LUE hard edge, first points: {:.3?}", &hard.coords()[..4]);

    let gin = EnsembleSpec::ginibre(300, 5);
    let radii: Vec<f64> = sample_many(&gin, 4)?
        .iter()
        .flat_map(|s| (0..s.config.len()).map(|i| s.config.radius(i) / 300f64.sqrt()).collect::<Vec<_>>())
        .collect();
    let ks = ks_one_sample(&radii, disk_radial_cdf);
    println!("Ginibre N=300  KS vs circular law {:.4}", ks.statistic);
    Ok(())
}
