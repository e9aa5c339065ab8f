//! Finite-volume quasi-Gibbs diagnostic: conditional densities of the
//! points inside a window, corrected by the window Hamiltonian.

use logdyn::ensembles::EnsembleSpec;
use logdyn::measures::quasi_gibbs_ratio;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (n, m) in [(4, 1), (6, 2), (10, 2)] {
        let spec = EnsembleSpec::gaussian(n, 2.0, 13);
        let r = quasi_gibbs_ratio(&spec, 1.0, m, 400, 9)?;
        println!(
            "N={n:>2} m={m}: used {:>3}/{} samples, spread quantiles {:.3?}",
            r.samples_used, r.samples_drawn, r.spread_quantiles
        );
    }
    Ok(())
}
