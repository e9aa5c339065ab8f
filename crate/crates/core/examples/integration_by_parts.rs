//! Monte Carlo check of `E Σ f'(x_i) = −E Σ f(x_i) d(x_i)` where `d` is the
//! logarithmic derivative of the Gaussian β-ensemble.

use logdyn::ensembles::EnsembleSpec;
use logdyn::measures::{verify_ibp, Bump, LogDerivativeField, TruncatedGaussian};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for beta in [1.0, 2.0, 4.0] {
        let spec = EnsembleSpec::gaussian(8, beta, 21);
        let field = LogDerivativeField::for_ensemble(&spec)?;
        let f = TruncatedGaussian { center: vec![0.5], width: 1.0 };
        let e = verify_ibp(&spec, &field, &f, 100_000)?;
        println!(
            "beta={beta}: lhs {:.5}  rhs {:.5}  stderr {:.1e}  z {:.2}",
            e.lhs,
            e.rhs,
            e.stderr,
            e.z()
        );
    }
    let gin = EnsembleSpec::ginibre(6, 2);
    let field = LogDerivativeField::for_ensemble(&gin)?;
    let bump = Bump { center: vec![0.3, -0.2], radius: 1.0 };
    let e = verify_ibp(&gin, &field, &bump, 50_000)?;
    println!("ginibre: lhs {:.5}  rhs {:.5}  z {:.2}", e.lhs, e.rhs, e.z());
    Ok(())
}
