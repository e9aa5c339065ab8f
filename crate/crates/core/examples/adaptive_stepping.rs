//! Bessel dynamics next to the hard wall with a deliberately coarse step:
//! proposals that cross the wall or swap labels are rejected and the
//! Brownian increment is refined by bridge splitting.

use logdyn::dynamics::{evolve, scan_invariants, DriftModel, EvolveOptions};
use logdyn::Configuration;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = DriftModel::bessel(2.0, 1.0)?;
    let start = Configuration::line(vec![0.01, 0.05, 0.3, 1.0, 2.0]);
    for dt in [1e-1, 1e-2, 1e-3] {
        let path = evolve(&start, &model, &EvolveOptions::new(1.0, dt, 4).record_noise(true))?;
        let d = &path.diagnostics;
        let inv = scan_invariants(&path);
        println!(
            "dt={dt:<6} accepted {:>6}  rejected {:>5}  smallest dt {:.2e}  min gap {:.2e}  clean {}",
            d.accepted_steps,
            d.rejections,
            d.smallest_dt,
            d.min_gap,
            inv.clean()
        );
    }
    Ok(())
}
