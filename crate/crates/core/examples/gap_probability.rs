//! Gap probabilities as Fredholm determinants `det(I − K)` restricted to an
//! interval, and a two-time generating function of the Airy line ensemble.

use logdyn::kernels::{fredholm_det, multitime_mgf, Chi, KernelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("  s    E_sine(0; s)");
    for s in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let r = fredholm_det(&KernelSpec::sine(), &[(0.0, s)], 20, Chi::Constant(-1.0))?;
        println!("{s:5.2}  {:.10}  (refinement {:.1e})", r.value, r.refinement_error);
    }

    println!("\n  s    F_2(s) = P(top Airy point < s)");
    for s in [-3.0, -2.0, -1.0, 0.0, 1.0] {
        let r = fredholm_det(&KernelSpec::airy(), &[(s, 8.0)], 30, Chi::Constant(-1.0))?;
        println!("{s:5.1}  {:.10}", r.value);
    }

    let spec = KernelSpec::extended_airy();
    let chi = Chi::Constant(-0.5);
    for gap in [0.1, 0.5, 1.0] {
        let r = multitime_mgf(&spec, &[0.0, gap], &[(-1.0, 6.0)], 24, &[chi, chi])?;
        println!("two-time determinant, gap {gap}: {:.10}", r.value);
    }
    Ok(())
}
