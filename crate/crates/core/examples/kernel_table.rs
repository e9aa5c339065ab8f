//! Evaluates the correlation kernels on a few points and checks the
//! reproducing property of the sine kernel numerically.

use logdyn::kernels::{eval_kernel, extended_airy, sine_kernel, KernelSpec};
use logdyn::special::QuadratureGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let specs = [
        ("sine", KernelSpec::sine(), 0.3),
        ("airy", KernelSpec::airy(), -1.0),
        ("bessel a=2", KernelSpec::bessel(2.0)?, 1.5),
    ];
    for (name, spec, x) in specs {
        let diag = eval_kernel(&spec, 0.0, &[x], 0.0, &[x])?;
        let off = eval_kernel(&spec, 0.0, &[x], 0.0, &[x + 0.5])?;
        println!("{name:<11} K({x},{x}) = {diag:.12}   K({x},{}) = {off:.12}", x + 0.5);
    }
    let g = eval_kernel(&KernelSpec::ginibre(), 0.0, &[0.2, 0.1], 0.0, &[0.2, 0.1])?;
    println!("ginibre     K(z,z) = {g:.12}  (1/pi = {:.12})", std::f64::consts::FRAC_1_PI);

    for gap in [0.0, 0.5, 1.0] {
        println!("extended airy K(0,-1; {gap},-1) = {:.10}", extended_airy(0.0, -1.0, gap, -1.0)?);
    }

    // ∫ K(x,z) K(z,y) dz over a long window approaches K(x,y)
    let grid = QuadratureGrid::gauss_legendre(&[(-400.0, 400.0)], 4000)?;
    let (x, y) = (0.2, 0.9);
    let conv: f64 = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .map(|(&z, &w)| w * sine_kernel(x, z) * sine_kernel(z, y))
        .sum();
    println!("sine reproducing: {conv:.6} vs {:.6}", sine_kernel(x, y));
    Ok(())
}
