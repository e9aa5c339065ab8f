use faer::Mat;
use serde::{Deserialize, Serialize};

use super::{
    airy_kernel, bessel_kernel, extended_airy_matrix, sine_kernel, KernelError, KernelFamily,
    KernelSpec,
};
use crate::special::QuadratureGrid;

/// Largest accepted change between grid order `n` and `2n`.
pub const DEFAULT_REFINEMENT_TOLERANCE: f64 = 1e-6;

const MAX_TIMES: usize = 4;

/// Multiplier `χ` applied to the kernel's second argument.
#[derive(Clone, Copy)]
pub enum Chi<'a> {
    Constant(f64),
    Function(&'a (dyn Fn(f64) -> f64 + Sync)),
}

impl Chi<'_> {
    pub fn at(&self, x: f64) -> f64 {
        match self {
            Chi::Constant(c) => *c,
            Chi::Function(f) => f(x),
        }
    }
}

impl std::fmt::Debug for Chi<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Chi::Constant(c) => write!(f, "Constant({c})"),
            Chi::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// One Fredholm determinant evaluation as emitted by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminantRecord {
    pub family: KernelFamily,
    pub domain: Vec<(f64, f64)>,
    pub order: usize,
    pub value: f64,
    pub refinement_error: f64,
}

/// `det(I + K χ)` for a discretized kernel: `kernel` is the row-major matrix
/// `K(x_i, x_j)` on the grid nodes. Uses the symmetrized Nyström matrix
/// `δ_ij + √w_i K(x_i,x_j) χ(x_j) √w_j`.
pub fn nystrom_det(kernel: &[f64], grid: &QuadratureGrid, chi: Chi<'_>) -> f64 {
    let n = grid.len();
    if n == 0 {
        return 1.0;
    }
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let chis: Vec<f64> = grid.nodes.iter().map(|&x| chi.at(x)).collect();
    let m = Mat::<f64>::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id + sw[i] * kernel[i * n + j] * chis[j] * sw[j]
    });
    m.determinant()
}

fn kernel_matrix(spec: &KernelSpec, nodes: &[f64]) -> Result<Vec<f64>, KernelError> {
    let n = nodes.len();
    let pairwise = |k: &dyn Fn(f64, f64) -> f64| {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = k(nodes[i], nodes[j]);
            }
        }
        out
    };
    Ok(match spec.family {
        KernelFamily::Sine => pairwise(&sine_kernel),
        KernelFamily::Airy => pairwise(&airy_kernel),
        KernelFamily::Bessel => {
            let alpha = spec.params["a"] - 1.0;
            pairwise(&|x, y| bessel_kernel(alpha, x, y))
        }
        KernelFamily::ExtendedAiry => extended_airy_matrix(0.0, 0.0, nodes, nodes)?,
        KernelFamily::Ginibre => {
            return Err(KernelError::Unsupported(
                "Fredholm determinants on interval domains need a one-dimensional kernel".into(),
            ))
        }
    })
}

fn check_domain(spec: &KernelSpec, domain: &[(f64, f64)], order: usize) -> Result<(), KernelError> {
    spec.validate()?;
    if order < 4 {
        return Err(KernelError::Parameter(format!("grid order must be >= 4, got {order}")));
    }
    for &(a, b) in domain {
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(KernelError::Parameter(format!("domain interval [{a}, {b}] must be bounded and ordered")));
        }
        if spec.family == KernelFamily::Bessel && a < 0.0 {
            return Err(KernelError::Domain { family: spec.family, point: vec![a] });
        }
    }
    Ok(())
}

fn det_at_order(
    spec: &KernelSpec,
    domain: &[(f64, f64)],
    order: usize,
    chi: Chi<'_>,
) -> Result<f64, KernelError> {
    let grid = QuadratureGrid::gauss_legendre(domain, order)?;
    let k = kernel_matrix(spec, &grid.nodes)?;
    Ok(nystrom_det(&k, &grid, chi))
}

/// `det(I + K χ)` on a union of bounded intervals with the default
/// refinement tolerance.
pub fn fredholm_det(
    spec: &KernelSpec,
    domain: &[(f64, f64)],
    grid_order: usize,
    chi: Chi<'_>,
) -> Result<DeterminantRecord, KernelError> {
    fredholm_det_with_tolerance(spec, domain, grid_order, chi, DEFAULT_REFINEMENT_TOLERANCE)
}

/// Evaluates at `grid_order` and `2 * grid_order` nodes per interval and
/// returns the refined value, failing when the two differ by more than
/// `tolerance`.
pub fn fredholm_det_with_tolerance(
    spec: &KernelSpec,
    domain: &[(f64, f64)],
    grid_order: usize,
    chi: Chi<'_>,
    tolerance: f64,
) -> Result<DeterminantRecord, KernelError> {
    check_domain(spec, domain, grid_order)?;
    let coarse = det_at_order(spec, domain, grid_order, chi)?;
    let fine = det_at_order(spec, domain, 2 * grid_order, chi)?;
    finish(spec.family, domain, grid_order, coarse, fine, tolerance)
}

fn finish(
    family: KernelFamily,
    domain: &[(f64, f64)],
    order: usize,
    coarse: f64,
    fine: f64,
    tolerance: f64,
) -> Result<DeterminantRecord, KernelError> {
    let refinement_error = (fine - coarse).abs();
    if !(refinement_error <= tolerance) {
        return Err(KernelError::NotConverged { order, value: fine, refinement_error });
    }
    Ok(DeterminantRecord {
        family,
        domain: domain.to_vec(),
        order,
        value: fine,
        refinement_error,
    })
}

fn multitime_at_order(
    times: &[f64],
    domain: &[(f64, f64)],
    order: usize,
    chis: &[Chi<'_>],
) -> Result<f64, KernelError> {
    let grid = QuadratureGrid::gauss_legendre(domain, order)?;
    let n = grid.len();
    let m = times.len();
    if n == 0 {
        return Ok(1.0);
    }
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let mut big = Mat::<f64>::zeros(m * n, m * n);
    for (a, &s) in times.iter().enumerate() {
        for (b, &t) in times.iter().enumerate() {
            let k = extended_airy_matrix(s, t, &grid.nodes, &grid.nodes)?;
            for i in 0..n {
                for j in 0..n {
                    let chi = chis[b].at(grid.nodes[j]);
                    big[(a * n + i, b * n + j)] = sw[i] * k[i * n + j] * chi * sw[j];
                }
            }
        }
    }
    for d in 0..m * n {
        big[(d, d)] += 1.0;
    }
    Ok(big.determinant())
}

/// Block Fredholm determinant `Det[δ_st δ(x−y) + K(s,x;t,y) χ_t(y)]` over the
/// time set `times` (at most four) with the extended Airy kernel.
pub fn multitime_mgf(
    spec: &KernelSpec,
    times: &[f64],
    domain: &[(f64, f64)],
    grid_order: usize,
    chi_per_time: &[Chi<'_>],
) -> Result<DeterminantRecord, KernelError> {
    if spec.family != KernelFamily::ExtendedAiry {
        return Err(KernelError::Unsupported(format!(
            "multi-time determinants need the extended Airy kernel, got {}",
            spec.family
        )));
    }
    check_domain(spec, domain, grid_order)?;
    if times.is_empty() || times.len() > MAX_TIMES {
        return Err(KernelError::Parameter(format!(
            "between 1 and {MAX_TIMES} times required, got {}",
            times.len()
        )));
    }
    if chi_per_time.len() != times.len() {
        return Err(KernelError::Parameter(format!(
            "{} multipliers for {} times",
            chi_per_time.len(),
            times.len()
        )));
    }
    let coarse = multitime_at_order(times, domain, grid_order, chi_per_time)?;
    let fine = multitime_at_order(times, domain, 2 * grid_order, chi_per_time)?;
    finish(spec.family, domain, grid_order, coarse, fine, DEFAULT_REFINEMENT_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_domain_gives_one() {
        let r = fredholm_det(&KernelSpec::sine(), &[], 8, Chi::Constant(-1.0)).unwrap();
        assert_eq!(r.value, 1.0);
        let r = fredholm_det(&KernelSpec::airy(), &[(1.0, 1.0)], 8, Chi::Constant(-1.0)).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn rank_one_kernel() {
        // K = u(x) v(y) with u = e^x, v = cos y, χ = -1 on [0, 1]:
        // det = 1 - ∫_0^1 e^x cos x dx = 1 - (e (sin 1 + cos 1) - 1) / 2.
        let grid = QuadratureGrid::gauss_legendre(&[(0.0, 1.0)], 12).unwrap();
        let n = grid.len();
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                k[i * n + j] = grid.nodes[i].exp() * grid.nodes[j].cos();
            }
        }
        let e = std::f64::consts::E;
        let want = 1.0 - (e * (1f64.sin() + 1f64.cos()) - 1.0) / 2.0;
        let got = nystrom_det(&k, &grid, Chi::Constant(-1.0));
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
    }

    #[test]
    fn order_and_domain_validation() {
        assert!(fredholm_det(&KernelSpec::sine(), &[(0.0, 1.0)], 3, Chi::Constant(-1.0)).is_err());
        assert!(fredholm_det(&KernelSpec::sine(), &[(0.0, f64::INFINITY)], 8, Chi::Constant(-1.0)).is_err());
        assert!(fredholm_det(&KernelSpec::ginibre(), &[(0.0, 1.0)], 8, Chi::Constant(-1.0)).is_err());
        let b = KernelSpec::bessel(2.0).unwrap();
        assert!(fredholm_det(&b, &[(-1.0, 1.0)], 8, Chi::Constant(-1.0)).is_err());
    }

    #[test]
    fn refinement_failure_is_reported() {
        // A wide sine-kernel interval at order 4 cannot be resolved.
        match fredholm_det(&KernelSpec::sine(), &[(0.0, 6.0)], 4, Chi::Constant(-1.0)) {
            Err(KernelError::NotConverged { refinement_error, .. }) => assert!(refinement_error > 1e-6),
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn multitime_rejects_bad_inputs() {
        let e = KernelSpec::extended_airy();
        let c = [Chi::Constant(-0.5); 5];
        assert!(multitime_mgf(&KernelSpec::airy(), &[0.0], &[(0.0, 1.0)], 8, &c[..1]).is_err());
        assert!(multitime_mgf(&e, &[0.0, 1.0, 2.0, 3.0, 4.0], &[(0.0, 1.0)], 8, &c).is_err());
        assert!(multitime_mgf(&e, &[0.0, 1.0], &[(0.0, 1.0)], 8, &c[..1]).is_err());
    }
}
