//! Drift coefficients of the finite-N labeled systems (σ = identity).
//!
//! With `d = x_i − x_j`:
//!
//! | family   | drift of particle i                                                      |
//! |----------|--------------------------------------------------------------------------|
//! | Dyson    | `(β/2) Σ_{j≠i, |d|<r} 1/d`                                               |
//! | Airy     | `(β/2) (Σ_{j≠i, |x_j|<r} 1/d − 2√r/π)`                                   |
//! | Bessel   | `a/(2x_i) + (β/2) Σ_{j≠i} 1/d`                                           |
//! | Ginibre1 | `Σ_{j≠i, |d|<r} d/|d|²`                                                  |
//! | Ginibre2 | `−x_i + Σ_{j≠i, |x_j|<r} d/|d|²`                                         |
//!
//! One-dimensional families additionally carry an optional harmonic term
//! `−κ x_i`. With κ = 1/2, r = ∞ the Dyson drift is half the logarithmic
//! derivative of the Gaussian β-ensemble, which is then exactly invariant.

use std::f64::consts::PI;

use super::{DriftFamily, DriftModel, DynamicsError};

/// Accumulates the drift of particle `i` into `out` (length `dim`) from the
/// flat coordinate buffer `coords`, and returns the smallest distance from
/// `i` to any other particle.
///
/// The summation runs over `j` in label order; head re-solves rely on this
/// order to reproduce reference drifts bitwise.
pub fn drift_into(
    model: &DriftModel,
    i: usize,
    coords: &[f64],
    out: &mut [f64],
) -> Result<f64, DynamicsError> {
    let dim = model.dim();
    let n = coords.len() / dim;
    let mut nearest = f64::INFINITY;
    if dim == 1 {
        let xi = coords[i];
        let mut sum = 0.0;
        for (j, &xj) in coords.iter().enumerate() {
            if j == i {
                continue;
            }
            let d = xi - xj;
            if d == 0.0 {
                return Err(DynamicsError::Collision { i, j });
            }
            nearest = nearest.min(d.abs());
            let inside = match model.family {
                DriftFamily::Dyson => d.abs() < model.r,
                DriftFamily::Airy => xj.abs() < model.r,
                _ => true,
            };
            if inside {
                sum += 1.0 / d;
            }
        }
        let half_beta = 0.5 * model.beta;
        let mut b = match model.family {
            DriftFamily::Airy => half_beta * (sum - airy_compensator(model.r)),
            DriftFamily::Bessel => {
                if !(xi > 0.0) {
                    return Err(DynamicsError::Domain(format!(
                        "Bessel particle {i} at {xi} left (0, inf)"
                    )));
                }
                model.a / (2.0 * xi) + half_beta * sum
            }
            _ => half_beta * sum,
        };
        if model.confinement != 0.0 {
            b -= model.confinement * xi;
        }
        out[0] = b;
    } else {
        let (xi, yi) = (coords[2 * i], coords[2 * i + 1]);
        let r2 = model.r * model.r;
        let (mut sx, mut sy) = (0.0, 0.0);
        for j in 0..n {
            if j == i {
                continue;
            }
            let (xj, yj) = (coords[2 * j], coords[2 * j + 1]);
            let (dx, dy) = (xi - xj, yi - yj);
            let d2 = dx * dx + dy * dy;
            if d2 == 0.0 {
                return Err(DynamicsError::Collision { i, j });
            }
            nearest = nearest.min(d2);
            let inside = match model.family {
                DriftFamily::Ginibre1 => d2 < r2,
                _ => xj * xj + yj * yj < r2,
            };
            if inside {
                sx += dx / d2;
                sy += dy / d2;
            }
        }
        if model.family == DriftFamily::Ginibre2 {
            sx -= xi;
            sy -= yi;
        }
        out[0] = sx;
        out[1] = sy;
        nearest = nearest.sqrt();
    }
    Ok(nearest)
}

/// `(1/π) ∫_{−r}^0 √(−x)/(−x) dx = 2√r/π`.
pub fn airy_compensator(r: f64) -> f64 {
    2.0 * r.sqrt() / PI
}

/// Drift vector of particle `i`.
pub fn drift(model: &DriftModel, i: usize, state: &crate::Configuration) -> Result<Vec<f64>, DynamicsError> {
    model.check_configuration(state)?;
    if i >= state.len() {
        return Err(DynamicsError::Domain(format!("particle {i} out of range")));
    }
    let mut out = vec![0.0; model.dim()];
    drift_into(model, i, state.coords(), &mut out)?;
    Ok(out)
}

/// Drifts of all particles into `out` (flat, same layout as `coords`);
/// returns the minimum pairwise distance.
pub fn drift_all(model: &DriftModel, coords: &[f64], out: &mut [f64]) -> Result<f64, DynamicsError> {
    let dim = model.dim();
    let n = coords.len() / dim;
    let mut nearest = f64::INFINITY;
    for i in 0..n {
        nearest = nearest.min(drift_into(model, i, coords, &mut out[i * dim..(i + 1) * dim])?);
    }
    Ok(nearest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Configuration;

    #[test]
    fn two_body_dyson() {
        let m = DriftModel::dyson(2.0, f64::INFINITY);
        let c = Configuration::line(vec![-1.0, 1.0]);
        assert_eq!(drift(&m, 0, &c).unwrap(), vec![-0.5]);
        assert_eq!(drift(&m, 1, &c).unwrap(), vec![0.5]);
    }

    #[test]
    fn symmetric_cancellation() {
        let m = DriftModel::dyson(2.0, 10.0);
        let c = Configuration::line(vec![-1.0, 0.0, 1.0]);
        assert_eq!(drift(&m, 1, &c).unwrap(), vec![0.0]);
    }

    #[test]
    fn dyson_window_is_on_distance() {
        let m = DriftModel::dyson(2.0, 1.5);
        let c = Configuration::line(vec![0.0, 1.0, 3.0]);
        assert_eq!(drift(&m, 0, &c).unwrap(), vec![-1.0]);
    }

    #[test]
    fn airy_compensator_closed_form() {
        let pi = std::f64::consts::PI;
        let m = DriftModel::airy(2.0, pi * pi);
        let lone = Configuration::line(vec![0.3]);
        let b = drift(&m, 0, &lone).unwrap()[0];
        assert!((b + 2.0).abs() < 1e-15, "{b}");
        // the window is on |x_j| < r, not on the distance
        let m = DriftModel::airy(2.0, 1.0);
        let c = Configuration::line(vec![5.0, 0.5, -3.0]);
        let b = drift(&m, 0, &c).unwrap()[0];
        assert!((b - (1.0 / 4.5 - 2.0 / pi)).abs() < 1e-15);
    }

    #[test]
    fn bessel_singular_term() {
        let m = DriftModel::bessel(2.0, 1.0).unwrap();
        let c = Configuration::line(vec![0.5]);
        assert_eq!(drift(&m, 0, &c).unwrap(), vec![1.0]);
        assert!(drift(&m, 0, &Configuration::line(vec![-0.5])).is_err());
    }

    #[test]
    fn ginibre_two_body_and_confinement() {
        let g1 = DriftModel::ginibre1(10.0);
        let c = Configuration::plane(&[[0.0, 0.0], [1.0, 0.0]]);
        assert_eq!(drift(&g1, 0, &c).unwrap(), vec![-1.0, 0.0]);
        let g2 = DriftModel::ginibre2(10.0);
        let c = Configuration::plane(&[[2.0, 0.0], [1.0, 0.0]]);
        assert_eq!(drift(&g2, 0, &c).unwrap(), vec![1.0 - 2.0, 0.0]);
        // Ginibre2 ignores neighbours outside |x_j| < r
        let g2 = DriftModel::ginibre2(0.5);
        assert_eq!(drift(&g2, 0, &c).unwrap(), vec![-2.0, 0.0]);
    }

    #[test]
    fn collision_is_an_error_not_infinity() {
        let m = DriftModel::dyson(2.0, 5.0);
        let mut out = [0.0];
        assert_eq!(drift_into(&m, 0, &[1.0, 1.0], &mut out), Err(DynamicsError::Collision { i: 0, j: 1 }));
        assert!(drift(&m, 0, &Configuration::line(vec![1.0, 1.0])).is_err());
    }

    #[test]
    fn harmonic_confinement() {
        let m = DriftModel::dyson(2.0, f64::INFINITY).with_confinement(0.5);
        let c = Configuration::line(vec![3.0]);
        assert_eq!(drift(&m, 0, &c).unwrap(), vec![-1.5]);
    }
}
