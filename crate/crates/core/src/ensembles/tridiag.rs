//! Eigenvalues of symmetric tridiagonal matrices by the implicit QL method
//! with Wilkinson-type shifts.

use thiserror::Error;

const MAX_SWEEPS: usize = 60;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("tridiagonal QL failed to converge for eigenvalue {index}")]
pub struct NoConvergence {
    pub index: usize,
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples rows `i` and `i+1`), sorted ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>, NoConvergence> {
    let n = diag.len();
    assert!(n == 0 || off.len() + 1 == n, "off-diagonal must have n - 1 entries");
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(off);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(NoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form() {
        let ev = tridiagonal_eigenvalues(&[1.0, 3.0], &[2.0]).unwrap();
        let r = 5f64.sqrt();
        assert!((ev[0] - (2.0 - r)).abs() < 1e-14);
        assert!((ev[1] - (2.0 + r)).abs() < 1e-14);
    }

    #[test]
    fn laplacian_spectrum() {
        // tridiag(-1, 2, -1) has eigenvalues 2 - 2 cos(kπ/(n+1)).
        let n = 50;
        let ev = tridiagonal_eigenvalues(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, v) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - want).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn decoupled_blocks_and_trivial_sizes() {
        assert!(tridiagonal_eigenvalues(&[], &[]).unwrap().is_empty());
        assert_eq!(tridiagonal_eigenvalues(&[4.0], &[]).unwrap(), vec![4.0]);
        let ev = tridiagonal_eigenvalues(&[3.0, 1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert_eq!(ev, vec![1.0, 2.0, 3.0]);
    }
}
