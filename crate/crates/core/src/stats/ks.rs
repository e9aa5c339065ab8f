//! Kolmogorov–Smirnov statistics.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Effective sample size `n m / (n + m)` (`n` for one sample).
    pub effective_n: f64,
}

/// Kolmogorov survival function `Q(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value with the small-sample correction
/// `λ = (√n + 0.12 + 0.11/√n) D`.
fn asymptotic_p(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    kolmogorov_q((s + 0.12 + 0.11 / s) * d)
}

/// One-sample statistic `sup |F_n − F|` against a continuous `cdf`.
pub fn ks_one_sample(data: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut xs = data.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    KsResult { statistic: d, p_value: asymptotic_p(d, n), effective_n: n }
}

/// Two-sample statistic `sup |F_n − G_m|`. Equal sample sizes use the exact
/// null distribution; otherwise the corrected asymptotic one.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let d = two_sample_statistic(a, b);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let n_eff = n * m / (n + m);
    let p_value = if a.len() == b.len() && !a.is_empty() {
        exact_equal_size_p(d, a.len())
    } else {
        asymptotic_p(d, n_eff)
    };
    KsResult { statistic: d, p_value, effective_n: n_eff }
}

pub fn two_sample_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// `P(D_{n,n} ≥ k/n) = 2 Σ_j (−1)^{j+1} C(2n, n − jk) / C(2n, n)`.
fn exact_equal_size_p(d: f64, n: usize) -> f64 {
    let k = (d * n as f64).round() as usize;
    if k == 0 {
        return 1.0;
    }
    let ln_c = |r: usize| ln_gamma(2.0 * n as f64 + 1.0) - ln_gamma(r as f64 + 1.0) - ln_gamma((2 * n - r) as f64 + 1.0);
    let base = ln_c(n);
    let mut sum = 0.0;
    let mut j = 1;
    while j * k <= n {
        let term = (ln_c(n - j * k) - base).exp();
        sum += if j % 2 == 1 { term } else { -term };
        j += 1;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_reference_values() {
        // Q(1.36) ≈ 0.0494, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_q(1.3580986) - 0.05).abs() < 1e-6);
        assert!((kolmogorov_q(1.6276236) - 0.01).abs() < 1e-6);
    }

    #[test]
    fn exact_small_case() {
        // n = 2: D = 1 has probability 2 / C(4, 2) = 1/3.
        assert!((exact_equal_size_p(1.0, 2) - 1.0 / 3.0).abs() < 1e-14);
        let r = ks_two_sample(&[0.0, 1.0], &[2.0, 3.0]);
        assert_eq!(r.statistic, 1.0);
    }

    #[test]
    fn one_sample_uniform_grid() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let r = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0));
        assert!((r.statistic - 0.005).abs() < 1e-15);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn ties_are_handled() {
        assert_eq!(two_sample_statistic(&[1.0, 1.0, 2.0], &[1.0, 2.0, 2.0]), 1.0 / 3.0);
    }
}
