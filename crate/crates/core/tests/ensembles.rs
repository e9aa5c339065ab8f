//! Moments of the sampled ensembles against exact finite-N formulas.

use logdyn::ensembles::{sample_many, sample_replica, EnsembleSpec};

fn mean(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = xs.collect();
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn gaussian_second_moment() {
    // E Σ x_i² = N + β N (N − 1) / 2 for the weight e^{−x²/2}
    for beta in [1.0, 2.0, 4.0] {
        let n = 10;
        let s = sample_many(&EnsembleSpec::gaussian(n, beta, 5), 4000).unwrap();
        let (m, se) = mean(s.iter().map(|c| c.config.coords().iter().map(|x| x * x).sum()));
        let exact = n as f64 + beta * (n * (n - 1)) as f64 / 2.0;
        assert!((m - exact).abs() < 4.0 * se, "beta {beta}: {m} vs {exact} (se {se})");
    }
}

#[test]
fn laguerre_smallest_point_is_exponential() {
    // β = 2, α = 0: P(λ_min > t) = e^{−N t}
    let n = 30;
    let s = sample_many(&EnsembleSpec::laguerre(n, 2.0, 1.0, 9), 4000).unwrap();
    let (m, se) = mean(s.iter().map(|c| n as f64 * c.config.coords().iter().cloned().fold(f64::INFINITY, f64::min)));
    assert!((m - 1.0).abs() < 4.0 * se, "{m} (se {se})");
}

#[test]
fn ginibre_mean_square_modulus() {
    // E Σ |λ_i|² = N (N + 1) / 2
    let n = 12;
    let s = sample_many(&EnsembleSpec::ginibre(n, 2), 3000).unwrap();
    let (m, se) = mean(s.iter().map(|c| c.config.coords().iter().map(|x| x * x).sum()));
    let exact = (n * (n + 1)) as f64 / 2.0;
    assert!((m - exact).abs() < 4.0 * se, "{m} vs {exact} (se {se})");
}

#[test]
fn replicas_are_independent_of_batch_size() {
    let spec = EnsembleSpec::gaussian(20, 2.0, 77);
    let batch = sample_many(&spec, 5).unwrap();
    assert_eq!(batch[3], sample_replica(&spec, 3).unwrap());
    assert_ne!(batch[3].config, batch[4].config);
}
