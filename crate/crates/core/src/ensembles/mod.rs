//! Finite-N eigenvalue ensembles.
//!
//! * `GaussianBeta`: joint density `∝ Π|x_i − x_j|^β e^{−Σ x_i²/2}`, sampled
//!   from the tridiagonal matrix model (diagonal `N(0,1)`, off-diagonals
//!   `χ_{β(N−k)}/√2`). β = 1, 2, 4 give GOE, GUE, GSE spectra.
//! * `LaguerreBeta`: density `∝ Π|x_i − x_j|^β Π x_i^{β(α+1)/2 − 1} e^{−β x_i/2}`
//!   with `α = a − 1`, from the bidiagonal model. For β = 2 this is the
//!   Laguerre unitary ensemble with weight `x^α e^{−x}`.
//! * `Ginibre`: eigenvalues of an `N × N` matrix of standard complex
//!   Gaussians (`E|g|² = 1`), density `∝ Π|z_i − z_j|² e^{−Σ|z_i|²}`.

mod scaling;
pub mod tridiag;

use faer::{c64, Mat};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::replica_rng;
use crate::Configuration;

pub use scaling::{rescale, unscale, ScalingMap, ScalingRegime};
pub use tridiag::tridiagonal_eigenvalues;

const MAX_ATTEMPTS: u32 = 8;

#[derive(Debug, Error, PartialEq)]
pub enum EnsembleError {
    #[error("invalid ensemble: {0}")]
    Invalid(String),
    #[error("eigensolver failed after {attempts} attempts")]
    NoConvergence { attempts: u32 },
    #[error("scaling regime mismatch: {0}")]
    RegimeMismatch(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleFamily {
    GaussianBeta,
    Ginibre,
    LaguerreBeta,
}

impl std::str::FromStr for EnsembleFamily {
    type Err = EnsembleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian-beta" | "gaussian" => Ok(Self::GaussianBeta),
            "ginibre" => Ok(Self::Ginibre),
            "laguerre-beta" | "laguerre" => Ok(Self::LaguerreBeta),
            other => Err(EnsembleError::Invalid(format!("unknown ensemble '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub family: EnsembleFamily,
    pub n: usize,
    pub beta: f64,
    /// Laguerre parameter, `a >= 1`; ignored by the other families.
    pub a: f64,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn gaussian(n: usize, beta: f64, seed: u64) -> Self {
        Self { family: EnsembleFamily::GaussianBeta, n, beta, a: 1.0, seed }
    }

    pub fn ginibre(n: usize, seed: u64) -> Self {
        Self { family: EnsembleFamily::Ginibre, n, beta: 2.0, a: 1.0, seed }
    }

    pub fn laguerre(n: usize, beta: f64, a: f64, seed: u64) -> Self {
        Self { family: EnsembleFamily::LaguerreBeta, n, beta, a, seed }
    }

    pub fn dim(&self) -> usize {
        match self.family {
            EnsembleFamily::Ginibre => 2,
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        let bad = |m: String| Err(EnsembleError::Invalid(m));
        if self.n == 0 {
            return bad("N must be at least 1".into());
        }
        match self.family {
            EnsembleFamily::Ginibre if self.beta != 2.0 => {
                bad(format!("Ginibre ensembles are planar with beta = 2, got beta = {}", self.beta))
            }
            EnsembleFamily::GaussianBeta | EnsembleFamily::LaguerreBeta
                if !(self.beta > 0.0 && self.beta.is_finite()) =>
            {
                bad(format!("beta must be positive, got {}", self.beta))
            }
            EnsembleFamily::LaguerreBeta if !(self.a >= 1.0 && self.a.is_finite()) => {
                bad(format!("Laguerre parameter requires a >= 1, got a = {}", self.a))
            }
            _ => Ok(()),
        }
    }
}

/// One sampled configuration with sampler diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub config: Configuration,
    /// Number of redraws caused by ties or solver failures.
    pub redraws: u32,
}

/// Draws replica 0 of the ensemble.
pub fn sample(spec: &EnsembleSpec) -> Result<Sample, EnsembleError> {
    sample_replica(spec, 0)
}

/// Draws replica `replica`; deterministic in `(spec, replica)`.
pub fn sample_replica(spec: &EnsembleSpec, replica: u64) -> Result<Sample, EnsembleError> {
    spec.validate()?;
    let mut rng = replica_rng(spec.seed, replica);
    for attempt in 0..MAX_ATTEMPTS {
        if attempt > 0 {
            // Fresh randomness for the redraw, still a pure function of the spec.
            rng.set_stream(u64::MAX - attempt as u64);
        }
        let drawn = match spec.family {
            EnsembleFamily::GaussianBeta => gaussian_beta(spec.n, spec.beta, &mut rng),
            EnsembleFamily::LaguerreBeta => laguerre_beta(spec.n, spec.beta, spec.a - 1.0, &mut rng),
            EnsembleFamily::Ginibre => ginibre(spec.n, &mut rng),
        };
        if let Some(config) = drawn {
            return Ok(Sample { config, redraws: attempt });
        }
    }
    Err(EnsembleError::NoConvergence { attempts: MAX_ATTEMPTS })
}

/// Replicas `0..count`, sampled in parallel; output order is replica order.
pub fn sample_many(spec: &EnsembleSpec, count: usize) -> Result<Vec<Sample>, EnsembleError> {
    (0..count as u64)
        .into_par_iter()
        .map(|r| sample_replica(spec, r))
        .collect()
}

fn chi(k: f64, rng: &mut impl Rng) -> f64 {
    ChiSquared::new(k).expect("positive degrees of freedom").sample(rng).sqrt()
}

fn strictly_sorted(xs: Vec<f64>) -> Option<Configuration> {
    let c = Configuration::line(xs);
    c.is_strictly_increasing().then_some(c)
}

fn gaussian_beta(n: usize, beta: f64, rng: &mut ChaCha8Rng) -> Option<Configuration> {
    let diag: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let off: Vec<f64> = (1..n)
        .map(|k| chi(beta * (n - k) as f64, rng) * std::f64::consts::FRAC_1_SQRT_2)
        .collect();
    strictly_sorted(tridiagonal_eigenvalues(&diag, &off).ok()?)
}

fn laguerre_beta(n: usize, beta: f64, alpha: f64, rng: &mut ChaCha8Rng) -> Option<Configuration> {
    // Lower bidiagonal B: B[i][i] ~ χ_{β(N+α−i)}, B[i+1][i] ~ χ_{β(N−1−i)}.
    let d: Vec<f64> = (0..n).map(|i| chi(beta * (n as f64 + alpha - i as f64), rng)).collect();
    let s: Vec<f64> = (1..n).map(|i| chi(beta * (n - i) as f64, rng)).collect();
    // Eigenvalues of B Bᵀ, rescaled by 1/β to the e^{−βx/2} weight.
    let diag: Vec<f64> = (0..n)
        .map(|i| d[i] * d[i] + if i > 0 { s[i - 1] * s[i - 1] } else { 0.0 })
        .collect();
    let off: Vec<f64> = (0..n - 1).map(|i| d[i] * s[i]).collect();
    let ev = tridiagonal_eigenvalues(&diag, &off).ok()?;
    let xs: Vec<f64> = ev.into_iter().map(|x| x / beta).collect();
    if xs.first().is_some_and(|&x| x <= 0.0) {
        return None;
    }
    strictly_sorted(xs)
}

fn ginibre(n: usize, rng: &mut ChaCha8Rng) -> Option<Configuration> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut entries = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        entries.push(c64::new(re * s, im * s));
    }
    let m = Mat::<c64>::from_fn(n, n, |i, j| entries[i * n + j]);
    let mut ev = m.eigenvalues().ok()?;
    if ev.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return None;
    }
    ev.sort_by(|a, b| {
        a.norm_sqr()
            .total_cmp(&b.norm_sqr())
            .then(a.re.total_cmp(&b.re))
            .then(a.im.total_cmp(&b.im))
    });
    let points: Vec<[f64; 2]> = ev.iter().map(|z| [z.re, z.im]).collect();
    let c = Configuration::plane(&points);
    (c.min_gap() > 0.0).then_some(c)
}
