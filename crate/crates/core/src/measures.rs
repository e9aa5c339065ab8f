//! Integration by parts against the logarithmic derivative, and a
//! finite-volume quasi-Gibbs diagnostic.
//!
//! For a point process μ with logarithmic derivative `d`, the identity
//!
//! ```text
//! E Σ_i ∇f(x_i) = −E Σ_i f(x_i) d(x_i, 𝗌 ∖ x_i)
//! ```
//!
//! holds for smooth compactly supported `f`. Both sides are estimated from
//! ensemble samples by summing over points. With unit diffusion matrix the
//! logarithmic derivative is twice the drift of the matching dynamics, and
//! [`LogDerivativeField`] is literally that: `2 ×` [`drift_into`].

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{drift_into, DriftFamily, DriftModel, DynamicsError};
use crate::ensembles::{sample_replica, EnsembleError, EnsembleFamily, EnsembleSpec};
use crate::rng::replica_rng;
use crate::special::GaussLegendre;

#[derive(Debug, Error, PartialEq)]
pub enum MeasuresError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("no sample out of {drawn} had exactly {m} points in the window")]
    EmptyConditioning { m: usize, drawn: usize },
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// `Φ(x) = κ|x|²` and `Ψ(x, y) = −β log|x − y|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialPair {
    pub beta: f64,
    /// κ; zero for the free case.
    pub confinement: f64,
}

impl PotentialPair {
    pub fn phi(&self, x: &[f64]) -> f64 {
        self.confinement * x.iter().map(|c| c * c).sum::<f64>()
    }

    pub fn psi(&self, x: &[f64], y: &[f64]) -> f64 {
        if self.beta == 0.0 {
            return 0.0;
        }
        -self.beta * crate::config::distance(x, y).ln()
    }

    /// `ℋ(s) = Σ Φ(s_i) + Σ_{i<j} Ψ(s_i, s_j)` for points given flat.
    pub fn hamiltonian(&self, points: &[f64], dim: usize) -> f64 {
        let n = points.len() / dim;
        let p = |i: usize| &points[i * dim..(i + 1) * dim];
        let mut h = 0.0;
        for i in 0..n {
            h += self.phi(p(i));
            for j in i + 1..n {
                h += self.psi(p(i), p(j));
            }
        }
        h
    }
}

/// Logarithmic derivative `d(x_i, 𝗌 ∖ x_i) = 2 b_i(𝗌)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogDerivativeField {
    pub model: DriftModel,
}

impl LogDerivativeField {
    pub fn new(model: DriftModel) -> Result<Self, MeasuresError> {
        model.validate()?;
        Ok(Self { model })
    }

    /// Field of the finite-N ensemble itself: `−x + βΣ 1/(x − s_j)` for the
    /// Gaussian β-ensemble, `−2z + 2Σ (z − w)/|z − w|²` for Ginibre.
    pub fn for_ensemble(spec: &EnsembleSpec) -> Result<Self, MeasuresError> {
        let model = match spec.family {
            EnsembleFamily::GaussianBeta => DriftModel::dyson(spec.beta, f64::INFINITY).with_confinement(0.5),
            EnsembleFamily::Ginibre => DriftModel::ginibre2(f64::INFINITY),
            EnsembleFamily::LaguerreBeta => {
                return Err(MeasuresError::Invalid(
                    "no logarithmic-derivative field is provided for the Laguerre ensemble".into(),
                ))
            }
        };
        Self::new(model)
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Field at point `i` of the flat configuration `coords`.
    pub fn at(&self, i: usize, coords: &[f64], out: &mut [f64]) -> Result<(), MeasuresError> {
        drift_into(&self.model, i, coords, out)?;
        for v in out.iter_mut() {
            *v *= 2.0;
        }
        Ok(())
    }
}

/// A smooth scalar test function with bounded support.
pub trait TestFunction: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
    /// Whether `x` can lie in the support; used to skip field evaluations.
    fn may_be_nonzero(&self, x: &[f64]) -> bool;
}

/// `exp(−1/(1 − |x − c|²/R²))` inside the ball of radius `R`, zero outside.
#[derive(Clone, Debug, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl TestFunction for Bump {
    fn value(&self, x: &[f64]) -> f64 {
        let u = sq_dist(x, &self.center) / (self.radius * self.radius);
        if u < 1.0 {
            (-1.0 / (1.0 - u)).exp()
        } else {
            0.0
        }
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let r2 = self.radius * self.radius;
        let u = sq_dist(x, &self.center) / r2;
        let f = if u < 1.0 { (-1.0 / (1.0 - u)).exp() } else { 0.0 };
        let g = if f == 0.0 { 0.0 } else { -f / ((1.0 - u) * (1.0 - u)) * 2.0 / r2 };
        for (k, o) in out.iter_mut().enumerate() {
            *o = g * (x[k] - self.center[k]);
        }
    }

    fn may_be_nonzero(&self, x: &[f64]) -> bool {
        sq_dist(x, &self.center) < self.radius * self.radius
    }
}

/// `exp(−|x − c|²/w²)` cut at `|x − c| = 27w`, where it is below the
/// smallest subnormal, so the truncation is exact in floating point.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedGaussian {
    pub center: Vec<f64>,
    pub width: f64,
}

impl TruncatedGaussian {
    const CUT: f64 = 27.0;
}

impl TestFunction for TruncatedGaussian {
    fn value(&self, x: &[f64]) -> f64 {
        if !self.may_be_nonzero(x) {
            return 0.0;
        }
        (-sq_dist(x, &self.center) / (self.width * self.width)).exp()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let f = self.value(x);
        let s = -2.0 * f / (self.width * self.width);
        for (k, o) in out.iter_mut().enumerate() {
            *o = s * (x[k] - self.center[k]);
        }
    }

    fn may_be_nonzero(&self, x: &[f64]) -> bool {
        sq_dist(x, &self.center) < (Self::CUT * self.width).powi(2)
    }
}

/// The zero function.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Zero;

impl TestFunction for Zero {
    fn value(&self, _: &[f64]) -> f64 {
        0.0
    }

    fn gradient(&self, _: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    fn may_be_nonzero(&self, _: &[f64]) -> bool {
        false
    }
}

/// Pointwise sum of test functions.
pub struct Sum(pub Vec<Box<dyn TestFunction>>);

impl TestFunction for Sum {
    fn value(&self, x: &[f64]) -> f64 {
        self.0.iter().map(|f| f.value(x)).sum()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        let mut g = vec![0.0; out.len()];
        for f in &self.0 {
            f.gradient(x, &mut g);
            for (o, v) in out.iter_mut().zip(&g) {
                *o += v;
            }
        }
    }

    fn may_be_nonzero(&self, x: &[f64]) -> bool {
        self.0.iter().any(|f| f.may_be_nonzero(x))
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Monte Carlo estimate of both sides of the integration by parts identity.
/// In dimension 2 both sides are taken along the direction `(1, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IbpEstimate {
    pub lhs: f64,
    pub rhs: f64,
    /// Standard error of `lhs − rhs`.
    pub stderr: f64,
    pub replicas: usize,
    /// Set when the standard error exceeds `|lhs|`.
    pub inconclusive: bool,
}

impl IbpEstimate {
    /// `|lhs − rhs|` in units of the standard error (0 when both vanish).
    pub fn z(&self) -> f64 {
        let d = (self.lhs - self.rhs).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr
        }
    }
}

/// Estimates `E Σ ∇f(x_i)` and `−E Σ f(x_i) d(x_i)` over replicas
/// `0..replicas` of `ensemble`.
pub fn verify_ibp(
    ensemble: &EnsembleSpec,
    field: &LogDerivativeField,
    test_fn: &dyn TestFunction,
    replicas: usize,
) -> Result<IbpEstimate, MeasuresError> {
    if replicas < 2 {
        return Err(MeasuresError::Invalid("at least two replicas are required".into()));
    }
    let dim = ensemble.dim();
    if field.dim() != dim {
        return Err(MeasuresError::Invalid(format!(
            "field of dimension {} for an ensemble of dimension {dim}",
            field.dim()
        )));
    }
    let per_replica: Vec<(f64, f64)> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let s = sample_replica(ensemble, r)?;
            let coords = s.config.coords();
            let (mut lhs, mut rhs) = (0.0, 0.0);
            let mut g = vec![0.0; dim];
            let mut d = vec![0.0; dim];
            for i in 0..s.config.len() {
                let x = &coords[i * dim..(i + 1) * dim];
                if !test_fn.may_be_nonzero(x) {
                    continue;
                }
                test_fn.gradient(x, &mut g);
                lhs += g.iter().sum::<f64>();
                let f = test_fn.value(x);
                if f != 0.0 {
                    field.at(i, coords, &mut d)?;
                    rhs -= f * d.iter().sum::<f64>();
                }
            }
            Ok((lhs, rhs))
        })
        .collect::<Result<_, MeasuresError>>()?;
    let n = replicas as f64;
    let lhs = per_replica.iter().map(|p| p.0).sum::<f64>() / n;
    let rhs = per_replica.iter().map(|p| p.1).sum::<f64>() / n;
    let mean_diff = lhs - rhs;
    let var = per_replica
        .iter()
        .map(|p| (p.0 - p.1 - mean_diff).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    let stderr = (var / n).sqrt();
    Ok(IbpEstimate { lhs, rhs, stderr, replicas, inconclusive: stderr > lhs.abs() })
}

/// Finite-volume quasi-Gibbs diagnostic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiGibbsReport {
    /// Always `"finite-volume diagnostic"`: the infinite-volume bounds are
    /// not testable.
    pub label: String,
    pub r: f64,
    pub m: usize,
    pub grid_points: usize,
    pub samples_drawn: usize,
    pub samples_used: usize,
    /// Extremes of the corrected log-density over all samples and grid points.
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Quantiles 0, 0.25, 0.5, 0.75, 1 of the per-sample spread.
    pub spread_quantiles: [f64; 5],
}

const Z_ORDER: usize = 20;

/// For outside configurations drawn from the Gaussian β-ensemble (β = 0:
/// independent standard normals) with exactly `m` points in `(−r, r)`,
/// evaluates `log p(x | outside) + ℋ_r(x)` on the uniform grid of
/// `grid_points` nodes per coordinate (endpoints included, coincident
/// coordinates skipped) and reports its spread.
pub fn quasi_gibbs_ratio(
    ensemble: &EnsembleSpec,
    r: f64,
    m: usize,
    samples: usize,
    grid_points: usize,
) -> Result<QuasiGibbsReport, MeasuresError> {
    if ensemble.family != EnsembleFamily::GaussianBeta {
        return Err(MeasuresError::Invalid(
            "the quasi-Gibbs diagnostic needs the Gaussian beta-ensemble".into(),
        ));
    }
    if ensemble.beta != 0.0 {
        ensemble.validate()?;
    } else if ensemble.n == 0 {
        return Err(MeasuresError::Invalid("N must be at least 1".into()));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(MeasuresError::Invalid(format!("window radius must be positive, got {r}")));
    }
    if m == 0 || m > ensemble.n || m > 3 {
        return Err(MeasuresError::Invalid(format!("inside count must lie in 1..=min(N, 3), got {m}")));
    }
    if grid_points < 2 {
        return Err(MeasuresError::Invalid("at least two grid points are required".into()));
    }
    let pot = PotentialPair { beta: ensemble.beta, confinement: 0.5 };
    let grid: Vec<f64> = (0..grid_points)
        .map(|k| -r + 2.0 * r * k as f64 / (grid_points - 1) as f64)
        .collect();
    let tuples = grid_tuples(&grid, m);
    let gl: Vec<(f64, f64)> = GaussLegendre::new(Z_ORDER).expect("positive order").mapped(-r, r).collect();
    let quad = quad_tuples(&gl, m);

    let outcomes: Vec<Option<(f64, f64)>> = (0..samples as u64)
        .into_par_iter()
        .map(|rep| {
            let xs = draw_gaussian(ensemble, rep)?;
            let (inside, outside): (Vec<f64>, Vec<f64>) = xs.iter().partition(|x| x.abs() < r);
            if inside.len() != m {
                return Ok(None);
            }
            // Unnormalized log conditional density: −ℋ_r(x) + β Σ log|x_i − y_k|.
            let log_weight = |x: &[f64]| -pot.hamiltonian(x, 1) + cross_term(pot.beta, x, &outside);
            let z: f64 = quad.iter().map(|(x, w)| w * log_weight(x).exp()).sum();
            let log_z = z.ln();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for x in &tuples {
                // log p(x | outside) + ℋ_r(x), with ℋ_r cancelled symbolically.
                let corrected = cross_term(pot.beta, x, &outside) - log_z;
                lo = lo.min(corrected);
                hi = hi.max(corrected);
            }
            Ok(Some((lo, hi)))
        })
        .collect::<Result<_, MeasuresError>>()?;
    let used: Vec<(f64, f64)> = outcomes.into_iter().flatten().collect();
    if used.is_empty() {
        return Err(MeasuresError::EmptyConditioning { m, drawn: samples });
    }
    let mut spreads: Vec<f64> = used.iter().map(|(lo, hi)| hi - lo).collect();
    spreads.sort_by(f64::total_cmp);
    let q = |p: f64| spreads[((spreads.len() - 1) as f64 * p).round() as usize];
    Ok(QuasiGibbsReport {
        label: "finite-volume diagnostic".into(),
        r,
        m,
        grid_points,
        samples_drawn: samples,
        samples_used: used.len(),
        ratio_min: used.iter().map(|p| p.0).fold(f64::INFINITY, f64::min),
        ratio_max: used.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
        spread_quantiles: [q(0.0), q(0.25), q(0.5), q(0.75), q(1.0)],
    })
}

fn draw_gaussian(spec: &EnsembleSpec, replica: u64) -> Result<Vec<f64>, MeasuresError> {
    if spec.beta == 0.0 {
        let mut rng = replica_rng(spec.seed, replica);
        let mut xs: Vec<f64> = (0..spec.n).map(|_| StandardNormal.sample(&mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        return Ok(xs);
    }
    Ok(sample_replica(spec, replica)?.config.into_coords())
}

fn cross_term(beta: f64, inside: &[f64], outside: &[f64]) -> f64 {
    if beta == 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    for x in inside {
        for y in outside {
            s += (x - y).abs().ln();
        }
    }
    beta * s
}

/// All `m`-tuples of grid values with pairwise distinct entries.
fn grid_tuples(grid: &[f64], m: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * grid.len());
        for t in &out {
            for &g in grid {
                if !t.contains(&g) {
                    let mut u = t.clone();
                    u.push(g);
                    next.push(u);
                }
            }
        }
        out = next;
    }
    out
}

/// Tensor-product nodes and weights.
fn quad_tuples(rule: &[(f64, f64)], m: usize) -> Vec<(Vec<f64>, f64)> {
    let mut out = vec![(Vec::new(), 1.0)];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|(x, w): (Vec<f64>, f64)| {
                rule.iter().map(move |&(node, weight)| {
                    let mut y = x.clone();
                    y.push(node);
                    (y, w * weight)
                })
            })
            .collect();
    }
    out
}

/// Whether `field` is the drift family that `LogDerivativeField::for_ensemble`
/// would pick for `spec`.
pub fn field_matches_ensemble(field: &LogDerivativeField, spec: &EnsembleSpec) -> bool {
    match spec.family {
        EnsembleFamily::GaussianBeta => {
            field.model.family == DriftFamily::Dyson
                && field.model.beta == spec.beta
                && field.model.confinement == 0.5
                && field.model.r.is_infinite()
        }
        EnsembleFamily::Ginibre => field.model.family == DriftFamily::Ginibre2 && field.model.r.is_infinite(),
        EnsembleFamily::LaguerreBeta => false,
    }
}
