use serde::{Deserialize, Serialize};

use super::integrator::{admissible, euler, ordering_of};
use super::{drift_all, DriftFamily, DriftModel, DynamicsError};
use crate::Configuration;

/// One accepted Euler substep: the state before it was at time `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseStep {
    pub t: f64,
    pub dt: f64,
    /// Brownian increments, flat `[particle][coordinate]`.
    pub increments: Vec<f64>,
    /// State after the substep.
    pub state: Vec<f64>,
}

/// The complete accepted schedule of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseRecord {
    pub initial: Vec<f64>,
    pub steps: Vec<NoiseStep>,
}

impl NoiseRecord {
    /// State before substep `k` (the initial state for `k = 0`).
    pub fn state_before(&self, k: usize) -> &[f64] {
        if k == 0 {
            &self.initial
        } else {
            &self.steps[k - 1].state
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PathDiagnostics {
    pub accepted_steps: u64,
    pub rejections: u64,
    /// Smallest pairwise distance over all accepted states.
    pub min_gap: f64,
    /// Largest `|x_i|` over all accepted states.
    pub max_abs: f64,
    pub smallest_dt: f64,
}

/// Trajectory of a labeled system sampled on an output grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPath {
    pub model: DriftModel,
    pub seed: u64,
    pub replica: u64,
    pub times: Vec<f64>,
    pub positions: Vec<Configuration>,
    pub noise: Option<NoiseRecord>,
    pub diagnostics: PathDiagnostics,
}

impl LabeledPath {
    pub fn n(&self) -> usize {
        self.positions[0].len()
    }

    pub fn dim(&self) -> usize {
        self.positions[0].dim()
    }

    pub fn initial(&self) -> &Configuration {
        &self.positions[0]
    }

    pub fn final_state(&self) -> &Configuration {
        self.positions.last().expect("paths contain the initial state")
    }

    /// `(mean(dB²/dt) − 1) / √(2/n)` over all recorded increments; close to a
    /// standard normal draw when the increments have variance `dt`.
    pub fn increment_variance_z(&self) -> Option<f64> {
        let noise = self.noise.as_ref()?;
        let (mut sum, mut count) = (0.0, 0usize);
        for s in &noise.steps {
            for db in &s.increments {
                sum += db * db / s.dt;
                count += 1;
            }
        }
        (count > 0).then(|| (sum / count as f64 - 1.0) / (2.0 / count as f64).sqrt())
    }
}

/// Recomputes the states of an accepted schedule from the initial state and
/// the recorded `(dt, increments)`. Fails if a substep leaves the state
/// space, which cannot happen for a schedule produced by the integrator.
pub fn replay(
    model: &DriftModel,
    initial: &[f64],
    steps: &[(f64, Vec<f64>)],
) -> Result<Vec<Vec<f64>>, DynamicsError> {
    let dim = model.dim();
    let config = Configuration::from_flat(dim, initial.to_vec())
        .map_err(|e| DynamicsError::Domain(e.to_string()))?;
    model.check_configuration(&config)?;
    let order = ordering_of(model, initial);
    let mut x = initial.to_vec();
    let mut b = vec![0.0; x.len()];
    let mut out = Vec::with_capacity(steps.len());
    let mut t = 0.0;
    for (dt, db) in steps {
        if db.len() != x.len() {
            return Err(DynamicsError::Invalid(format!(
                "increment of length {} for a state of length {}",
                db.len(),
                x.len()
            )));
        }
        drift_all(model, &x, &mut b)?;
        let next: Vec<f64> = (0..x.len()).map(|k| euler(x[k], b[k], *dt, db[k])).collect();
        if !admissible(model, &order, &next) {
            return Err(DynamicsError::Domain(format!("replayed step at t = {t} leaves the state space")));
        }
        t += dt;
        x = next;
        out.push(x.clone());
    }
    Ok(out)
}

/// Result of an independent scan over every stored state of a path.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub states_checked: usize,
    pub ordering_violations: usize,
    pub positivity_violations: usize,
    pub non_finite: usize,
    pub max_abs: f64,
}

impl InvariantReport {
    pub fn clean(&self) -> bool {
        self.ordering_violations == 0 && self.positivity_violations == 0 && self.non_finite == 0
    }
}

/// Checks the order of labels (1-D), positivity (Bessel) and finiteness on
/// every accepted substep when the noise was recorded, otherwise on the
/// output grid.
pub fn scan_invariants(path: &LabeledPath) -> InvariantReport {
    let mut states: Vec<&[f64]> = Vec::new();
    match &path.noise {
        Some(noise) => {
            states.push(&noise.initial);
            states.extend(noise.steps.iter().map(|s| s.state.as_slice()));
        }
        None => states.extend(path.positions.iter().map(|c| c.coords())),
    }
    let one_d = path.model.dim() == 1;
    let mut order: Vec<usize> = (0..states[0].len()).collect();
    if one_d {
        order.sort_by(|&i, &j| states[0][i].total_cmp(&states[0][j]));
    }
    let mut report = InvariantReport::default();
    for s in states {
        report.states_checked += 1;
        if s.iter().any(|x| !x.is_finite()) {
            report.non_finite += 1;
            continue;
        }
        report.max_abs = s.iter().fold(report.max_abs, |m, x| m.max(x.abs()));
        if one_d && order.windows(2).any(|w| !(s[w[0]] < s[w[1]])) {
            report.ordering_violations += 1;
        }
        if path.model.family == DriftFamily::Bessel && s.iter().any(|&x| !(x > 0.0)) {
            report.positivity_violations += 1;
        }
    }
    report
}
