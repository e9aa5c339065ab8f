//! Head re-solves against frozen tails.
//!
//! Given a reference path with its recorded noise, the first `m` labels are
//! integrated again as an `m`-particle system in which labels `m..N` enter
//! only as frozen coefficients: their reference trajectories. The re-solve
//! uses the same Brownian increments and the same accepted-step schedule, so
//! uniqueness of the finite system makes it reproduce the reference head
//! exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::distance;
use crate::dynamics::{admissible, drift_into, ordering_of, DriftModel, DynamicsError, LabeledPath, NoiseRecord};

#[derive(Debug, Error, PartialEq)]
pub enum IfcError {
    #[error("the reference path has no noise record; rerun with noise recording on")]
    MissingNoise,
    #[error("head size m = {m} outside 1..={n}")]
    BadHeadSize { m: usize, n: usize },
    #[error("tail label {label} is not in the tail m..{n}")]
    BadTailLabel { label: usize, n: usize },
    #[error("consistency failure: the re-solve rejects step {step} (t = {t}) that the reference accepted")]
    ScheduleDivergence { step: usize, t: f64 },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Trajectories of labels `m..N` at every accepted state of the reference.
#[derive(Clone, Debug, PartialEq)]
pub struct FrozenTail {
    pub m: usize,
    pub dim: usize,
    /// `states[k]` is the tail before accepted step `k`; `states.len()` is
    /// the number of steps plus one.
    pub states: Vec<Vec<f64>>,
    pub seed: u64,
}

impl FrozenTail {
    pub fn from_reference(reference: &LabeledPath, m: usize) -> Result<Self, IfcError> {
        let noise = reference.noise.as_ref().ok_or(IfcError::MissingNoise)?;
        let n = reference.n();
        if m == 0 || m > n {
            return Err(IfcError::BadHeadSize { m, n });
        }
        let dim = reference.dim();
        let states = (0..=noise.steps.len())
            .map(|k| noise.state_before(k)[m * dim..].to_vec())
            .collect();
        Ok(Self { m, dim, states, seed: reference.seed })
    }

    /// Shifts every coordinate of tail label `label` by `epsilon` at all times.
    pub fn perturbed(&self, label: usize, epsilon: f64) -> Result<Self, IfcError> {
        let n = self.m + self.states[0].len() / self.dim;
        if label < self.m || label >= n {
            return Err(IfcError::BadTailLabel { label, n });
        }
        let mut out = self.clone();
        let off = (label - self.m) * self.dim;
        for s in &mut out.states {
            for c in &mut s[off..off + self.dim] {
                *c += epsilon;
            }
        }
        Ok(out)
    }
}

/// Head trajectory of a re-solve: `states[k]` is the head before accepted
/// step `k`, the last entry being the final head.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeadPath {
    pub m: usize,
    pub states: Vec<Vec<f64>>,
}

impl HeadPath {
    /// `max_k max_i |Y^i_k − X^i_k|` against the reference head.
    pub fn max_deviation(&self, noise: &NoiseRecord, dim: usize) -> f64 {
        let width = self.m * dim;
        self.states
            .iter()
            .enumerate()
            .map(|(k, y)| {
                let x = &noise.state_before(k)[..width];
                y.iter().zip(x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .fold(0.0, f64::max)
    }
}

/// Integrates the head from `head_initial` with step sizes and head
/// increments `schedule`, reading labels `m..N` from `tail`.
///
/// The output depends on nothing else: this is the measurability statement
/// of the scheme in executable form.
pub fn resolve_head(
    model: &DriftModel,
    head_initial: &[f64],
    schedule: &[(f64, &[f64])],
    tail: &FrozenTail,
) -> Result<HeadPath, IfcError> {
    let dim = model.dim();
    let width = tail.m * dim;
    if head_initial.len() != width || tail.states.len() != schedule.len() + 1 {
        return Err(IfcError::Dynamics(DynamicsError::Invalid(
            "head, schedule and tail lengths disagree".into(),
        )));
    }
    let mut coords: Vec<f64> = head_initial.iter().chain(&tail.states[0]).copied().collect();
    let order = ordering_of(model, &coords);
    let mut states = Vec::with_capacity(schedule.len() + 1);
    states.push(head_initial.to_vec());
    let mut b = vec![0.0; dim];
    let mut next = vec![0.0; width];
    let mut t = 0.0;
    for (k, &(dt, db)) in schedule.iter().enumerate() {
        for i in 0..tail.m {
            drift_into(model, i, &coords, &mut b)?;
            for c in 0..dim {
                let idx = i * dim + c;
                next[idx] = coords[idx] + b[c] * dt + db[idx];
            }
        }
        coords[..width].copy_from_slice(&next);
        coords[width..].copy_from_slice(&tail.states[k + 1]);
        if !admissible(model, &order, &coords) {
            return Err(IfcError::ScheduleDivergence { step: k, t });
        }
        t += dt;
        states.push(next.clone());
    }
    Ok(HeadPath { m: tail.m, states })
}

fn head_schedule<'a>(noise: &'a NoiseRecord, width: usize) -> Vec<(f64, &'a [f64])> {
    noise.steps.iter().map(|s| (s.dt, &s.increments[..width])).collect()
}

/// Re-solves the first `m` labels of `reference` against its own tail.
pub fn solve_frozen_tail(reference: &LabeledPath, m: usize, model: &DriftModel) -> Result<HeadPath, IfcError> {
    let tail = FrozenTail::from_reference(reference, m)?;
    solve_against(reference, model, &tail)
}

fn solve_against(reference: &LabeledPath, model: &DriftModel, tail: &FrozenTail) -> Result<HeadPath, IfcError> {
    let noise = reference.noise.as_ref().ok_or(IfcError::MissingNoise)?;
    let width = tail.m * model.dim();
    resolve_head(model, &noise.initial[..width], &head_schedule(noise, width), tail)
}

/// Deviation of the head from the reference when tail label `label` is
/// shifted by `epsilon`.
pub fn perturbation_probe(
    reference: &LabeledPath,
    model: &DriftModel,
    m: usize,
    label: usize,
    epsilon: f64,
) -> Result<f64, IfcError> {
    let tail = FrozenTail::from_reference(reference, m)?.perturbed(label, epsilon)?;
    let head = solve_against(reference, model, &tail)?;
    Ok(head.max_deviation(reference.noise.as_ref().expect("checked"), model.dim()))
}

/// Tail label whose initial position is farthest from the head.
pub fn farthest_tail_label(reference: &LabeledPath, m: usize) -> Option<usize> {
    let init = reference.initial();
    (m..init.len()).max_by(|&a, &b| {
        let da = (0..m).map(|h| distance(init.point(a), init.point(h))).fold(f64::INFINITY, f64::min);
        let db = (0..m).map(|h| distance(init.point(b), init.point(h))).fold(f64::INFINITY, f64::min);
        da.total_cmp(&db)
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub m: usize,
    pub max_dev: f64,
    /// `None` when the tail is empty (`m = N`).
    pub perturbed_dev: Option<f64>,
    pub perturbed_label: Option<usize>,
    pub epsilon: f64,
}

/// Per-`m` deviation of the frozen-tail re-solve from the reference, with
/// the farthest tail label shifted by `epsilon` in the perturbation column.
pub fn consistency_report(
    reference: &LabeledPath,
    model: &DriftModel,
    ms: &[usize],
    epsilon: f64,
) -> Result<Vec<ConsistencyRow>, IfcError> {
    let noise = reference.noise.as_ref().ok_or(IfcError::MissingNoise)?;
    ms.par_iter()
        .map(|&m| {
            let head = solve_frozen_tail(reference, m, model)?;
            let max_dev = head.max_deviation(noise, model.dim());
            let label = farthest_tail_label(reference, m);
            let perturbed_dev = label
                .map(|l| perturbation_probe(reference, model, m, l, epsilon))
                .transpose()?;
            Ok(ConsistencyRow { m, max_dev, perturbed_dev, perturbed_label: label, epsilon })
        })
        .collect()
}
