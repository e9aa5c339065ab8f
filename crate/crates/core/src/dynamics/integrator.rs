use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::path::{LabeledPath, NoiseRecord, NoiseStep, PathDiagnostics};
use super::{drift_all, DriftFamily, DriftModel, DynamicsError};
use crate::rng::{NoiseSource, ParticleStreams};
use crate::Configuration;

/// Halvings allowed below the nominal step before a run is aborted.
pub const MAX_HALVINGS: i32 = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub t_final: f64,
    /// Nominal step size.
    pub dt: f64,
    /// Defaults to `dt · 2^−20`.
    pub dt_min: Option<f64>,
    /// Growth factor of the step size after an accepted macro step.
    pub relax: f64,
    /// Number of output intervals; the grid is `k · t_final / intervals`.
    pub output_intervals: usize,
    pub seed: u64,
    pub replica: u64,
    pub record_noise: bool,
    /// Noise stream of particle `i`; defaults to `i`.
    pub stream_keys: Option<Vec<u64>>,
}

impl EvolveOptions {
    pub fn new(t_final: f64, dt: f64, seed: u64) -> Self {
        let steps = if dt > 0.0 { (t_final / dt).ceil() as usize } else { 1 };
        Self {
            t_final,
            dt,
            dt_min: None,
            relax: 2.0,
            output_intervals: steps.clamp(1, 100),
            seed,
            replica: 0,
            record_noise: false,
            stream_keys: None,
        }
    }

    pub fn replica(mut self, replica: u64) -> Self {
        self.replica = replica;
        self
    }

    pub fn record_noise(mut self, on: bool) -> Self {
        self.record_noise = on;
        self
    }

    pub fn output_intervals(mut self, k: usize) -> Self {
        self.output_intervals = k;
        self
    }

    pub fn stream_keys(mut self, keys: Vec<u64>) -> Self {
        self.stream_keys = Some(keys);
        self
    }

    pub fn dt_min(&self) -> f64 {
        self.dt_min.unwrap_or(self.dt * 2f64.powi(-MAX_HALVINGS))
    }

    fn validate(&self, n: usize) -> Result<(), DynamicsError> {
        let bad = |m: String| Err(DynamicsError::Invalid(m));
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad(format!("final time must be finite and >= 0, got {}", self.t_final));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.dt_min() > 0.0 && self.dt_min() <= self.dt) {
            return bad("dt_min must lie in (0, dt]".into());
        }
        if !(self.relax >= 1.0) {
            return bad("relax factor must be >= 1".into());
        }
        if self.output_intervals == 0 {
            return bad("at least one output interval is required".into());
        }
        if let Some(keys) = &self.stream_keys {
            if keys.len() != n {
                return bad(format!("{} stream keys for {n} particles", keys.len()));
            }
        }
        Ok(())
    }
}

/// Mutable integrator state.
#[derive(Clone, Debug)]
pub struct SimState {
    pub t: f64,
    pub coords: Vec<f64>,
    /// Step size carried between macro steps.
    pub dt_current: f64,
    pub diagnostics: PathDiagnostics,
    order: Vec<usize>,
    drift: Vec<f64>,
    drift_valid: bool,
}

impl SimState {
    pub fn new(initial: &Configuration, model: &DriftModel, dt: f64) -> Result<Self, DynamicsError> {
        model.check_configuration(initial)?;
        let coords = initial.coords().to_vec();
        Ok(Self {
            t: 0.0,
            order: ordering_of(model, &coords),
            drift: vec![0.0; coords.len()],
            drift_valid: false,
            diagnostics: PathDiagnostics {
                min_gap: initial.min_gap(),
                max_abs: max_abs(&coords),
                smallest_dt: f64::INFINITY,
                ..Default::default()
            },
            coords,
            dt_current: dt,
        })
    }
}

pub(crate) fn ordering_of(model: &DriftModel, coords: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..coords.len()).collect();
    if model.dim() == 1 {
        order.sort_by(|&i, &j| coords[i].total_cmp(&coords[j]));
    }
    order
}

#[inline]
pub(crate) fn euler(x: f64, b: f64, dt: f64, db: f64) -> f64 {
    x + b * dt + db
}

/// Finite, order-preserving in 1-D, positive for Bessel.
pub(crate) fn admissible(model: &DriftModel, order: &[usize], next: &[f64]) -> bool {
    if next.iter().any(|x| !x.is_finite()) {
        return false;
    }
    match model.dim() {
        1 => {
            if model.family == DriftFamily::Bessel && !(next[order[0]] > 0.0) {
                return false;
            }
            order.windows(2).all(|w| next[w[0]] < next[w[1]])
        }
        _ => true,
    }
}

fn max_abs(coords: &[f64]) -> f64 {
    coords.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Advances `state` by `dt` with Brownian increments `increments` (variance
/// `dt` per coordinate).
///
/// A proposal that breaks the label order, leaves `(0, ∞)` for Bessel or is
/// not finite is rejected; the interval is then halved and the increment
/// split by a Brownian bridge with fresh draws from `noise`, so the law of
/// the driving path is unchanged. Accepted substeps are appended to
/// `record`.
pub fn step(
    state: &mut SimState,
    model: &DriftModel,
    dt: f64,
    dt_min: f64,
    increments: &[f64],
    noise: &mut impl NoiseSource,
    mut record: Option<&mut NoiseRecord>,
) -> Result<(), DynamicsError> {
    let dim = model.dim();
    let len = state.coords.len();
    if increments.len() != len {
        return Err(DynamicsError::Invalid(format!(
            "{} increments for {len} coordinates",
            increments.len()
        )));
    }
    let t0 = state.t;
    let mut pending = vec![(dt, increments.to_vec())];
    let mut proposal = vec![0.0; len];
    let mut smallest = dt;
    let mut rejected = false;
    while let Some((h, db)) = pending.pop() {
        if !state.drift_valid {
            let gap = drift_all(model, &state.coords, &mut state.drift)?;
            state.diagnostics.min_gap = state.diagnostics.min_gap.min(gap);
            state.drift_valid = true;
        }
        for k in 0..len {
            proposal[k] = euler(state.coords[k], state.drift[k], h, db[k]);
        }
        if admissible(model, &state.order, &proposal) {
            std::mem::swap(&mut state.coords, &mut proposal);
            state.drift_valid = false;
            if let Some(rec) = record.as_deref_mut() {
                rec.steps.push(NoiseStep { t: state.t, dt: h, increments: db, state: state.coords.clone() });
            }
            state.t += h;
            smallest = smallest.min(h);
            let d = &mut state.diagnostics;
            d.accepted_steps += 1;
            d.smallest_dt = d.smallest_dt.min(h);
            d.max_abs = d.max_abs.max(max_abs(&state.coords));
            continue;
        }
        rejected = true;
        state.diagnostics.rejections += 1;
        let half = 0.5 * h;
        if half < dt_min {
            return Err(DynamicsError::StepUnderflow {
                t: state.t,
                dt_min,
                min_gap: state.diagnostics.min_gap,
            });
        }
        let spread = 0.5 * h.sqrt();
        let mut first = vec![0.0; len];
        let mut second = vec![0.0; len];
        for k in 0..len {
            let z = noise.standard_normal(k / dim);
            first[k] = 0.5 * db[k] + spread * z;
            second[k] = db[k] - first[k];
        }
        pending.push((half, second));
        pending.push((half, first));
    }
    state.t = t0 + dt;
    state.dt_current = if rejected { smallest } else { state.dt_current };
    Ok(())
}

/// Integrates from `initial` over `[0, t_final]` with independent particle
/// noise streams derived from `(seed, replica)`.
pub fn evolve(
    initial: &Configuration,
    model: &DriftModel,
    opts: &EvolveOptions,
) -> Result<LabeledPath, DynamicsError> {
    let keys = opts
        .stream_keys
        .clone()
        .unwrap_or_else(|| (0..initial.len() as u64).collect());
    if keys.len() != initial.len() {
        return Err(DynamicsError::Invalid(format!("{} stream keys for {} particles", keys.len(), initial.len())));
    }
    let mut noise = ParticleStreams::with_keys(opts.seed, opts.replica, &keys);
    evolve_with_noise(initial, model, opts, &mut noise)
}

/// [`evolve`] with a caller-supplied noise source.
pub fn evolve_with_noise(
    initial: &Configuration,
    model: &DriftModel,
    opts: &EvolveOptions,
    noise: &mut impl NoiseSource,
) -> Result<LabeledPath, DynamicsError> {
    opts.validate(initial.len())?;
    let mut state = SimState::new(initial, model, opts.dt)?;
    let dim = model.dim();
    let dt_min = opts.dt_min();
    let mut record = opts.record_noise.then(|| NoiseRecord { initial: state.coords.clone(), steps: Vec::new() });
    let mut times = vec![0.0];
    let mut positions = vec![initial.clone()];
    let mut increments = vec![0.0; state.coords.len()];
    if opts.t_final > 0.0 {
        let k_max = opts.output_intervals;
        for k in 1..=k_max {
            let target = opts.t_final * k as f64 / k_max as f64;
            while state.t < target {
                let remaining = target - state.t;
                let mut h = state.dt_current.min(remaining);
                let last = remaining - h <= 1e-9 * opts.dt;
                if last {
                    h = remaining;
                }
                let scale = h.sqrt();
                for (c, inc) in increments.iter_mut().enumerate() {
                    *inc = scale * noise.standard_normal(c / dim);
                }
                let before = state.diagnostics.rejections;
                step(&mut state, model, h, dt_min, &increments, noise, record.as_mut())?;
                if last {
                    state.t = target;
                }
                if state.diagnostics.rejections == before {
                    state.dt_current = (state.dt_current * opts.relax).min(opts.dt);
                }
            }
            times.push(target);
            positions.push(Configuration::from_flat(dim, state.coords.clone()).expect("shape preserved"));
        }
    }
    Ok(LabeledPath {
        model: *model,
        seed: opts.seed,
        replica: opts.replica,
        times,
        positions,
        noise: record,
        diagnostics: state.diagnostics,
    })
}

/// Runs replica `opts.replica + k` from `initials[k]` in parallel; results
/// are in input order.
pub fn evolve_replicas(
    initials: &[Configuration],
    model: &DriftModel,
    opts: &EvolveOptions,
) -> Vec<Result<LabeledPath, DynamicsError>> {
    initials
        .par_iter()
        .enumerate()
        .map(|(k, init)| {
            let mut o = opts.clone();
            o.replica = opts.replica + k as u64;
            evolve(init, model, &o)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{replay, scan_invariants};

    fn dyson() -> DriftModel {
        DriftModel::dyson(2.0, f64::INFINITY)
    }

    #[test]
    fn zero_time_returns_the_initial_state() {
        let c = Configuration::line(vec![-1.0, 0.5, 2.0]);
        let p = evolve(&c, &dyson(), &EvolveOptions::new(0.0, 1e-3, 1)).unwrap();
        assert_eq!(p.times, vec![0.0]);
        assert_eq!(p.final_state(), &c);
    }

    #[test]
    fn deterministic_and_grid_aligned() {
        let c = Configuration::line(vec![-1.0, 0.0, 1.0, 2.5]);
        let o = EvolveOptions::new(0.5, 1e-3, 9).output_intervals(5);
        let a = evolve(&c, &dyson(), &o).unwrap();
        let b = evolve(&c, &dyson(), &o).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.times.len(), 6);
        assert_eq!(*a.times.last().unwrap(), 0.5);
        let other = evolve(&c, &dyson(), &o.clone().replica(1)).unwrap();
        assert_ne!(a.final_state(), other.final_state());
    }

    #[test]
    fn rejection_keeps_order_under_a_coarse_step() {
        // Close particles and a huge nominal step force rejections.
        let c = Configuration::line(vec![0.0, 1e-3, 2e-3, 1.0]);
        let o = EvolveOptions::new(1.0, 0.5, 3).record_noise(true);
        let p = evolve(&c, &dyson(), &o).unwrap();
        assert!(p.diagnostics.rejections > 0);
        assert!(scan_invariants(&p).clean());
    }

    #[test]
    fn replay_reproduces_recorded_states_bitwise() {
        let c = Configuration::line(vec![-0.5, 0.0, 0.7]);
        let m = dyson().with_confinement(0.5);
        let p = evolve(&c, &m, &EvolveOptions::new(0.3, 0.05, 5).record_noise(true)).unwrap();
        let noise = p.noise.as_ref().unwrap();
        let sched: Vec<(f64, Vec<f64>)> = noise.steps.iter().map(|s| (s.dt, s.increments.clone())).collect();
        let states = replay(&m, &noise.initial, &sched).unwrap();
        for (s, r) in noise.steps.iter().zip(&states) {
            assert_eq!(&s.state, r);
        }
        let total: f64 = sched.iter().map(|s| s.0).sum();
        assert!((total - 0.3).abs() < 1e-12);
    }

    #[test]
    fn bessel_stays_positive() {
        let m = DriftModel::bessel(2.0, 1.0).unwrap();
        let c = Configuration::line(vec![0.01, 0.5, 1.0]);
        let p = evolve(&c, &m, &EvolveOptions::new(1.0, 0.01, 2).record_noise(true)).unwrap();
        let inv = scan_invariants(&p);
        assert!(inv.clean(), "{inv:?}");
    }

    #[test]
    fn bad_options_are_rejected() {
        let c = Configuration::line(vec![0.0, 1.0]);
        assert!(evolve(&c, &dyson(), &EvolveOptions::new(1.0, 0.0, 0)).is_err());
        assert!(evolve(&c, &dyson(), &EvolveOptions::new(-1.0, 0.1, 0)).is_err());
        assert!(evolve(&c, &dyson(), &EvolveOptions::new(1.0, 0.1, 0).stream_keys(vec![0])).is_err());
        let plane = Configuration::plane(&[[0.0, 0.0]]);
        assert!(evolve(&plane, &dyson(), &EvolveOptions::new(1.0, 0.1, 0)).is_err());
    }
}
