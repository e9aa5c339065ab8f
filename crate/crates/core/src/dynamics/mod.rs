//! Labeled SDE systems `dX^i = dB^i + b_i(X) dt` with logarithmic
//! interactions, integrated by an ordering-preserving adaptive Euler scheme.
//!
//! ```
//! use logdyn::dynamics::{evolve, DriftModel, EvolveOptions};
//! use logdyn::Configuration;
//!
//! let model = DriftModel::dyson(2.0, f64::INFINITY).with_confinement(0.5);
//! let start = Configuration::line(vec![-1.0, 0.0, 1.0]);
//! let path = evolve(&start, &model, &EvolveOptions::new(0.1, 1e-3, 7)).unwrap();
//! assert!(path.final_state().is_strictly_increasing());
//! ```

mod drift;
mod integrator;
mod path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Configuration;

pub use drift::{airy_compensator, drift, drift_all, drift_into};
pub(crate) use integrator::{admissible, ordering_of};
pub use integrator::{evolve, evolve_replicas, evolve_with_noise, step, EvolveOptions, SimState};
pub use path::{replay, scan_invariants, InvariantReport, LabeledPath, NoiseRecord, NoiseStep, PathDiagnostics};

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("invalid model or run: {0}")]
    Invalid(String),
    #[error("state outside the model domain: {0}")]
    Domain(String),
    #[error("particles {i} and {j} coincide")]
    Collision { i: usize, j: usize },
    #[error("step size fell below {dt_min:e} at t = {t} (min gap {min_gap:e})")]
    StepUnderflow { t: f64, dt_min: f64, min_gap: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftFamily {
    Dyson,
    Airy,
    Bessel,
    Ginibre1,
    Ginibre2,
}

impl std::fmt::Display for DriftFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Dyson => "dyson",
            Self::Airy => "airy",
            Self::Bessel => "bessel",
            Self::Ginibre1 => "ginibre1",
            Self::Ginibre2 => "ginibre2",
        })
    }
}

impl std::str::FromStr for DriftFamily {
    type Err = DynamicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dyson" | "sine" => Ok(Self::Dyson),
            "airy" => Ok(Self::Airy),
            "bessel" => Ok(Self::Bessel),
            "ginibre1" => Ok(Self::Ginibre1),
            "ginibre2" => Ok(Self::Ginibre2),
            other => Err(DynamicsError::Invalid(format!("unknown drift family '{other}'"))),
        }
    }
}

/// Drift family with its parameters.
///
/// `r` is the truncation radius (`f64::INFINITY` for the untruncated sum;
/// the Airy family needs a finite `r`). `confinement` adds `−κ x_i` to the
/// one-dimensional drifts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftModel {
    pub family: DriftFamily,
    pub beta: f64,
    pub r: f64,
    pub a: f64,
    pub confinement: f64,
}

impl DriftModel {
    pub fn dyson(beta: f64, r: f64) -> Self {
        Self { family: DriftFamily::Dyson, beta, r, a: 0.0, confinement: 0.0 }
    }

    pub fn airy(beta: f64, r: f64) -> Self {
        Self { family: DriftFamily::Airy, beta, r, a: 0.0, confinement: 0.0 }
    }

    pub fn bessel(beta: f64, a: f64) -> Result<Self, DynamicsError> {
        let m = Self { family: DriftFamily::Bessel, beta, r: f64::INFINITY, a, confinement: 0.0 };
        m.validate()?;
        Ok(m)
    }

    pub fn ginibre1(r: f64) -> Self {
        Self { family: DriftFamily::Ginibre1, beta: 2.0, r, a: 0.0, confinement: 0.0 }
    }

    pub fn ginibre2(r: f64) -> Self {
        Self { family: DriftFamily::Ginibre2, beta: 2.0, r, a: 0.0, confinement: 0.0 }
    }

    pub fn with_confinement(mut self, kappa: f64) -> Self {
        self.confinement = kappa;
        self
    }

    pub fn dim(&self) -> usize {
        match self.family {
            DriftFamily::Ginibre1 | DriftFamily::Ginibre2 => 2,
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let bad = |m: String| Err(DynamicsError::Invalid(m));
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.r > 0.0) {
            return bad(format!("truncation radius must be positive, got r = {}", self.r));
        }
        if !(self.confinement >= 0.0 && self.confinement.is_finite()) {
            return bad(format!("confinement must be finite and >= 0, got {}", self.confinement));
        }
        match self.family {
            DriftFamily::Airy if !self.r.is_finite() => {
                bad("the Airy drift needs a finite truncation radius".into())
            }
            DriftFamily::Bessel if !(self.a >= 1.0 && self.a.is_finite()) => {
                bad(format!("the Bessel drift requires a >= 1, got a = {}", self.a))
            }
            DriftFamily::Ginibre1 | DriftFamily::Ginibre2 if self.beta != 2.0 => {
                bad(format!("Ginibre dynamics are planar with beta = 2, got beta = {}", self.beta))
            }
            DriftFamily::Ginibre1 | DriftFamily::Ginibre2 if self.confinement != 0.0 => {
                bad("confinement applies to one-dimensional families only".into())
            }
            _ => Ok(()),
        }
    }

    /// Checks that `config` lies in the state space of the model: matching
    /// dimension, finite coordinates, no coincident points and, for Bessel,
    /// strictly positive positions.
    pub fn check_configuration(&self, config: &Configuration) -> Result<(), DynamicsError> {
        self.validate()?;
        if config.dim() != self.dim() {
            return Err(DynamicsError::Domain(format!(
                "{} dynamics need dimension {}, got {}",
                self.family,
                self.dim(),
                config.dim()
            )));
        }
        if !config.is_finite() {
            return Err(DynamicsError::Domain("non-finite coordinate".into()));
        }
        if self.family == DriftFamily::Bessel && config.coords().iter().any(|&x| x <= 0.0) {
            return Err(DynamicsError::Domain("Bessel positions must be > 0".into()));
        }
        if !(config.min_gap() > 0.0) {
            return Err(DynamicsError::Domain("coincident particles".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_names_the_constraint() {
        let e = DriftModel::bessel(2.0, 0.5).unwrap_err();
        assert!(e.to_string().contains("a >= 1"));
        let mut g = DriftModel::ginibre1(3.0);
        g.beta = 1.0;
        assert!(g.validate().unwrap_err().to_string().contains("beta = 2"));
        assert!(DriftModel::airy(2.0, f64::INFINITY).validate().is_err());
        assert!(DriftModel::dyson(2.0, 0.0).validate().is_err());
        assert!(DriftModel::dyson(2.0, f64::INFINITY).validate().is_ok());
    }

    #[test]
    fn family_names_round_trip() {
        for f in [
            DriftFamily::Dyson,
            DriftFamily::Airy,
            DriftFamily::Bessel,
            DriftFamily::Ginibre1,
            DriftFamily::Ginibre2,
        ] {
            assert_eq!(f.to_string().parse::<DriftFamily>().unwrap(), f);
        }
    }
}
