//! Correlation kernels of the equilibrium point processes and Fredholm
//! determinants built from them.
//!
//! Equal-time kernels use the standard forms
//!
//! * sine: `sin(π(x−y)) / (π(x−y))`,
//! * Airy: `(Ai(x)Ai'(y) − Ai'(x)Ai(y)) / (x−y)`,
//! * Bessel of order `α = a − 1`:
//!   `(J_α(√x)√y J_α'(√y) − √x J_α'(√x) J_α(√y)) / (2(x−y))`,
//! * Ginibre: `exp(z w̄ − |z|²/2 − |w|²/2) / π`.
//!
//! The extended Airy kernel is
//!
//! ```text
//! K(s,x;t,y) =  ∫_0^∞  e^{−u(t−s)/2} Ai(u+x) Ai(u+y) du   for t >= s
//! K(s,x;t,y) = −∫_{−∞}^0 e^{−u(t−s)/2} Ai(u+x) Ai(u+y) du   for t <  s
//! ```

mod extended_airy;
mod fredholm;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use faer::c64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special::{airy, bessel_j_with_derivative, quadrature::QuadratureError};

pub use crate::special::QuadratureGrid;
pub use extended_airy::{extended_airy, extended_airy_matrix, TAIL_TOLERANCE};
pub use fredholm::{
    fredholm_det, fredholm_det_with_tolerance, multitime_mgf, nystrom_det, Chi,
    DeterminantRecord, DEFAULT_REFINEMENT_TOLERANCE,
};

/// Below this separation the equal-time Airy and Bessel kernels switch to
/// their diagonal limit formulas.
pub const DIAGONAL_SWITCH: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("point {point:?} outside the {family} domain")]
    Domain { family: KernelFamily, point: Vec<f64> },
    #[error("{family} kernel is equal-time only, got s = {s}, t = {t}")]
    TimeMismatch { family: KernelFamily, s: f64, t: f64 },
    #[error("invalid kernel parameter: {0}")]
    Parameter(String),
    #[error(
        "extended Airy integral for t - s = {gap} does not converge numerically: tail bound {bound:e} at u = -{cutoff}"
    )]
    Divergent { gap: f64, bound: f64, cutoff: f64 },
    #[error(
        "Fredholm determinant not converged at order {order}: value {value}, refinement error {refinement_error:e}"
    )]
    NotConverged { order: usize, value: f64, refinement_error: f64 },
    #[error("{0}")]
    Quadrature(#[from] QuadratureError),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    Sine,
    Airy,
    ExtendedAiry,
    Bessel,
    Ginibre,
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sine => "sine",
            Self::Airy => "airy",
            Self::ExtendedAiry => "extended-airy",
            Self::Bessel => "bessel",
            Self::Ginibre => "ginibre",
        })
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "sine" => Self::Sine,
            "airy" => Self::Airy,
            "extended-airy" => Self::ExtendedAiry,
            "bessel" => Self::Bessel,
            "ginibre" => Self::Ginibre,
            other => return Err(KernelError::Parameter(format!("unknown kernel family '{other}'"))),
        })
    }
}

/// A kernel family with its named parameters. The Bessel family needs
/// `a >= 1` (kernel order `a − 1`); the others take none.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub params: BTreeMap<String, f64>,
}

impl KernelSpec {
    pub fn new(family: KernelFamily) -> Self {
        Self { family, params: BTreeMap::new() }
    }

    pub fn sine() -> Self {
        Self::new(KernelFamily::Sine)
    }

    pub fn airy() -> Self {
        Self::new(KernelFamily::Airy)
    }

    pub fn extended_airy() -> Self {
        Self::new(KernelFamily::ExtendedAiry)
    }

    pub fn ginibre() -> Self {
        Self::new(KernelFamily::Ginibre)
    }

    pub fn bessel(a: f64) -> Result<Self, KernelError> {
        let mut spec = Self::new(KernelFamily::Bessel);
        spec.params.insert("a".into(), a);
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        match self.family {
            KernelFamily::Bessel => {
                let a = self.params.get("a").copied().unwrap_or(f64::NAN);
                if !(a >= 1.0) || !a.is_finite() {
                    return Err(KernelError::Parameter(format!(
                        "Bessel kernel requires a >= 1, got a = {a}"
                    )));
                }
                if let Some(k) = self.params.keys().find(|k| *k != "a") {
                    return Err(KernelError::Parameter(format!("unknown Bessel parameter '{k}'")));
                }
            }
            _ => {
                if let Some(k) = self.params.keys().next() {
                    return Err(KernelError::Parameter(format!(
                        "{} kernel takes no parameters, got '{k}'",
                        self.family
                    )));
                }
            }
        }
        Ok(())
    }

    /// Spatial dimension of the family's evaluation domain.
    pub fn dim(&self) -> usize {
        if self.family == KernelFamily::Ginibre {
            2
        } else {
            1
        }
    }

    fn bessel_order(&self) -> f64 {
        self.params.get("a").copied().unwrap_or(1.0) - 1.0
    }

    fn check_point(&self, p: &[f64]) -> Result<(), KernelError> {
        let ok = p.len() == self.dim()
            && p.iter().all(|c| c.is_finite())
            && (self.family != KernelFamily::Bessel || p[0] >= 0.0);
        if ok {
            Ok(())
        } else {
            Err(KernelError::Domain { family: self.family, point: p.to_vec() })
        }
    }
}

/// Evaluates `K(s, x; t, y)`. Non-extended families are equal-time and need
/// `s == t`. For the Ginibre family the value is the modulus
/// `|K(z, w)| = e^{−|z−w|²/2}/π`; see [`ginibre_kernel`] for the complex value.
pub fn eval_kernel(spec: &KernelSpec, s: f64, x: &[f64], t: f64, y: &[f64]) -> Result<f64, KernelError> {
    spec.validate()?;
    spec.check_point(x)?;
    spec.check_point(y)?;
    if spec.family != KernelFamily::ExtendedAiry && s != t {
        return Err(KernelError::TimeMismatch { family: spec.family, s, t });
    }
    Ok(match spec.family {
        KernelFamily::Sine => sine_kernel(x[0], y[0]),
        KernelFamily::Airy => airy_kernel(x[0], y[0]),
        KernelFamily::ExtendedAiry => extended_airy(s, x[0], t, y[0])?,
        KernelFamily::Bessel => bessel_kernel(spec.bessel_order(), x[0], y[0]),
        KernelFamily::Ginibre => ginibre_kernel([x[0], x[1]], [y[0], y[1]]).norm(),
    })
}

pub fn sine_kernel(x: f64, y: f64) -> f64 {
    let d = PI * (x - y);
    if d.abs() < 1e-8 {
        1.0 - d * d / 6.0
    } else {
        d.sin() / d
    }
}

pub fn airy_kernel(x: f64, y: f64) -> f64 {
    let ax = airy(x);
    if (x - y).abs() <= DIAGONAL_SWITCH {
        return ax.ai_prime * ax.ai_prime - x * ax.ai * ax.ai;
    }
    let ay = airy(y);
    (ax.ai * ay.ai_prime - ax.ai_prime * ay.ai) / (x - y)
}

/// Hard-edge Bessel kernel of order `alpha >= 0` on `[0, ∞)`.
pub fn bessel_kernel(alpha: f64, x: f64, y: f64) -> f64 {
    let (sx, sy) = (x.sqrt(), y.sqrt());
    let (jx, djx) = bessel_j_with_derivative(alpha, sx);
    if (x - y).abs() <= DIAGONAL_SWITCH {
        if x == 0.0 {
            // K(0,0) vanishes for α > 0 and equals 1/4 for α = 0.
            return if alpha == 0.0 { 0.25 } else { 0.0 };
        }
        return 0.25 * (djx * djx + (1.0 - alpha * alpha / x) * jx * jx);
    }
    let (jy, djy) = bessel_j_with_derivative(alpha, sy);
    let left = if y == 0.0 { 0.0 } else { jx * sy * djy };
    let right = if x == 0.0 { 0.0 } else { sx * djx * jy };
    (left - right) / (2.0 * (x - y))
}

/// The complex Ginibre kernel `exp(z w̄ − |z|²/2 − |w|²/2)/π`.
pub fn ginibre_kernel(z: [f64; 2], w: [f64; 2]) -> c64 {
    let z = c64::new(z[0], z[1]);
    let w = c64::new(w[0], w[1]);
    let exponent = z * w.conj() - 0.5 * z.norm_sqr() - 0.5 * w.norm_sqr();
    exponent.exp() / PI
}
