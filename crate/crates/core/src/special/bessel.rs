//! Bessel functions of the first kind `J_ν(z)` for real order `ν >= 0` and
//! real argument `z >= 0`.
//!
//! Small arguments use the power series; larger ones use Schläfli's integral
//!
//! ```text
//! J_ν(z) = (1/π) ∫_0^π cos(νθ − z sin θ) dθ − (sin νπ / π) ∫_0^∞ e^{−z sinh t − νt} dt
//! ```
//!
//! integrated by composite Gauss–Legendre.

use std::f64::consts::PI;
use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

use super::quadrature::GaussLegendre;

const SERIES_LIMIT: f64 = 6.0;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(24).expect("nonzero order"))
}

pub fn bessel_j(nu: f64, z: f64) -> f64 {
    bessel_j_with_derivative(nu, z).0
}

/// `(J_ν(z), J_ν'(z))`. Returns NaN for `ν < 0` or `z < 0`.
pub fn bessel_j_with_derivative(nu: f64, z: f64) -> (f64, f64) {
    if !(nu >= 0.0 && z >= 0.0) {
        return (f64::NAN, f64::NAN);
    }
    if z == 0.0 {
        return match nu {
            0.0 => (1.0, 0.0),
            1.0 => (0.0, 0.5),
            n if n < 1.0 => (0.0, f64::INFINITY),
            _ => (0.0, 0.0),
        };
    }
    if z <= SERIES_LIMIT {
        series(nu, z)
    } else {
        schlafli(nu, z)
    }
}

fn series(nu: f64, z: f64) -> (f64, f64) {
    let half = 0.5 * z;
    let log_half = half.ln();
    // term_k = (-1)^k (z/2)^{2k+ν} / (k! Γ(k+ν+1))
    let mut term = (nu * log_half - ln_gamma(nu + 1.0)).exp();
    let mut j = term;
    let mut dj = 0.5 * nu * term / half;
    let q = half * half;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * (kf + nu));
        j += term;
        dj += 0.5 * (2.0 * kf + nu) * term / half;
        if term.abs() < 1e-18 * j.abs().max(1e-300) && k > 2 {
            break;
        }
    }
    (j, dj)
}

fn schlafli(nu: f64, z: f64) -> (f64, f64) {
    let gl = rule();
    let panels = (z / 2.0).ceil() as usize + 4;
    let j1 = gl.integrate_composite(0.0, PI, panels, |th| (nu * th - z * th.sin()).cos()) / PI;
    let d1 = gl.integrate_composite(0.0, PI, panels, |th| th.sin() * (nu * th - z * th.sin()).sin())
        / PI;
    let s = (nu * PI).sin();
    if s == 0.0 {
        return (j1, d1);
    }
    // e^{-z sinh t} < 1e-20 beyond t_max.
    let t_max = (46.0 / z).asinh();
    let tail = |f: &dyn Fn(f64) -> f64| gl.integrate_composite(0.0, t_max, 8, f);
    let j2 = tail(&|t: f64| (-z * t.sinh() - nu * t).exp());
    let d2 = tail(&|t: f64| t.sinh() * (-z * t.sinh() - nu * t).exp());
    (j1 - s / PI * j2, d1 + s / PI * d2)
}
