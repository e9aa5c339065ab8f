//! Reference distributions.

use std::f64::consts::PI;

use statrs::function::erf::erf;

/// Semicircle density on `[−2, 2]`: `√(4 − x²)/(2π)`.
pub fn semicircle_pdf(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        0.0
    } else {
        (4.0 - x * x).sqrt() / (2.0 * PI)
    }
}

/// `1/2 + x√(4 − x²)/(4π) + arcsin(x/2)/π`.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
    }
}

/// β = 2 Wigner surmise `(32/π²) s² e^{−4s²/π}`.
pub fn surmise_pdf(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        32.0 / (PI * PI) * s * s * (-4.0 * s * s / PI).exp()
    }
}

/// `erf(2s/√π) − (4s/π) e^{−4s²/π}`.
pub fn surmise_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        erf(2.0 * s / PI.sqrt()) - 4.0 * s / PI * (-4.0 * s * s / PI).exp()
    }
}

pub fn exponential_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        -(-s).exp_m1()
    }
}

/// Radial law of the uniform distribution on the unit disk: `r²`.
pub fn disk_radial_cdf(r: f64) -> f64 {
    r.clamp(0.0, 1.0).powi(2)
}
