//! Airy function of the first kind and its derivative.
//!
//! Three regimes:
//!
//! * `x >= 10`: the exponentially small asymptotic expansion, optimally
//!   truncated (its smallest term is below `1e-18` relative there),
//! * `x <= -20`: the oscillatory asymptotic expansion,
//! * in between: a table of `(Ai, Ai')` on a grid of spacing 1/4, built once
//!   by Taylor-stepping the Airy equation `y'' = x y`, from which any point is
//!   reached by one Taylor step of length at most 1/8.
//!
//! The table is stepped leftwards from `x = 0` (closed-form values) over the
//! oscillatory half line, and leftwards from the asymptotic value at `x = 10`
//! over the decaying half line. Both directions are numerically stable: in
//! the oscillatory region errors grow only linearly, and on the right the
//! recessive solution is the one growing in the stepping direction.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

/// `Ai(0) = 3^{-2/3} / Γ(2/3)`.
pub const AI_ZERO: f64 = 0.355_028_053_887_817_239_26;
/// `Ai'(0) = -3^{-1/3} / Γ(1/3)`.
pub const AI_PRIME_ZERO: f64 = -0.258_819_403_792_806_798_41;

const TABLE_LO: f64 = -20.0;
const TABLE_HI: f64 = 10.0;
const TABLE_STEP: f64 = 0.25;
/// Beyond this `2/3 x^{3/2}` the factor `e^{-ζ}` is subnormal.
const ZETA_UNDERFLOW: f64 = 700.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AiryValue {
    pub ai: f64,
    pub ai_prime: f64,
    /// Set when both values underflowed to zero (`x` above roughly 104).
    pub underflow: bool,
}

impl AiryValue {
    fn new(ai: f64, ai_prime: f64) -> Self {
        Self { ai, ai_prime, underflow: false }
    }
}

/// `Ai(x)` and `Ai'(x)`. Relative accuracy is about `1e-13` on the decaying
/// side; on the oscillatory side errors are of that size relative to the
/// envelope `|x|^{-1/4}/√π`.
pub fn airy(x: f64) -> AiryValue {
    if x.is_nan() {
        return AiryValue::new(f64::NAN, f64::NAN);
    }
    if x >= TABLE_HI {
        return asymptotic_positive(x);
    }
    if x <= TABLE_LO {
        return asymptotic_negative(-x);
    }
    let table = table();
    let k = ((x - TABLE_LO) / TABLE_STEP).round() as usize;
    let x0 = TABLE_LO + TABLE_STEP * k as f64;
    let (y, dy) = table[k];
    let (ai, ai_prime) = taylor_step(x0, y, dy, x - x0);
    AiryValue::new(ai, ai_prime)
}

fn table() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n_left = ((-TABLE_LO) / TABLE_STEP).round() as usize;
        let n_right = (TABLE_HI / TABLE_STEP).round() as usize;
        let mut out = vec![(0.0, 0.0); n_left + n_right + 1];
        out[n_left] = (AI_ZERO, AI_PRIME_ZERO);
        let (mut y, mut dy) = (AI_ZERO, AI_PRIME_ZERO);
        for k in 1..=n_left {
            let x0 = -TABLE_STEP * (k - 1) as f64;
            (y, dy) = taylor_step(x0, y, dy, -TABLE_STEP);
            out[n_left - k] = (y, dy);
        }
        let start = asymptotic_positive(TABLE_HI);
        let (mut y, mut dy) = (start.ai, start.ai_prime);
        out[n_left + n_right] = (y, dy);
        for k in 1..n_right {
            let x0 = TABLE_HI - TABLE_STEP * (k - 1) as f64;
            (y, dy) = taylor_step(x0, y, dy, -TABLE_STEP);
            out[n_left + n_right - k] = (y, dy);
        }
        out
    })
}

/// Advances `(y, y')` of a solution of `y'' = x y` from `x0` to `x0 + h` by
/// summing the Taylor series until it has converged to machine precision.
fn taylor_step(x0: f64, y0: f64, dy0: f64, h: f64) -> (f64, f64) {
    if h == 0.0 {
        return (y0, dy0);
    }
    // d[n] = c_n h^n where c_n are the Taylor coefficients at x0:
    // c_{n+2} (n+2)(n+1) = x0 c_n + c_{n-1}.
    let (a, b) = (x0 * h * h, h * h * h);
    let mut d_prev2 = 0.0; // d_{n-1}
    let mut d_prev = y0; // d_n
    let mut d_cur = dy0 * h; // d_{n+1}
    let mut y = y0 + d_cur;
    let mut dy_h = d_cur; // h * y'(x0 + h)
    let scale = y0.abs() + (dy0 * h).abs();
    let mut n = 0usize;
    let mut small_run = 0;
    while n < 200 {
        let d_next = (a * d_prev + b * d_prev2) / ((n + 2) as f64 * (n + 1) as f64);
        y += d_next;
        dy_h += (n + 2) as f64 * d_next;
        if d_next.abs() <= 1e-18 * scale.max(y.abs()) {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
        d_prev2 = d_prev;
        d_prev = d_cur;
        d_cur = d_next;
        n += 1;
    }
    (y, dy_h / h)
}

/// Ratio `u_k / u_{k-1}` of the Airy asymptotic coefficients.
fn u_ratio(k: usize) -> f64 {
    let k = k as f64;
    (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k)
}

fn asymptotic_positive(x: f64) -> AiryValue {
    let sqrt_x = x.sqrt();
    let zeta = 2.0 / 3.0 * x * sqrt_x;
    if zeta > ZETA_UNDERFLOW {
        return AiryValue { ai: 0.0, ai_prime: 0.0, underflow: true };
    }
    // Σ (-1)^k u_k ζ^{-k} and Σ (-1)^k v_k ζ^{-k}, v_k = -(6k+1)/(6k-1) u_k.
    let mut su = 1.0;
    let mut sv = 1.0;
    let mut term = 1.0; // (-1)^k u_k ζ^{-k}
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let next = -term * u_ratio(k) / zeta;
        if next.abs() >= last || next.abs() < 1e-18 {
            break;
        }
        last = next.abs();
        term = next;
        su += term;
        let kf = k as f64;
        sv -= term * (6.0 * kf + 1.0) / (6.0 * kf - 1.0);
    }
    let e = (-zeta).exp();
    let q = x.powf(0.25);
    let norm = 0.5 / PI.sqrt();
    AiryValue::new(norm * e / q * su, -norm * q * e * sv)
}

/// Oscillatory expansion for `Ai(-z)`, `Ai'(-z)` with `z` large.
fn asymptotic_negative(z: f64) -> AiryValue {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    // Even/odd partial sums of Σ (-1)^k u_{2k} ζ^{-2k} etc.
    let mut u_even = 1.0;
    let mut u_odd = 0.0;
    let mut v_even = 1.0;
    let mut v_odd = 0.0;
    let mut uk = 1.0; // u_k ζ^{-k}
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let next = uk * u_ratio(k) / zeta;
        if next >= last || next < 1e-18 {
            break;
        }
        last = next;
        uk = next;
        let kf = k as f64;
        let vk = -uk * (6.0 * kf + 1.0) / (6.0 * kf - 1.0);
        // sign (-1)^{floor(k/2)}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            u_even += sign * uk;
            v_even += sign * vk;
        } else {
            u_odd += sign * uk;
            v_odd += sign * vk;
        }
    }
    let phase = zeta - FRAC_PI_4;
    let (s, c) = phase.sin_cos();
    let q = z.powf(0.25);
    let inv_sqrt_pi = 1.0 / PI.sqrt();
    AiryValue::new(
        inv_sqrt_pi / q * (c * u_even + s * u_odd),
        inv_sqrt_pi * q * (s * v_even - c * v_odd),
    )
}
