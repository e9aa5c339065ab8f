use std::sync::OnceLock;

use super::KernelError;
use crate::special::{airy, GaussLegendre};

/// Target bound on the discarded tail of every extended-Airy integral.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Past this `u` on the decaying side, `Ai(u + x)^2` is below `1e-14`.
const DECAY_POINT: f64 = 8.0;
/// Largest `|u|` the `t < s` branch integrates to before giving up.
const MAX_CUTOFF: f64 = 2000.0;
/// `sup_z |Ai(-z)| z^{1/4}` is `1/√π` asymptotically; padded.
const OSCILLATORY_AMPLITUDE: f64 = 0.6;
const PANEL_ORDER: usize = 20;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PANEL_ORDER).expect("nonzero order"))
}

/// Panel width resolving the oscillation of `Ai(z)` for `z < 0`.
fn panel_width(z: f64) -> f64 {
    if z >= -1.0 {
        1.0
    } else {
        (2.0 / (-z).sqrt()).min(1.0)
    }
}

/// Nodes and weights in `u` (including the `e^{−u(t−s)/2}` factor and the
/// branch sign) for points whose coordinates lie in `[lo, hi]`.
fn u_quadrature(s: f64, t: f64, lo: f64, hi: f64) -> Result<(Vec<f64>, Vec<f64>), KernelError> {
    let gap = t - s;
    let gl = rule();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut push_panel = |a: f64, b: f64, sign: f64| {
        for (u, w) in gl.mapped(a, b) {
            nodes.push(u);
            weights.push(sign * w * (-0.5 * u * gap).exp());
        }
    };
    if gap >= 0.0 {
        // Ai is decreasing past its first maximum, so the product is bounded
        // by Ai(u + lo)^2 once u + lo > DECAY_POINT.
        let end = (DECAY_POINT - lo).max(2.0);
        let mut u = 0.0;
        while u < end {
            let h = panel_width(u + lo).min(end - u);
            push_panel(u, u + h, 1.0);
            u += h;
        }
    } else {
        let decay = -gap;
        // |Ai(u+x) Ai(u+y)| <= A^2 |u + hi|^{-1/2} for u < -hi - 1, so the tail
        // beyond -U is at most A^2 (U - hi)^{-1/2} (2/decay) e^{-U decay/2}.
        let bound = |cut: f64| {
            OSCILLATORY_AMPLITUDE.powi(2) / (cut - hi).max(1.0).sqrt() * (2.0 / decay)
                * (-0.5 * cut * decay).exp()
        };
        let mut cut = (hi + 1.0).max(1.0);
        while bound(cut) > TAIL_TOLERANCE {
            cut *= 1.25;
            if cut > MAX_CUTOFF {
                return Err(KernelError::Divergent {
                    gap,
                    bound: bound(MAX_CUTOFF),
                    cutoff: MAX_CUTOFF,
                });
            }
        }
        let mut u = 0.0;
        while u > -cut {
            let h = panel_width(u + lo).min(u + cut);
            push_panel(u - h, u, -1.0);
            u -= h;
        }
    }
    Ok((nodes, weights))
}

/// The extended Airy kernel `K(s, x; t, y)`. At `t == s` the `t >= s` branch
/// is used and the value coincides with the equal-time Airy kernel.
pub fn extended_airy(s: f64, x: f64, t: f64, y: f64) -> Result<f64, KernelError> {
    Ok(extended_airy_matrix(s, t, &[x], &[y])?[0])
}

/// Row-major matrix `K(s, xs[i]; t, ys[j])`, sharing one `u` quadrature and
/// one Airy table across all entries.
pub fn extended_airy_matrix(s: f64, t: f64, xs: &[f64], ys: &[f64]) -> Result<Vec<f64>, KernelError> {
    if xs.is_empty() || ys.is_empty() {
        return Ok(Vec::new());
    }
    let lo = xs.iter().chain(ys).copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().chain(ys).copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite() && s.is_finite() && t.is_finite()) {
        return Err(KernelError::Parameter("non-finite extended Airy argument".into()));
    }
    let (nodes, weights) = u_quadrature(s, t, lo, hi)?;
    let table = |pts: &[f64]| -> Vec<Vec<f64>> {
        pts.iter()
            .map(|&p| nodes.iter().map(|&u| airy(u + p).ai).collect())
            .collect()
    };
    let ax = table(xs);
    let ay = if xs == ys { ax.clone() } else { table(ys) };
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for row in &ax {
        for col in &ay {
            let v: f64 = row
                .iter()
                .zip(col)
                .zip(&weights)
                .map(|((a, b), w)| w * a * b)
                .sum();
            out.push(v);
        }
    }
    Ok(out)
}
