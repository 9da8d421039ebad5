//! Closed forms of the approximate entropy of the posterior maximum for two
//! Gaussian arms with known variance.
//!
//! Everything is written in terms of the ordered summary [`EntropyState`]
//! and the offset `d = θ_eq − μ̂_min` of the crossing point from the worse
//! arm's mean. All functions are pure.

use std::f64::consts::PI;

use libm::erfc;

use super::{EntropyError, ThetaEq};

/// Ordered two-arm summary: the empirically better arm first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyState {
    pub mean_max: f64,
    pub n_max: u64,
    pub mean_min: f64,
    pub n_min: u64,
    pub sigma2: f64,
}

impl EntropyState {
    pub fn new(mean_max: f64, n_max: u64, mean_min: f64, n_min: u64, sigma2: f64) -> Self {
        debug_assert!(mean_max >= mean_min, "arms are not ordered");
        debug_assert!(n_max >= 1 && n_min >= 1 && sigma2 > 0.0);
        Self {
            mean_max,
            n_max,
            mean_min,
            n_min,
            sigma2,
        }
    }

    pub fn gap(&self) -> f64 {
        self.mean_max - self.mean_min
    }
}

/// Crossing point where both arms are equally likely to hold the maximum,
/// from the log-balance equation with its bounded erf term dropped.
///
/// Undefined (the tail is already part of the body) when `n_max ≤ n_min`.
pub fn theta_eq(state: &EntropyState) -> ThetaEq {
    if state.n_max <= state.n_min {
        return ThetaEq::AtSupremum;
    }
    let n_max = state.n_max as f64;
    let n_min = state.n_min as f64;
    let dn = n_max - n_min;
    let gap = state.gap();
    let log_ratio = n_max.ln() - n_min.ln();
    let radicand = (n_max * n_min * gap * gap / (dn * dn) + state.sigma2 * log_ratio / dn).max(0.0);
    ThetaEq::Finite(state.mean_max + n_min * gap / dn + radicand.sqrt())
}

/// Exact tail entropy `−∫_{teq}^{∞} φ_min ln φ_min`.
pub fn s_tail_exact(state: &EntropyState, teq: f64) -> f64 {
    if teq == f64::INFINITY {
        return 0.0;
    }
    let n_min = state.n_min as f64;
    let s2 = state.sigma2;
    let d = teq - state.mean_min;
    let z = n_min.sqrt() * d / (2.0 * s2).sqrt();
    0.25 * (2.0 * PI * s2 * std::f64::consts::E / n_min).ln() * erfc(z)
        + n_min.sqrt() * d / (2.0 * (2.0 * PI * s2).sqrt()) * (-z * z).exp()
}

/// Exact body entropy `−∫ F_min φ_max ln φ_max` over the whole line.
pub fn s_body_exact(state: &EntropyState) -> f64 {
    let n_max = state.n_max as f64;
    let n_min = state.n_min as f64;
    let s2 = state.sigma2;
    let gap = state.gap();
    let z2 = n_min * n_max * gap * gap / (2.0 * s2 * (n_min + n_max));
    let lead = half_log_gauss(s2, n_max);
    lead * (1.0 - 0.5 * erfc(z2.sqrt()))
        - n_max.sqrt() * n_min.powf(1.5) * gap
            / (2.0 * s2.sqrt() * (2.0 * PI).sqrt() * (n_max + n_min).powf(1.5))
            * (-z2).exp()
}

/// Asymptotic body and tail components `(S_c^app, S_tail^app)` at the
/// state's own crossing point.
pub fn s_app_components(state: &EntropyState) -> (f64, f64) {
    s_app_with_theta(state, theta_eq(state))
}

/// Asymptotic components evaluated at an externally supplied crossing
/// point. Used when the crossing point is shifted rather than recomputed.
pub fn s_app_with_theta(state: &EntropyState, teq: ThetaEq) -> (f64, f64) {
    let offset = match teq {
        ThetaEq::Finite(t) => t - state.mean_min,
        ThetaEq::AtSupremum => f64::INFINITY,
    };
    s_app_at_offset(offset, state.n_max as f64, state.n_min as f64, state.sigma2)
}

/// `(S_c^app, S_tail^app)` as a function of `d = θ_eq − μ̂_min` and real
/// counts.
pub fn s_app_at_offset(d: f64, n_max: f64, n_min: f64, sigma2: f64) -> (f64, f64) {
    let lead = half_log_gauss(sigma2, n_max);
    if d == f64::INFINITY {
        return (lead, 0.0);
    }
    let z = n_min.sqrt() * d / (2.0 * sigma2).sqrt();
    let body = lead * (1.0 - 0.5 * erfc(z));
    let tail = n_min.sqrt() * d / (2.0 * (2.0 * PI * sigma2).sqrt()) * (-z * z).exp();
    (body, tail)
}

/// Expected one-pull changes `(Δ_max, Δ_min)` of `S_c^app + S_tail^app`,
/// with the reward predictive `N(μ̂, σ²)` and the crossing point shifted
/// linearly by the posterior-mean update.
pub fn increment_closed_form(state: &EntropyState) -> Result<(f64, f64), EntropyError> {
    let d = match theta_eq(state) {
        ThetaEq::Finite(t) => t - state.mean_min,
        ThetaEq::AtSupremum => return Err(EntropyError::UndefinedThetaEq),
    };
    let n_max = state.n_max as f64;
    let n_min = state.n_min as f64;
    let s2 = state.sigma2;
    let (body, tail) = s_app_at_offset(d, n_max, n_min, s2);

    // Pull of the better arm: d ~ N(d, σ²/(N_max+1)²).
    let inflate = 1.0 + n_min / ((n_max + 1.0) * (n_max + 1.0));
    let z_max = n_min.sqrt() * d / ((2.0 * s2).sqrt() * inflate.sqrt());
    let body_max = half_log_gauss(s2, n_max + 1.0) * (1.0 - 0.5 * erfc(z_max));
    let tail_max = (-n_min * d * d / (2.0 * s2 * inflate)).exp()
        * (n_min / (8.0 * PI * s2)).sqrt()
        * d
        / inflate.powf(1.5);

    // Pull of the worse arm: d ~ N(d, σ²/(N_min+1)²) and N_min → N_min + 1.
    let n1 = n_min + 1.0;
    let n2 = n_min + 2.0;
    let z_min = n1 * d / (2.0 * s2 * n2).sqrt();
    let body_min = half_log_gauss(s2, n_max) * (1.0 - 0.5 * erfc(z_min));
    let tail_min = (-n1 * n1 * d * d / (2.0 * s2 * n2)).exp() * n1 * n1 * d
        / ((8.0 * PI * s2).sqrt() * n2.powf(1.5));

    Ok((
        body_max - body + tail_max - tail,
        body_min - body + tail_min - tail,
    ))
}

/// First-order expansion of `Δ_max − Δ_min` for `N_max ≫ N_min ≫ 1`.
/// Negative values favour the better arm.
///
/// With no crossing point (`n_max ≤ n_min`) every gap-dependent term
/// vanishes and only `½ ln(N_max/(N_max+1))` remains.
pub fn delta_simplified(state: &EntropyState) -> f64 {
    let n_max = state.n_max as f64;
    let lead = 0.5 * (n_max.ln() - (n_max + 1.0).ln());
    let d = match theta_eq(state) {
        ThetaEq::Finite(t) => t - state.mean_min,
        ThetaEq::AtSupremum => return lead,
    };
    let n_min = state.n_min as f64;
    let s2 = state.sigma2;
    let z = n_min.sqrt() * d / (2.0 * s2).sqrt();
    let bump = n_min.sqrt() * d / (2.0 * PI * s2).sqrt() * (-z * z).exp();
    if bump == 0.0 {
        return lead + erfc(z) / (4.0 * n_max);
    }
    let r2 = n_min / (n_max * n_max);
    let bracket = 0.25 * (n_max / (2.0 * PI * s2 * std::f64::consts::E)).ln() * (1.0 / (n_min * n_min) + r2)
        + 1.0 / (2.0 * n_min)
        - 0.75 * r2
        + (n_min * r2 + 1.0 / n_min) * d * d / (4.0 * s2);
    lead + erfc(z) / (4.0 * n_max) + bump * bracket
}

/// `½ ln(2πσ²e/n)`: entropy of `N(·, σ²/n)`.
#[inline]
fn half_log_gauss(sigma2: f64, n: f64) -> f64 {
    0.5 * (2.0 * PI * sigma2 * std::f64::consts::E / n).ln()
}
