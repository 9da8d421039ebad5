//! Exponential-family form of the approximate entropy, with the Bernoulli
//! two-arm and K-arm increments built on it.
//!
//! Posteriors are summarized by a centre, an effective count and a variance
//! `V ≈ 1/(n F''(μ))`. For Bernoulli arms the centre is the Beta posterior
//! mean and the effective count is `pulls + 3`.

use std::f64::consts::PI;

use super::{EntropyError, ThetaEq};
use crate::posterior::{kl_bernoulli_interior, BetaPosterior};

/// Gaussian-limit summary of one arm's posterior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFamArm {
    pub mean_hat: f64,
    pub n_eff: u64,
    pub variance: f64,
}

impl ExpFamArm {
    pub fn gaussian(mean: f64, pulls: u64, sigma2: f64) -> Self {
        Self {
            mean_hat: mean,
            n_eff: pulls,
            variance: sigma2 / pulls as f64,
        }
    }

    pub fn bernoulli(post: &BetaPosterior) -> Self {
        Self {
            mean_hat: post.mean_b,
            n_eff: post.n_b,
            variance: post.variance(),
        }
    }
}

/// KL divergence of a one-parameter family and its derivative in the
/// second argument.
pub trait KlFamily {
    fn kl(&self, from: f64, to: f64) -> f64;
    fn kl_d2(&self, from: f64, to: f64) -> f64;
    /// Upper end of the mean parameter's support.
    fn sup(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKl {
    pub sigma2: f64,
}

impl KlFamily for GaussianKl {
    fn kl(&self, from: f64, to: f64) -> f64 {
        let d = to - from;
        d * d / (2.0 * self.sigma2)
    }

    fn kl_d2(&self, from: f64, to: f64) -> f64 {
        (to - from) / self.sigma2
    }

    fn sup(&self) -> f64 {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BernoulliKl;

impl KlFamily for BernoulliKl {
    fn kl(&self, from: f64, to: f64) -> f64 {
        kl_bernoulli_interior(from, to)
    }

    fn kl_d2(&self, from: f64, to: f64) -> f64 {
        (to - from) / (to * (1.0 - to))
    }

    fn sup(&self) -> f64 {
        1.0
    }
}

/// Crossing point from the balance equation with the worse arm's KL frozen
/// at the better mean and the better arm's KL expanded to second order.
///
/// A value at or beyond the support's supremum is reported as
/// [`ThetaEq::AtSupremum`]. The count guard `n_max ≤ n_min` is applied by
/// the callers that need it.
pub fn theta_eq_general<K: KlFamily>(arm_max: &ExpFamArm, arm_min: &ExpFamArm, kl: &K) -> ThetaEq {
    let bracket = arm_min.n_eff as f64 * kl.kl(arm_min.mean_hat, arm_max.mean_hat)
        + 0.5 * (arm_min.variance / arm_max.variance).ln();
    let value = arm_max.mean_hat + (2.0 * arm_max.variance * bracket.max(0.0)).sqrt();
    if value >= kl.sup() {
        ThetaEq::AtSupremum
    } else {
        ThetaEq::Finite(value)
    }
}

/// Approximate entropy `S_c^app + S_tail^app` for a general family at the
/// crossing point `teq`.
pub fn s_app_general<K: KlFamily>(
    arm_max: &ExpFamArm,
    arm_min: &ExpFamArm,
    teq: f64,
    kl: &K,
) -> Result<f64, EntropyError> {
    let k = kl.kl(arm_min.mean_hat, teq);
    let slope = kl.kl_d2(arm_min.mean_hat, teq);
    if !(slope > 0.0) {
        return Err(EntropyError::NonPositiveKlSlope);
    }
    let n = arm_min.n_eff as f64;
    let norm = (2.0 * PI * arm_min.variance).sqrt();
    let decay = (-n * k).exp();
    let body = 0.5 * (2.0 * PI * arm_max.variance).ln() * (1.0 - decay / (n * slope * norm));
    let tail = k * decay / (slope * norm);
    Ok(body + tail)
}

/// Leading body term `½ ln(2π μ̃(1−μ̃)/ñ)` of a Beta posterior.
#[inline]
fn body_entropy(post: &BetaPosterior) -> f64 {
    0.5 * (2.0 * PI * post.variance()).ln()
}

/// Approximate entropy of a two-arm Bernoulli state. Arms are ordered by
/// posterior mean (ties: fewer pulls is the better arm); without a usable
/// crossing point only the better arm's body term remains.
pub fn s_app_bernoulli_pair(a: &BetaPosterior, b: &BetaPosterior) -> f64 {
    let a_leads = a.mean_b > b.mean_b || (a.mean_b == b.mean_b && a.n_b <= b.n_b);
    let (best, worse) = if a_leads { (a, b) } else { (b, a) };
    let head = body_entropy(best);
    if best.n_b <= worse.n_b {
        return head;
    }
    let arm_max = ExpFamArm::bernoulli(best);
    let arm_min = ExpFamArm::bernoulli(worse);
    match theta_eq_general(&arm_max, &arm_min, &BernoulliKl) {
        ThetaEq::Finite(teq) => s_app_general(&arm_max, &arm_min, teq, &BernoulliKl).unwrap_or(head),
        ThetaEq::AtSupremum => head,
    }
}

/// Two-point mixture weights `(P[X=1], P[X=0])` of the next Bernoulli reward.
pub fn branch_weights(post: &BetaPosterior) -> (f64, f64) {
    let n = post.n_b as f64;
    let m = post.mean_b;
    ((m * (n - 1.0) - 1.0) / (n - 3.0), (n - 2.0 - m * (n - 1.0)) / (n - 3.0))
}

/// Absolute expected change of the two-arm approximate entropy when `arm`
/// is pulled once more, against the fixed `other` arm.
pub fn delta_abs_bernoulli(arm: &BetaPosterior, other: &BetaPosterior) -> f64 {
    let (w1, w0) = branch_weights(arm);
    let now = s_app_bernoulli_pair(arm, other);
    let mut expected = 0.0;
    if w1 > 0.0 {
        expected += w1 * s_app_bernoulli_pair(&arm.updated(true), other);
    }
    if w0 > 0.0 {
        expected += w0 * s_app_bernoulli_pair(&arm.updated(false), other);
    }
    (expected - now).abs()
}

/// Tail weight `e^{−ñK}/(√ñ ∂₂K √(2π μ̃(1−μ̃)))` that a worse arm removes
/// from the best arm's body term; zero without a usable crossing point.
pub fn bernoulli_tail_weight(best: &BetaPosterior, arm: &BetaPosterior) -> f64 {
    if best.n_b <= arm.n_b {
        return 0.0;
    }
    let arm_max = ExpFamArm::bernoulli(best);
    let arm_min = ExpFamArm::bernoulli(arm);
    let ThetaEq::Finite(teq) = theta_eq_general(&arm_max, &arm_min, &BernoulliKl) else {
        return 0.0;
    };
    let k = BernoulliKl.kl(arm.mean_b, teq);
    let slope = BernoulliKl.kl_d2(arm.mean_b, teq);
    if !(slope > 0.0) {
        return 0.0;
    }
    let n = arm.n_b as f64;
    (-n * k).exp() / (n.sqrt() * slope * (2.0 * PI * arm.mean_b * (1.0 - arm.mean_b)).sqrt())
}

/// Absolute expected change of the best arm's body term `H(μ̃, ñ)` after
/// one more pull.
pub fn delta_abs_body(best: &BetaPosterior) -> f64 {
    let (w1, w0) = branch_weights(best);
    let mut expected = 0.0;
    if w1 > 0.0 {
        expected += w1 * body_entropy(&best.updated(true));
    }
    if w0 > 0.0 {
        expected += w0 * body_entropy(&best.updated(false));
    }
    (expected - body_entropy(best)).abs()
}

/// Increment along the best arm for K Bernoulli arms, with every worse
/// arm's crossing point frozen.
pub fn delta_max_multiarm(arms: &[BetaPosterior], max_index: usize) -> f64 {
    let best = &arms[max_index];
    let removed: f64 = arms
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != max_index)
        .map(|(_, arm)| bernoulli_tail_weight(best, arm))
        .sum();
    (1.0 - removed).abs() * delta_abs_body(best)
}
