//! Approximate entropy of the posterior of the maximal mean.
//!
//! The entropy is split into a body part around the better arm's mode and a
//! tail part carried by the worse arm beyond the crossing point `θ_eq`.

use thiserror::Error;

pub mod expfam;
pub mod gaussian;

pub use expfam::{
    bernoulli_tail_weight, branch_weights, delta_abs_bernoulli, delta_abs_body, delta_max_multiarm,
    s_app_bernoulli_pair, s_app_general,
    theta_eq_general, BernoulliKl, ExpFamArm, GaussianKl, KlFamily,
};
pub use gaussian::{
    delta_simplified, increment_closed_form, s_app_at_offset, s_app_components,
    s_app_with_theta, s_body_exact, s_tail_exact, theta_eq, EntropyState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EntropyError {
    #[error("crossing point is undefined for this state")]
    UndefinedThetaEq,
    #[error("crossing point lies left of the worse arm's KL minimum")]
    NonPositiveKlSlope,
}

/// Crossing point between the body and tail regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaEq {
    Finite(f64),
    /// No usable crossing point: the tail is empty and `θ_eq` sits at the
    /// supremum of the support.
    AtSupremum,
}

impl ThetaEq {
    pub fn value(self) -> Option<f64> {
        match self {
            ThetaEq::Finite(v) => Some(v),
            ThetaEq::AtSupremum => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, ThetaEq::Finite(_))
    }
}
