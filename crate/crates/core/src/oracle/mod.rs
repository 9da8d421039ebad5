//! Numerical reference values: density and entropy of the posterior of the
//! maximal mean, expected one-pull entropy changes and the body/tail
//! partition, all by adaptive quadrature.

use std::f64::consts::{E, PI};

use libm::erfc;
use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::gamma::digamma;
use thiserror::Error;

mod quadrature;

pub use quadrature::{gauss_hermite, integrate};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("quadrature did not converge after {panels} panels (error estimate {error_estimate:e})")]
    NotConverged { panels: usize, error_estimate: f64 },
    #[error("posterior set is empty")]
    Empty,
    #[error("posterior {index} is invalid: {reason}")]
    InvalidPosterior { index: usize, reason: &'static str },
    #[error("posterior set mixes Gaussian and Beta families")]
    MixedFamilies,
    #[error("operation needs Gaussian posteriors")]
    NotGaussian,
    #[error("operation needs exactly two posteriors, got {0}")]
    NotTwoArms(usize),
    #[error("arm {arm} out of range for {count} posteriors")]
    ArmOutOfRange { arm: usize, count: usize },
}

/// One arm's posterior on its mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Posterior {
    Gaussian { mean: f64, variance: f64 },
    Beta { alpha: f64, beta: f64 },
}

impl Posterior {
    pub fn mean(&self) -> f64 {
        match *self {
            Posterior::Gaussian { mean, .. } => mean,
            Posterior::Beta { alpha, beta } => alpha / (alpha + beta),
        }
    }

    pub fn std_dev(&self) -> f64 {
        match *self {
            Posterior::Gaussian { variance, .. } => variance.sqrt(),
            Posterior::Beta { alpha, beta } => {
                let s = alpha + beta;
                (alpha * beta / (s * s * (s + 1.0))).sqrt()
            }
        }
    }

    fn mode(&self) -> f64 {
        match *self {
            Posterior::Gaussian { mean, .. } => mean,
            Posterior::Beta { alpha, beta } if alpha + beta > 2.0 => (alpha - 1.0) / (alpha + beta - 2.0),
            Posterior::Beta { .. } => 0.5,
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Posterior::Gaussian { mean, variance } => {
                let d = x - mean;
                (-d * d / (2.0 * variance)).exp() / (2.0 * PI * variance).sqrt()
            }
            Posterior::Beta { alpha, beta } => {
                if !(0.0..=1.0).contains(&x) {
                    return 0.0;
                }
                let head = if alpha == 1.0 { 0.0 } else { (alpha - 1.0) * x.ln() };
                let tail = if beta == 1.0 { 0.0 } else { (beta - 1.0) * (1.0 - x).ln() };
                (head + tail - ln_beta(alpha, beta)).exp()
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Posterior::Gaussian { mean, variance } => 0.5 * erfc(-(x - mean) / (2.0 * variance).sqrt()),
            Posterior::Beta { alpha, beta } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    beta_reg(alpha, beta, x)
                }
            }
        }
    }

    fn is_gaussian(&self) -> bool {
        matches!(self, Posterior::Gaussian { .. })
    }
}

/// Posteriors of all arms; every member belongs to the same family.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSet {
    posteriors: Vec<Posterior>,
}

impl PosteriorSet {
    pub fn new(posteriors: Vec<Posterior>) -> Result<Self, OracleError> {
        let first = posteriors.first().ok_or(OracleError::Empty)?;
        for (index, p) in posteriors.iter().enumerate() {
            if p.is_gaussian() != first.is_gaussian() {
                return Err(OracleError::MixedFamilies);
            }
            match *p {
                Posterior::Gaussian { mean, variance } => {
                    if !(variance > 0.0 && variance.is_finite()) {
                        return Err(OracleError::InvalidPosterior { index, reason: "variance must be positive" });
                    }
                    if !mean.is_finite() {
                        return Err(OracleError::InvalidPosterior { index, reason: "mean must be finite" });
                    }
                }
                Posterior::Beta { alpha, beta } => {
                    if !(alpha >= 1.0 && beta >= 1.0 && alpha.is_finite() && beta.is_finite()) {
                        return Err(OracleError::InvalidPosterior { index, reason: "Beta shapes must be at least 1" });
                    }
                }
            }
        }
        Ok(Self { posteriors })
    }

    /// Gaussian set from `(mean, variance)` pairs.
    pub fn gaussian(pairs: &[(f64, f64)]) -> Result<Self, OracleError> {
        Self::new(
            pairs
                .iter()
                .map(|&(mean, variance)| Posterior::Gaussian { mean, variance })
                .collect(),
        )
    }

    /// Beta set from `(alpha, beta)` pairs.
    pub fn beta(pairs: &[(f64, f64)]) -> Result<Self, OracleError> {
        Self::new(pairs.iter().map(|&(alpha, beta)| Posterior::Beta { alpha, beta }).collect())
    }

    pub fn posteriors(&self) -> &[Posterior] {
        &self.posteriors
    }

    pub fn len(&self) -> usize {
        self.posteriors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posteriors.is_empty()
    }

    fn is_gaussian(&self) -> bool {
        self.posteriors[0].is_gaussian()
    }

    /// Sorted integration breakpoints: the domain ends plus each mode
    /// offset by 2, 5 and the truncation width in standard deviations.
    fn breakpoints(&self, truncation: f64) -> Vec<f64> {
        let (lo, hi) = self.domain(truncation);
        let mut pts = vec![lo, hi];
        for p in &self.posteriors {
            let (m, s) = (p.mode(), p.std_dev());
            for k in [0.0, 2.0, 5.0, truncation] {
                pts.push(m - k * s);
                pts.push(m + k * s);
            }
        }
        let mut pts: Vec<f64> = pts.into_iter().filter(|x| (lo..=hi).contains(x)).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn domain(&self, truncation: f64) -> (f64, f64) {
        if !self.is_gaussian() {
            return (0.0, 1.0);
        }
        self.posteriors.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            let (m, s) = (p.mean(), p.std_dev());
            (lo.min(m - truncation * s), hi.max(m + truncation * s))
        })
    }
}

/// Tolerances and truncation of the adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Half-width of the integration window for unbounded supports, in
    /// posterior standard deviations around each mode.
    pub truncation: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
            truncation: 10.0,
        }
    }
}

/// Density of the largest mean: `Σ_k p_k(θ) Π_{j≠k} F_j(θ)`.
pub fn pmax_density(theta: f64, set: &PosteriorSet) -> f64 {
    let ps = set.posteriors();
    let mut total = 0.0;
    for (k, pk) in ps.iter().enumerate() {
        let mut term = pk.pdf(theta);
        for (j, pj) in ps.iter().enumerate() {
            if term == 0.0 {
                break;
            }
            if j != k {
                term *= pj.cdf(theta);
            }
        }
        total += term;
    }
    total
}

/// `−p ln p`, taken as zero where the density underflows.
#[inline]
fn neg_p_log_p(p: f64) -> f64 {
    if p < 1e-300 {
        0.0
    } else {
        -p * p.ln()
    }
}

/// Integral of the max density over the working domain; should be 1.
pub fn pmax_mass(set: &PosteriorSet, spec: &QuadratureSpec) -> Result<f64, OracleError> {
    integrate(|t| pmax_density(t, set), &set.breakpoints(spec.truncation), spec)
}

/// Differential entropy `−∫ p_max ln p_max` of the largest mean.
pub fn smax_exact(set: &PosteriorSet, spec: &QuadratureSpec) -> Result<f64, OracleError> {
    integrate(|t| neg_p_log_p(pmax_density(t, set)), &set.breakpoints(spec.truncation), spec)
}

/// Expected change of [`smax_exact`] after one more pull of `arm`, with a
/// `N(mean_arm, σ²)` reward predictive integrated by 40-point
/// Gauss–Hermite.
pub fn expected_increment_exact(
    set: &PosteriorSet,
    arm: usize,
    sigma2: f64,
    spec: &QuadratureSpec,
) -> Result<f64, OracleError> {
    expected_increment_with_nodes(set, arm, sigma2, spec, 40)
}

/// [`expected_increment_exact`] with an explicit Gauss–Hermite node count.
pub fn expected_increment_with_nodes(
    set: &PosteriorSet,
    arm: usize,
    sigma2: f64,
    spec: &QuadratureSpec,
    nodes: usize,
) -> Result<f64, OracleError> {
    if !set.is_gaussian() {
        return Err(OracleError::NotGaussian);
    }
    let Some(&Posterior::Gaussian { mean, variance }) = set.posteriors().get(arm) else {
        return Err(OracleError::ArmOutOfRange { arm, count: set.len() });
    };
    let n = sigma2 / variance;
    let now = smax_exact(set, spec)?;
    let (x, w) = gauss_hermite(nodes);
    let scale = (2.0 * sigma2).sqrt();
    let mut posteriors = set.posteriors().to_vec();
    let mut expected = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let reward = mean + scale * xi;
        posteriors[arm] = Posterior::Gaussian {
            mean: (mean * n + reward) / (n + 1.0),
            variance: sigma2 / (n + 1.0),
        };
        let updated = PosteriorSet { posteriors: posteriors.clone() };
        expected += wi * smax_exact(&updated, spec)?;
    }
    Ok(expected / PI.sqrt() - now)
}

/// Body and tail integrals of a two-arm set:
/// `(−∫ F_min p_max ln p_max, −∫_{teq}^{sup} p_min ln p_min)`.
///
/// The arm with the larger posterior mean plays the role of the maximum.
pub fn partition_integrals(
    set: &PosteriorSet,
    teq: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64), OracleError> {
    let [a, b] = set.posteriors() else {
        return Err(OracleError::NotTwoArms(set.len()));
    };
    let (best, worse) = if a.mean() >= b.mean() { (a, b) } else { (b, a) };
    let breaks = set.breakpoints(spec.truncation);
    let body = integrate(
        |t| {
            let p = best.pdf(t);
            if p < 1e-300 {
                0.0
            } else {
                -worse.cdf(t) * p * p.ln()
            }
        },
        &breaks,
        spec,
    )?;
    let (_, hi) = set.domain(spec.truncation);
    let tail = if teq >= hi {
        0.0
    } else {
        let mut tail_breaks: Vec<f64> = breaks.iter().copied().filter(|&x| x > teq).collect();
        tail_breaks.insert(0, teq);
        integrate(|t| neg_p_log_p(worse.pdf(t)), &tail_breaks, spec)?
    };
    Ok((body, tail))
}

/// Differential entropy of a single posterior.
pub fn single_entropy(p: &Posterior) -> f64 {
    match *p {
        Posterior::Gaussian { variance, .. } => 0.5 * (2.0 * PI * E * variance).ln(),
        Posterior::Beta { alpha, beta } => {
            ln_beta(alpha, beta) - (alpha - 1.0) * digamma(alpha) - (beta - 1.0) * digamma(beta)
                + (alpha + beta - 2.0) * digamma(alpha + beta)
        }
    }
}
