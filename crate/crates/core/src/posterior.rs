//! Arm statistics, posterior parameterizations and divergences.
//!
//! Rewards are tracked as a running sum plus a pull count so that Bernoulli
//! bookkeeping stays exact; means are always derived, never accumulated.

use thiserror::Error;

/// Errors raised by posterior construction and divergence evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PosteriorError {
    #[error("arm has not been pulled yet")]
    Unpulled,
    #[error("cumulative reward {cum} is not a Bernoulli count for {pulls} pulls")]
    NotBernoulli { cum: f64, pulls: u64 },
    #[error("Bernoulli KL undefined for p={p}, q={q}")]
    KlDomain { p: f64, q: f64 },
    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),
}

/// Reward distribution family of a bandit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RewardFamily {
    /// Gaussian rewards with a known common variance.
    Gaussian,
    /// Rewards in {0, 1}.
    Bernoulli,
}

/// Pull count and reward sum of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ArmStats {
    pulls: u64,
    cum_reward: f64,
}

impl ArmStats {
    pub const fn new() -> Self {
        Self {
            pulls: 0,
            cum_reward: 0.0,
        }
    }

    /// Builds statistics from a known count and reward sum.
    pub const fn from_parts(pulls: u64, cum_reward: f64) -> Self {
        Self { pulls, cum_reward }
    }

    pub fn pulls(&self) -> u64 {
        self.pulls
    }

    pub fn cum_reward(&self) -> f64 {
        self.cum_reward
    }

    /// Empirical mean; `None` before the first pull.
    pub fn mean(&self) -> Option<f64> {
        (self.pulls > 0).then(|| self.cum_reward / self.pulls as f64)
    }

    /// Empirical mean of a pulled arm. Policies only call this after the
    /// initialization phase, so an unpulled arm here is a logic error.
    pub(crate) fn mean_pulled(&self) -> f64 {
        debug_assert!(self.pulls > 0, "mean of an unpulled arm");
        self.cum_reward / self.pulls as f64
    }

    /// Records one observation.
    #[must_use]
    pub fn update(self, reward: f64) -> Self {
        Self {
            pulls: self.pulls + 1,
            cum_reward: self.cum_reward + reward,
        }
    }
}

/// Records one observation; see [`ArmStats::update`].
pub fn update_stats(stats: ArmStats, reward: f64) -> ArmStats {
    stats.update(reward)
}

/// Posterior of a Gaussian arm with known reward variance under a flat prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPosterior {
    pub mean: f64,
    pub variance: f64,
    pub sigma2: f64,
    pub pulls: u64,
}

impl GaussianPosterior {
    pub fn new(mean: f64, pulls: u64, sigma2: f64) -> Result<Self, PosteriorError> {
        if pulls == 0 {
            return Err(PosteriorError::Unpulled);
        }
        if !(sigma2 > 0.0) {
            return Err(PosteriorError::NonPositiveVariance(sigma2));
        }
        Ok(Self {
            mean,
            variance: sigma2 / pulls as f64,
            sigma2,
            pulls,
        })
    }

    pub fn from_stats(stats: &ArmStats, sigma2: f64) -> Result<Self, PosteriorError> {
        let mean = stats.mean().ok_or(PosteriorError::Unpulled)?;
        Self::new(mean, stats.pulls(), sigma2)
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Beta(cum + 1, pulls − cum + 1) posterior summarized by its mean and the
/// effective count `n_b = pulls + 3` for which `var = mean(1 − mean)/n_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPosterior {
    pub mean_b: f64,
    pub n_b: u64,
}

impl BetaPosterior {
    pub fn variance(&self) -> f64 {
        self.mean_b * (1.0 - self.mean_b) / self.n_b as f64
    }

    /// Raw pull count behind the effective count.
    pub fn pulls(&self) -> u64 {
        self.n_b - 3
    }

    /// Empirical success rate recovered from the summary; this is the
    /// probability of a unit reward in the one-step lookahead.
    pub fn success_weight(&self) -> f64 {
        let n = self.n_b as f64;
        (self.mean_b * (n - 1.0) - 1.0) / (n - 3.0)
    }

    /// Posterior after observing one more reward (`true` = 1).
    #[must_use]
    pub fn updated(&self, success: bool) -> Self {
        let n = self.n_b as f64;
        let x = if success { 1.0 } else { 0.0 };
        Self {
            mean_b: (self.mean_b * (n - 1.0) + x) / n,
            n_b: self.n_b + 1,
        }
    }

    /// Beta shape parameters (alpha, beta).
    pub fn shape(&self) -> (f64, f64) {
        let n = (self.n_b - 1) as f64;
        (self.mean_b * n, (1.0 - self.mean_b) * n)
    }
}

/// Beta posterior of a Bernoulli arm under a uniform prior.
pub fn beta_posterior(stats: &ArmStats) -> Result<BetaPosterior, PosteriorError> {
    let pulls = stats.pulls();
    let cum = stats.cum_reward();
    if pulls == 0 {
        return Err(PosteriorError::Unpulled);
    }
    if !(0.0..=pulls as f64).contains(&cum) || cum.fract() != 0.0 {
        return Err(PosteriorError::NotBernoulli { cum, pulls });
    }
    Ok(BetaPosterior {
        mean_b: (cum + 1.0) / (pulls as f64 + 2.0),
        n_b: pulls + 3,
    })
}

/// Bernoulli Kullback–Leibler divergence `KL(Ber(p) ‖ Ber(q))`.
///
/// Uses `0 ln 0 = 0`, so `p ∈ {0, 1}` is accepted. A boundary `q` is only
/// valid when it equals `p`.
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64, PosteriorError> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(PosteriorError::KlDomain { p, q });
    }
    if p == q {
        return Ok(0.0);
    }
    if q == 0.0 || q == 1.0 {
        return Err(PosteriorError::KlDomain { p, q });
    }
    Ok(kl_bernoulli_interior(p, q))
}

/// Same as [`kl_bernoulli`] for `q` strictly inside (0, 1); no domain checks.
#[inline]
pub(crate) fn kl_bernoulli_interior(p: f64, q: f64) -> f64 {
    let head = if p > 0.0 { p * (p / q).ln() } else { 0.0 };
    let tail = if p < 1.0 {
        (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln()
    } else {
        0.0
    };
    (head + tail).max(0.0)
}

/// KL divergence between two Gaussians sharing the variance `sigma2`.
#[inline]
pub fn kl_gaussian(mu1: f64, mu2: f64, sigma2: f64) -> f64 {
    let d = mu1 - mu2;
    d * d / (2.0 * sigma2)
}
