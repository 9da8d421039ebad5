//! Arm-selection policies: AIM for two Gaussian arms, two Bernoulli arms
//! and K Bernoulli arms, plus Thompson sampling, UCB-tuned and KL-UCB.
//!
//! Every policy first pulls each arm once in index order. After that the
//! `select_*` functions map the current [`PolicyState`] to the next arm.

use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use thiserror::Error;

use crate::entropy::{delta_abs_bernoulli, delta_max_multiarm, delta_simplified, EntropyState};
use crate::posterior::{kl_bernoulli_interior, ArmStats, BetaPosterior, RewardFamily};

pub const UCB_TUNED_C: f64 = 2.1;
pub const KL_UCB_C: f64 = 1e-5;

const KL_UCB_TOL: f64 = 1e-5;
const KL_UCB_MAX_ITER: usize = 50;
const THOMPSON_VARIANCE_FLOOR: f64 = 1e-18;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("policy {policy} does not support {family:?} rewards")]
    WrongFamily { policy: &'static str, family: RewardFamily },
    #[error("policy {policy} needs {expected} arms, got {got}")]
    WrongArmCount { policy: &'static str, expected: &'static str, got: usize },
    #[error("policy {policy}: parameter c must be finite and nonnegative, got {c}")]
    BadParameter { policy: &'static str, c: f64 },
}

/// A policy together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicySpec {
    AimGauss2,
    AimBern2,
    AimBernK,
    Thompson,
    UcbTuned { c: f64 },
    KlUcb { c: f64 },
}

impl PolicySpec {
    /// Stable name used in configs, seeds and output tables.
    pub fn label(&self) -> &'static str {
        match self {
            PolicySpec::AimGauss2 => "aim_gauss2",
            PolicySpec::AimBern2 => "aim_bern2",
            PolicySpec::AimBernK => "aim_bernk",
            PolicySpec::Thompson => "thompson",
            PolicySpec::UcbTuned { .. } => "ucb_tuned",
            PolicySpec::KlUcb { .. } => "kl_ucb",
        }
    }

    /// Looks a policy up by label, with default parameters.
    pub fn from_label(label: &str) -> Option<Self> {
        Some(match label {
            "aim_gauss2" => PolicySpec::AimGauss2,
            "aim_bern2" => PolicySpec::AimBern2,
            "aim_bernk" => PolicySpec::AimBernK,
            "thompson" => PolicySpec::Thompson,
            "ucb_tuned" => PolicySpec::UcbTuned { c: UCB_TUNED_C },
            "kl_ucb" => PolicySpec::KlUcb { c: KL_UCB_C },
            _ => return None,
        })
    }

    pub const LABELS: [&'static str; 6] = ["aim_gauss2", "aim_bern2", "aim_bernk", "thompson", "ucb_tuned", "kl_ucb"];

    /// Checks that the policy can run on `arms` arms of `family`.
    pub fn check(&self, family: RewardFamily, arms: usize) -> Result<(), PolicyError> {
        let policy = self.label();
        let wrong_family = Err(PolicyError::WrongFamily { policy, family });
        match (self, family) {
            (PolicySpec::AimGauss2 | PolicySpec::UcbTuned { .. }, RewardFamily::Bernoulli) => return wrong_family,
            (PolicySpec::AimBern2 | PolicySpec::AimBernK | PolicySpec::KlUcb { .. }, RewardFamily::Gaussian) => {
                return wrong_family
            }
            _ => {}
        }
        match self {
            PolicySpec::AimGauss2 | PolicySpec::AimBern2 if arms != 2 => {
                return Err(PolicyError::WrongArmCount { policy, expected: "exactly 2", got: arms })
            }
            PolicySpec::AimBernK if arms < 2 => {
                return Err(PolicyError::WrongArmCount { policy, expected: "at least 2", got: arms })
            }
            _ if arms == 0 => return Err(PolicyError::WrongArmCount { policy, expected: "at least 1", got: 0 }),
            PolicySpec::UcbTuned { c } | PolicySpec::KlUcb { c } if !(c.is_finite() && *c >= 0.0) => {
                return Err(PolicyError::BadParameter { policy, c: *c })
            }
            _ => {}
        }
        Ok(())
    }
}

/// Per-arm statistics and the model parameters a policy reads.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    arms: Vec<ArmStats>,
    t: u64,
    family: RewardFamily,
    sigma2: f64,
    trace: bool,
}

impl PolicyState {
    /// Fresh state for `k` arms. `sigma2` is the known reward variance for
    /// Gaussian rewards and is ignored for Bernoulli ones.
    pub fn new(k: usize, family: RewardFamily, sigma2: f64) -> Self {
        Self {
            arms: vec![ArmStats::new(); k],
            t: 0,
            family,
            sigma2,
            trace: false,
        }
    }

    /// State with given per-arm statistics.
    pub fn from_arms(arms: Vec<ArmStats>, family: RewardFamily, sigma2: f64) -> Self {
        let t = arms.iter().map(ArmStats::pulls).sum();
        Self {
            arms,
            t,
            family,
            sigma2,
            trace: false,
        }
    }

    /// Enables decision diagnostics on returned choices.
    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn arms(&self) -> &[ArmStats] {
        &self.arms
    }

    /// Number of rounds played so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn family(&self) -> RewardFamily {
        self.family
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        self.arms[arm] = self.arms[arm].update(reward);
        self.t += 1;
    }

    /// First arm that has never been pulled.
    pub fn first_unpulled(&self) -> Option<usize> {
        self.arms.iter().position(|a| a.pulls() == 0)
    }
}

/// Decision statistic behind an AIM choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub delta: f64,
    pub max: usize,
    pub min: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmChoice {
    pub index: usize,
    pub diagnostics: Option<Diagnostics>,
}

impl ArmChoice {
    fn plain(index: usize) -> Self {
        Self { index, diagnostics: None }
    }

    fn traced(state: &PolicyState, index: usize, delta: f64, max: usize, min: usize) -> Self {
        Self {
            index,
            diagnostics: state.trace.then_some(Diagnostics { delta, max, min }),
        }
    }
}

/// Next arm under `spec`: the initialization sweep first, then the policy.
pub fn select<R: Rng + ?Sized>(spec: &PolicySpec, state: &PolicyState, rng: &mut R) -> ArmChoice {
    if let Some(arm) = state.first_unpulled() {
        return ArmChoice::plain(arm);
    }
    match *spec {
        PolicySpec::AimGauss2 => select_aim_gauss2(state),
        PolicySpec::AimBern2 => select_aim_bern2(state),
        PolicySpec::AimBernK => select_aim_bernk(state),
        PolicySpec::Thompson => select_thompson(state, rng),
        PolicySpec::UcbTuned { c } => select_ucb_tuned(state, c),
        PolicySpec::KlUcb { c } => select_kl_ucb(state, c),
    }
}

/// Orders two arms by `key`; on equal keys the arm with fewer pulls ranks
/// first, then the lower index.
fn order_pair(a: (f64, u64), b: (f64, u64)) -> (usize, usize) {
    let a_first = a.0 > b.0 || (a.0 == b.0 && a.1 <= b.1);
    if a_first {
        (0, 1)
    } else {
        (1, 0)
    }
}

fn beta_of(arm: &ArmStats) -> BetaPosterior {
    let pulls = arm.pulls() as f64;
    BetaPosterior {
        mean_b: (arm.cum_reward() + 1.0) / (pulls + 2.0),
        n_b: arm.pulls() + 3,
    }
}

/// AIM for two Gaussian arms: exploit when the simplified entropy
/// increment difference is negative.
pub fn select_aim_gauss2(state: &PolicyState) -> ArmChoice {
    let arms = state.arms();
    let (max, min) = order_pair(
        (arms[0].mean_pulled(), arms[0].pulls()),
        (arms[1].mean_pulled(), arms[1].pulls()),
    );
    let (hi, lo) = (&arms[max], &arms[min]);
    if hi.pulls() <= lo.pulls() {
        return ArmChoice::traced(state, max, f64::NAN, max, min);
    }
    let delta = delta_simplified(&EntropyState::new(
        hi.mean_pulled(),
        hi.pulls(),
        lo.mean_pulled(),
        lo.pulls(),
        state.sigma2,
    ));
    let index = if delta < 0.0 { max } else { min };
    ArmChoice::traced(state, index, delta, max, min)
}

/// AIM for two Bernoulli arms: pull the arm whose pull moves the
/// approximate entropy the most.
pub fn select_aim_bern2(state: &PolicyState) -> ArmChoice {
    let posts = [beta_of(&state.arms[0]), beta_of(&state.arms[1])];
    let (max, min) = order_pair(
        (posts[0].mean_b, posts[0].n_b),
        (posts[1].mean_b, posts[1].n_b),
    );
    if posts[max].n_b <= posts[min].n_b {
        return ArmChoice::traced(state, max, f64::NAN, max, min);
    }
    let delta = delta_abs_bernoulli(&posts[max], &posts[min]) - delta_abs_bernoulli(&posts[min], &posts[max]);
    let index = if delta > 0.0 { max } else { min };
    ArmChoice::traced(state, index, delta, max, min)
}

/// AIM for K Bernoulli arms: the best arm against the strongest
/// challenger.
pub fn select_aim_bernk(state: &PolicyState) -> ArmChoice {
    if state.arms.len() == 2 {
        return select_aim_bern2(state);
    }
    let posts: Vec<BetaPosterior> = state.arms.iter().map(beta_of).collect();
    let mut max = 0;
    for (i, p) in posts.iter().enumerate().skip(1) {
        let best = &posts[max];
        if p.mean_b > best.mean_b || (p.mean_b == best.mean_b && p.n_b < best.n_b) {
            max = i;
        }
    }
    let mut challenger = usize::MAX;
    let mut challenger_value = f64::NEG_INFINITY;
    for (i, p) in posts.iter().enumerate() {
        if i == max {
            continue;
        }
        let v = delta_abs_bernoulli(p, &posts[max]);
        if v > challenger_value {
            challenger = i;
            challenger_value = v;
        }
    }
    let lead = delta_max_multiarm(&posts, max);
    let delta = lead - challenger_value;
    let index = if delta > 0.0 { max } else { challenger };
    ArmChoice::traced(state, index, delta, max, challenger)
}

/// Thompson sampling: Gaussian posteriors `N(mean, σ²/N)` or Beta
/// posteriors under a uniform prior.
pub fn select_thompson<R: Rng + ?Sized>(state: &PolicyState, rng: &mut R) -> ArmChoice {
    let mut best = 0;
    let mut best_sample = f64::NEG_INFINITY;
    for (i, arm) in state.arms.iter().enumerate() {
        let sample = match state.family {
            RewardFamily::Gaussian => {
                let sd = (state.sigma2 / arm.pulls() as f64).max(THOMPSON_VARIANCE_FLOOR).sqrt();
                let z: f64 = StandardNormal.sample(rng);
                arm.mean_pulled() + sd * z
            }
            RewardFamily::Bernoulli => {
                let wins = arm.cum_reward();
                let losses = arm.pulls() as f64 - wins;
                Beta::new(wins + 1.0, losses + 1.0)
                    .expect("Beta shapes are at least 1")
                    .sample(rng)
            }
        };
        if sample > best_sample {
            best = i;
            best_sample = sample;
        }
    }
    ArmChoice::plain(best)
}

/// UCB-tuned index `mean + c √((ln t/N)·min(¼, σ²/N + √(2 ln t/N)))`.
pub fn ucb_tuned_index(mean: f64, pulls: u64, ln_t: f64, sigma2: f64, c: f64) -> f64 {
    let n = pulls as f64;
    let spread = (sigma2 / n + (2.0 * ln_t / n).sqrt()).min(0.25);
    mean + c * (ln_t / n * spread).sqrt()
}

pub fn select_ucb_tuned(state: &PolicyState, c: f64) -> ArmChoice {
    let ln_t = (state.t as f64).ln();
    argmax_lowest(
        state
            .arms
            .iter()
            .map(|a| ucb_tuned_index(a.mean_pulled(), a.pulls(), ln_t, state.sigma2, c)),
    )
}

/// Exploration budget `ln t + c ln ln t`, zero before `ln t` is positive.
pub fn kl_ucb_budget(t: u64, c: f64) -> f64 {
    let ln_t = (t as f64).ln();
    if ln_t > 0.0 {
        (ln_t + c * ln_t.ln()).max(0.0)
    } else {
        0.0
    }
}

/// Largest `θ ∈ [mean, 1]` with `N·kl(mean, θ) ≤ budget`, by bisection to
/// within `1e-5`.
pub fn kl_ucb_index(mean: f64, pulls: u64, budget: f64) -> f64 {
    if mean >= 1.0 {
        return 1.0;
    }
    if budget <= 0.0 {
        return mean;
    }
    let n = pulls as f64;
    let (mut lo, mut hi) = (mean, 1.0);
    for _ in 0..KL_UCB_MAX_ITER {
        if hi - lo <= KL_UCB_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if n * kl_bernoulli_interior(mean, mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub fn select_kl_ucb(state: &PolicyState, c: f64) -> ArmChoice {
    let budget = kl_ucb_budget(state.t, c);
    argmax_lowest(
        state
            .arms
            .iter()
            .map(|a| kl_ucb_index(a.mean_pulled(), a.pulls(), budget)),
    )
}

fn argmax_lowest(values: impl Iterator<Item = f64>) -> ArmChoice {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    ArmChoice::plain(best)
}
