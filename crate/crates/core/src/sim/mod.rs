//! Bandit environments, the single-run loop and parallel experiments with
//! regret aggregation at checkpoints.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use thiserror::Error;

use crate::policy::{select, PolicyError, PolicySpec, PolicyState};
use crate::posterior::RewardFamily;

pub mod rng;
mod sobol;

pub use sobol::sobol_pair;

pub const DEFAULT_CHECKPOINT_RATIO: f64 = 1.25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid bandit instance: {0}")]
    InvalidInstance(String),
    #[error("horizon {horizon} is shorter than the {arms} arms")]
    HorizonTooShort { horizon: u64, arms: usize },
    #[error("invalid experiment config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("run failed (policy {policy}, instance {instance}, replicate {replicate}, seed {seed}): {source}")]
    Run {
        policy: String,
        instance: u64,
        replicate: u64,
        seed: u64,
        #[source]
        source: Box<SimError>,
    },
}

/// True arm distributions of one bandit problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    family: RewardFamily,
    means: Vec<f64>,
    sigma2: f64,
}

impl BanditInstance {
    pub fn new(family: RewardFamily, means: Vec<f64>, sigma2: f64) -> Result<Self, SimError> {
        if means.is_empty() {
            return Err(SimError::InvalidInstance("no arms".into()));
        }
        if let Some(m) = means.iter().find(|m| !m.is_finite()) {
            return Err(SimError::InvalidInstance(format!("mean {m} is not finite")));
        }
        match family {
            RewardFamily::Bernoulli => {
                if let Some(m) = means.iter().find(|m| !(0.0..=1.0).contains(*m)) {
                    return Err(SimError::InvalidInstance(format!("Bernoulli mean {m} outside [0, 1]")));
                }
            }
            RewardFamily::Gaussian => {
                if !(sigma2 > 0.0 && sigma2.is_finite()) {
                    return Err(SimError::InvalidInstance(format!("reward variance {sigma2} must be positive")));
                }
            }
        }
        Ok(Self { family, means, sigma2 })
    }

    pub fn gaussian(means: Vec<f64>, sigma2: f64) -> Result<Self, SimError> {
        Self::new(RewardFamily::Gaussian, means, sigma2)
    }

    pub fn bernoulli(means: Vec<f64>) -> Result<Self, SimError> {
        Self::new(RewardFamily::Bernoulli, means, 1.0)
    }

    pub fn family(&self) -> RewardFamily {
        self.family
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn arms(&self) -> usize {
        self.means.len()
    }

    fn best_mean(&self) -> f64 {
        self.means.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn draw<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> f64 {
        let mean = self.means[arm];
        match self.family {
            RewardFamily::Bernoulli => {
                if rng.random::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
            RewardFamily::Gaussian => {
                let z: f64 = StandardNormal.sample(rng);
                mean + self.sigma2.sqrt() * z
            }
        }
    }
}

/// Cumulative pseudo-regret and pull counts of one run at each checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub checkpoints: Vec<(u64, f64)>,
    /// Per-arm pull counts at each checkpoint.
    pub pulls: Vec<Vec<u64>>,
    pub final_pulls: Vec<u64>,
}

/// Geometric checkpoint grid `1, ⌈r⌉, ⌈r²⌉, …` up to and including
/// `horizon`, merged with `extra` points inside `[1, horizon]`.
pub fn checkpoint_schedule(horizon: u64, ratio: f64, extra: &[u64]) -> Vec<u64> {
    let mut points = Vec::new();
    if horizon == 0 {
        return points;
    }
    let mut x = 1.0f64;
    while x <= horizon as f64 {
        points.push(x.ceil() as u64);
        x *= ratio;
    }
    points.push(horizon);
    points.extend(extra.iter().copied().filter(|&t| (1..=horizon).contains(&t)));
    points.retain(|&t| t <= horizon);
    points.sort_unstable();
    points.dedup();
    points
}

/// One run of `spec` on `instance` for `horizon` rounds with the default
/// checkpoint grid.
pub fn run_episode(
    spec: &PolicySpec,
    instance: &BanditInstance,
    horizon: u64,
    seed: u64,
) -> Result<RegretTrace, SimError> {
    let schedule = checkpoint_schedule(horizon, DEFAULT_CHECKPOINT_RATIO, &[]);
    run_episode_at(spec, instance, &schedule, seed)
}

/// One run recording at the given sorted checkpoints; the horizon is the
/// last checkpoint.
pub fn run_episode_at(
    spec: &PolicySpec,
    instance: &BanditInstance,
    checkpoints: &[u64],
    seed: u64,
) -> Result<RegretTrace, SimError> {
    let k = instance.arms();
    spec.check(instance.family(), k)?;
    let horizon = checkpoints.last().copied().unwrap_or(0);
    if horizon < k as u64 {
        return Err(SimError::HorizonTooShort { horizon, arms: k });
    }
    debug_assert!(checkpoints.windows(2).all(|w| w[0] < w[1]));

    let best = instance.best_mean();
    let gaps: Vec<f64> = instance.means().iter().map(|m| best - m).collect();
    let (mut reward_rng, mut policy_rng) = rng::run_streams(seed);
    let mut state = PolicyState::new(k, instance.family(), instance.sigma2());
    let mut regret = 0.0;
    let mut trace = RegretTrace {
        checkpoints: Vec::with_capacity(checkpoints.len()),
        pulls: Vec::with_capacity(checkpoints.len()),
        final_pulls: Vec::new(),
    };
    let mut next = checkpoints.iter().peekable();
    for t in 1..=horizon {
        let arm = select(spec, &state, &mut policy_rng).index;
        let reward = instance.draw(arm, &mut reward_rng);
        state.record(arm, reward);
        regret += gaps[arm];
        if next.peek() == Some(&&t) {
            next.next();
            trace.checkpoints.push((t, regret));
            trace.pulls.push(state.arms().iter().map(|a| a.pulls()).collect());
        }
    }
    trace.final_pulls = state.arms().iter().map(|a| a.pulls()).collect();
    Ok(trace)
}

/// Where the arm means of an experiment come from.
#[derive(Debug, Clone, PartialEq)]
pub enum MeanSource {
    /// One fixed instance.
    Fixed(Vec<f64>),
    /// The first `n` two-arm Sobol points, one instance each.
    SobolPairs(usize),
    /// `arms` means drawn uniformly on [0, 1] afresh for every replicate.
    Uniform { arms: usize },
}

impl MeanSource {
    pub fn arms(&self) -> usize {
        match self {
            MeanSource::Fixed(m) => m.len(),
            MeanSource::SobolPairs(_) => 2,
            MeanSource::Uniform { arms } => *arms,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub policies: Vec<PolicySpec>,
    pub family: RewardFamily,
    pub sigma2: f64,
    pub means: MeanSource,
    pub horizon: u64,
    pub runs: u64,
    pub base_seed: u64,
    /// Sorted checkpoints, ending at the horizon.
    pub checkpoints: Vec<u64>,
}

impl ExperimentConfig {
    /// Config with the default checkpoint grid.
    pub fn new(
        policies: Vec<PolicySpec>,
        family: RewardFamily,
        sigma2: f64,
        means: MeanSource,
        horizon: u64,
        runs: u64,
        base_seed: u64,
    ) -> Self {
        Self {
            policies,
            family,
            sigma2,
            means,
            horizon,
            runs,
            base_seed,
            checkpoints: checkpoint_schedule(horizon, DEFAULT_CHECKPOINT_RATIO, &[]),
        }
    }

    /// Every violated constraint, in a stable order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let k = self.means.arms();
        if k == 0 {
            out.push("at least one arm is required".to_string());
        }
        if self.policies.is_empty() {
            out.push("at least one policy is required".to_string());
        }
        for (i, p) in self.policies.iter().enumerate() {
            if self.policies[..i].iter().any(|q| q.label() == p.label()) {
                out.push(format!("policy {} is listed twice", p.label()));
            }
            if k > 0 {
                if let Err(e) = p.check(self.family, k) {
                    out.push(e.to_string());
                }
            }
        }
        if self.horizon < k as u64 {
            out.push(format!("horizon {} is shorter than the {k} arms", self.horizon));
        }
        if self.runs == 0 {
            out.push("runs must be at least 1".to_string());
        }
        if self.family == RewardFamily::Gaussian && !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            out.push(format!("sigma2 must be positive, got {}", self.sigma2));
        }
        match &self.means {
            MeanSource::Fixed(m) => {
                if let Some(x) = m.iter().find(|x| !x.is_finite()) {
                    out.push(format!("mean {x} is not finite"));
                }
                if self.family == RewardFamily::Bernoulli {
                    if let Some(x) = m.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                        out.push(format!("Bernoulli mean {x} outside [0, 1]"));
                    }
                }
            }
            MeanSource::SobolPairs(0) => out.push("sobol_pairs must be at least 1".to_string()),
            _ => {}
        }
        if self.checkpoints.last() != Some(&self.horizon) {
            out.push("checkpoints must end at the horizon".to_string());
        }
        if !self.checkpoints.windows(2).all(|w| w[0] < w[1]) || self.checkpoints.first() == Some(&0) {
            out.push("checkpoints must be strictly increasing and positive".to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(v))
        }
    }

    /// Number of distinct fixed instances; uniform means yield one
    /// instance per replicate.
    fn instance_count(&self) -> u64 {
        match &self.means {
            MeanSource::Fixed(_) | MeanSource::Uniform { .. } => 1,
            MeanSource::SobolPairs(n) => *n as u64,
        }
    }

    fn instance(&self, instance: u64, replicate: u64) -> Result<BanditInstance, SimError> {
        let means = match &self.means {
            MeanSource::Fixed(m) => m.clone(),
            MeanSource::SobolPairs(_) => {
                let (a, b) = sobol_pair(instance);
                vec![a, b]
            }
            MeanSource::Uniform { arms } => {
                let mut rng = rng::means_stream(self.base_seed, replicate);
                (0..*arms).map(|_| rng.random::<f64>()).collect()
            }
        };
        BanditInstance::new(self.family, means, self.sigma2)
    }

    /// Means of each fixed or Sobol instance, in instance order; empty for
    /// uniform means, which change with every replicate.
    pub fn instance_means(&self) -> Vec<Vec<f64>> {
        if let MeanSource::Uniform { .. } = self.means {
            return Vec::new();
        }
        (0..self.instance_count())
            .filter_map(|i| self.instance(i, 0).ok())
            .map(|inst| inst.means().to_vec())
            .collect()
    }
}

/// Mean regret and standard error of one policy at one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub policy: String,
    pub t: u64,
    pub mean_regret: f64,
    pub stderr: f64,
    pub runs: u64,
}

/// Rows sorted by `(policy, t)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AggregatedTable {
    pub rows: Vec<TableRow>,
}

impl AggregatedTable {
    /// Aggregates traces tagged with their policy label. The result does
    /// not depend on the order of `runs`.
    pub fn from_runs<'a>(runs: impl IntoIterator<Item = (&'a str, &'a RegretTrace)>) -> Self {
        let mut by_policy: Vec<(&str, Vec<&RegretTrace>)> = Vec::new();
        for (label, trace) in runs {
            match by_policy.iter_mut().find(|(l, _)| *l == label) {
                Some((_, v)) => v.push(trace),
                None => by_policy.push((label, vec![trace])),
            }
        }
        let mut rows = Vec::new();
        for (label, traces) in &by_policy {
            let n = traces[0].checkpoints.len();
            for c in 0..n {
                let t = traces[0].checkpoints[c].0;
                let mut values: Vec<f64> = traces.iter().map(|tr| tr.checkpoints[c].1).collect();
                values.sort_by(f64::total_cmp);
                let (mean, stderr) = mean_stderr(&values);
                rows.push(TableRow {
                    policy: label.to_string(),
                    t,
                    mean_regret: mean,
                    stderr,
                    runs: values.len() as u64,
                });
            }
        }
        rows.sort_by(|a, b| a.policy.cmp(&b.policy).then(a.t.cmp(&b.t)));
        Self { rows }
    }

    /// Rows of one policy in checkpoint order.
    pub fn policy_rows<'a>(&'a self, policy: &'a str) -> impl Iterator<Item = &'a TableRow> + 'a {
        self.rows.iter().filter(move |r| r.policy == policy)
    }

    pub fn row(&self, policy: &str, t: u64) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.policy == policy && r.t == t)
    }
}

/// Neumaier-compensated sum.
fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean and `sd/√n` with the sample standard deviation; the error is zero
/// for a single value.
fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = neumaier_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (n - 1.0)).sqrt() / n.sqrt())
}

/// One finished run of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub policy: usize,
    pub instance: u64,
    pub replicate: u64,
    pub seed: u64,
    pub trace: RegretTrace,
}

/// Every run of an experiment, in (policy, instance, replicate) order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub labels: Vec<&'static str>,
    pub records: Vec<RunRecord>,
    pub instance_means: Vec<Vec<f64>>,
}

impl ExperimentResult {
    /// Regret averaged over all instances and replicates.
    pub fn pooled(&self) -> AggregatedTable {
        AggregatedTable::from_runs(self.records.iter().map(|r| (self.labels[r.policy], &r.trace)))
    }

    /// Regret of one instance averaged over replicates.
    pub fn for_instance(&self, instance: u64) -> AggregatedTable {
        AggregatedTable::from_runs(
            self.records
                .iter()
                .filter(|r| r.instance == instance)
                .map(|r| (self.labels[r.policy], &r.trace)),
        )
    }
}

/// Runs every (policy, instance, replicate) combination in parallel and
/// keeps the individual traces.
pub fn run_experiment_detailed(config: &ExperimentConfig) -> Result<ExperimentResult, SimError> {
    config.validate()?;
    let instances = config.instance_count();
    let mut tasks = Vec::new();
    for p in 0..config.policies.len() {
        for i in 0..instances {
            for r in 0..config.runs {
                tasks.push((p, i, r));
            }
        }
    }
    let records = tasks
        .into_par_iter()
        .map(|(p, i, r)| {
            let spec = &config.policies[p];
            let seed = rng::run_seed(config.base_seed, spec.label(), i, r);
            let wrap = |e: SimError| SimError::Run {
                policy: spec.label().to_string(),
                instance: i,
                replicate: r,
                seed,
                source: Box::new(e),
            };
            let instance = config.instance(i, r).map_err(wrap)?;
            let trace = run_episode_at(spec, &instance, &config.checkpoints, seed).map_err(wrap)?;
            Ok(RunRecord {
                policy: p,
                instance: i,
                replicate: r,
                seed,
                trace,
            })
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    Ok(ExperimentResult {
        labels: config.policies.iter().map(PolicySpec::label).collect(),
        records,
        instance_means: config.instance_means(),
    })
}

/// Mean regret and standard error per policy and checkpoint, pooled over
/// instances and replicates.
pub fn run_experiment(config: &ExperimentConfig) -> Result<AggregatedTable, SimError> {
    Ok(run_experiment_detailed(config)?.pooled())
}

#[cfg(test)]
mod tests;
