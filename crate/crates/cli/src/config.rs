//! Experiment config files.
//!
//! A config is a flat TOML table plus optional per-policy sections:
//!
//! ```toml
//! family = "gaussian"        # or "bernoulli"
//! sigma2 = 1.0
//! policies = ["aim_gauss2", "thompson"]
//! means = [0.8, 0.79]        # or sobol_pairs = 64, or uniform_arms = 10
//! horizon = 10000
//! runs = 100
//! seed = 1
//! checkpoint_ratio = 1.25
//! checkpoints = [5000]       # extra checkpoints
//!
//! [ucb_tuned]
//! c = 2.1
//!
//! [kl_ucb]
//! c = 1e-5
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use aim_core::policy::{KL_UCB_C, UCB_TUNED_C};
use aim_core::sim::{checkpoint_schedule, DEFAULT_CHECKPOINT_RATIO};
use aim_core::{ExperimentConfig, MeanSource, PolicySpec, RewardFamily};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),
}

/// Command-line values that replace the file's.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub horizon: Option<u64>,
    pub runs: Option<u64>,
    pub seed: Option<u64>,
    pub policies: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolicySection {
    c: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    family: Option<String>,
    #[serde(default)]
    sigma2: Option<f64>,
    #[serde(default, alias = "policy")]
    policies: Option<OneOrMany>,
    #[serde(default)]
    means: Option<Vec<f64>>,
    #[serde(default)]
    sobol_pairs: Option<u64>,
    #[serde(default)]
    uniform_arms: Option<u64>,
    #[serde(default)]
    horizon: Option<u64>,
    #[serde(default)]
    runs: Option<u64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    checkpoint_ratio: Option<f64>,
    #[serde(default)]
    checkpoints: Vec<u64>,
    #[serde(default)]
    ucb_tuned: PolicySection,
    #[serde(default)]
    kl_ucb: PolicySection,
}

/// Reads, parses and validates a config file.
pub fn parse_config(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config_str(&text, overrides).map_err(|e| match e {
        ConfigError::Parse { message, .. } => ConfigError::Parse { path: path.to_path_buf(), message },
        other => other,
    })
}

/// [`parse_config`] on in-memory text.
pub fn parse_config_str(text: &str, overrides: &Overrides) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: PathBuf::from("<config>"),
        message: e.to_string().trim_end().to_string(),
    })?;
    build(raw, overrides)
}

fn build(raw: RawConfig, overrides: &Overrides) -> Result<ExperimentConfig, ConfigError> {
    let mut errors = Vec::new();

    let family = match raw.family.as_deref().unwrap_or("gaussian") {
        "gaussian" => RewardFamily::Gaussian,
        "bernoulli" => RewardFamily::Bernoulli,
        other => {
            errors.push(format!("family must be \"gaussian\" or \"bernoulli\", got {other:?}"));
            RewardFamily::Gaussian
        }
    };

    let ucb_c = raw.ucb_tuned.c.unwrap_or(UCB_TUNED_C);
    let kl_c = raw.kl_ucb.c.unwrap_or(KL_UCB_C);
    let labels = match (&overrides.policies, raw.policies) {
        (Some(p), _) => p.clone(),
        (None, Some(OneOrMany::One(p))) => vec![p],
        (None, Some(OneOrMany::Many(p))) => p,
        (None, None) => Vec::new(),
    };
    let mut policies = Vec::new();
    for label in &labels {
        match PolicySpec::from_label(label) {
            Some(PolicySpec::UcbTuned { .. }) => policies.push(PolicySpec::UcbTuned { c: ucb_c }),
            Some(PolicySpec::KlUcb { .. }) => policies.push(PolicySpec::KlUcb { c: kl_c }),
            Some(p) => policies.push(p),
            None => errors.push(format!(
                "unknown policy {label:?} (expected one of {})",
                PolicySpec::LABELS.join(", ")
            )),
        }
    }

    let sources = [raw.means.is_some(), raw.sobol_pairs.is_some(), raw.uniform_arms.is_some()];
    let means = match (raw.means, raw.sobol_pairs, raw.uniform_arms) {
        (Some(m), None, None) => MeanSource::Fixed(m),
        (None, Some(n), None) => MeanSource::SobolPairs(n as usize),
        (None, None, Some(k)) => MeanSource::Uniform { arms: k as usize },
        _ => {
            let n = sources.iter().filter(|&&s| s).count();
            errors.push(format!("exactly one of means, sobol_pairs, uniform_arms is required, found {n}"));
            MeanSource::Fixed(Vec::new())
        }
    };

    let horizon = overrides.horizon.or(raw.horizon);
    let runs = overrides.runs.or(raw.runs);
    let seed = overrides.seed.or(raw.seed);
    for (name, v) in [("horizon", horizon), ("runs", runs), ("seed", seed)] {
        if v.is_none() {
            errors.push(format!("missing required key {name}"));
        }
    }
    let ratio = raw.checkpoint_ratio.unwrap_or(DEFAULT_CHECKPOINT_RATIO);
    if !(ratio > 1.0 && ratio.is_finite()) {
        errors.push(format!("checkpoint_ratio must be finite and above 1, got {ratio}"));
    }
    if let Some(t) = raw.checkpoints.iter().find(|&&t| t == 0 || Some(t) > horizon) {
        errors.push(format!("extra checkpoint {t} is outside [1, horizon]"));
    }

    let horizon = horizon.unwrap_or(0);
    let config = ExperimentConfig {
        policies,
        family,
        sigma2: raw.sigma2.unwrap_or(1.0),
        means,
        horizon,
        runs: runs.unwrap_or(0),
        base_seed: seed.unwrap_or(0),
        checkpoints: if ratio > 1.0 && ratio.is_finite() {
            checkpoint_schedule(horizon, ratio, &raw.checkpoints)
        } else {
            vec![horizon]
        },
    };
    errors.extend(config.violations());
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError::Invalid(errors))
    }
}
