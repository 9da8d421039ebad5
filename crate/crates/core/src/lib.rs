//! Approximate information maximization (AIM) for stochastic multi-armed
//! bandits, with baseline policies, a numerical entropy oracle and a
//! Monte-Carlo regret harness.
//!
//! AIM pulls the arm whose next observation is expected to change the
//! entropy of the posterior of the maximal mean the most, using closed-form
//! asymptotic approximations of that entropy.

// `!(x > 0.0)` is the NaN-rejecting form used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod entropy;
pub mod oracle;
pub mod policy;
pub mod posterior;
pub mod sim;

pub use entropy::{EntropyError, EntropyState, ThetaEq};
pub use oracle::{OracleError, Posterior, PosteriorSet, QuadratureSpec};
pub use policy::{ArmChoice, PolicyError, PolicySpec, PolicyState};
pub use posterior::{
    beta_posterior, kl_bernoulli, kl_gaussian, update_stats, ArmStats, BetaPosterior, GaussianPosterior,
    PosteriorError, RewardFamily,
};
pub use sim::{
    run_episode, run_experiment, sobol_pair, AggregatedTable, BanditInstance, ExperimentConfig, MeanSource,
    RegretTrace, SimError, TableRow,
};
