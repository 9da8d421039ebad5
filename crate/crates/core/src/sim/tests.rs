use super::*;
use crate::policy::{KL_UCB_C, UCB_TUNED_C};

fn gauss2(means: [f64; 2]) -> BanditInstance {
    BanditInstance::gaussian(means.to_vec(), 1.0).unwrap()
}

#[test]
fn instance_validation() {
    assert!(BanditInstance::bernoulli(vec![0.2, 1.2]).is_err());
    assert!(BanditInstance::gaussian(vec![0.2, 0.1], 0.0).is_err());
    assert!(BanditInstance::gaussian(vec![], 1.0).is_err());
    assert!(BanditInstance::gaussian(vec![f64::NAN], 1.0).is_err());
    assert!(BanditInstance::gaussian(vec![-3.0, 7.0], 2.0).is_ok());
}

#[test]
fn schedule_shape() {
    let s = checkpoint_schedule(100, 1.25, &[]);
    assert_eq!(&s[..6], &[1, 2, 3, 4, 5, 6]);
    assert_eq!(*s.last().unwrap(), 100);
    assert!(s.windows(2).all(|w| w[0] < w[1]));
    let big = checkpoint_schedule(100_000, 1.25, &[10_000]);
    assert!(big.contains(&10_000) && big.contains(&100_000));
    assert!(big.len() < 60);
    assert_eq!(checkpoint_schedule(1, 1.25, &[5]), vec![1]);
}

#[test]
fn horizon_equal_to_arm_count_costs_the_gap() {
    for spec in [PolicySpec::AimGauss2, PolicySpec::Thompson, PolicySpec::UcbTuned { c: UCB_TUNED_C }] {
        let tr = run_episode(&spec, &gauss2([0.3, 0.8]), 2, 5).unwrap();
        assert_eq!(tr.checkpoints, vec![(1, 0.5), (2, 0.5)]);
        assert_eq!(tr.final_pulls, vec![1, 1]);
    }
    let b = BanditInstance::bernoulli(vec![0.9, 0.2, 0.5]).unwrap();
    let tr = run_episode(&PolicySpec::AimBernK, &b, 3, 1).unwrap();
    assert!((tr.checkpoints.last().unwrap().1 - 1.1).abs() < 1e-15);
}

#[test]
fn zero_gap_has_no_regret() {
    let tr = run_episode(&PolicySpec::AimGauss2, &gauss2([0.4, 0.4]), 3000, 9).unwrap();
    assert!(tr.checkpoints.iter().all(|&(_, r)| r == 0.0));
}

#[test]
fn replay_is_bitwise_identical() {
    let inst = gauss2([0.8, 0.79]);
    for spec in [PolicySpec::AimGauss2, PolicySpec::Thompson] {
        let a = run_episode(&spec, &inst, 5000, 42).unwrap();
        let b = run_episode(&spec, &inst, 5000, 42).unwrap();
        assert_eq!(a, b);
        let c = run_episode(&spec, &inst, 5000, 43).unwrap();
        assert_ne!(a, c);
    }
}

#[test]
fn traces_are_monotone_and_conserve_pulls() {
    let specs = [
        (PolicySpec::AimBern2, RewardFamily::Bernoulli),
        (PolicySpec::AimBernK, RewardFamily::Bernoulli),
        (PolicySpec::KlUcb { c: KL_UCB_C }, RewardFamily::Bernoulli),
        (PolicySpec::Thompson, RewardFamily::Bernoulli),
        (PolicySpec::AimGauss2, RewardFamily::Gaussian),
        (PolicySpec::UcbTuned { c: UCB_TUNED_C }, RewardFamily::Gaussian),
    ];
    for seed in 0..10 {
        for (spec, family) in specs {
            let inst = BanditInstance::new(family, vec![0.35, 0.6], 1.0).unwrap();
            let tr = run_episode(&spec, &inst, 2000, seed).unwrap();
            assert!(tr.checkpoints.windows(2).all(|w| w[0].1 <= w[1].1));
            for ((t, r), pulls) in tr.checkpoints.iter().zip(&tr.pulls) {
                assert_eq!(pulls.iter().sum::<u64>(), *t);
                assert!((r - 0.25 * pulls[0] as f64).abs() < 1e-9);
            }
            assert_eq!(tr.final_pulls.iter().sum::<u64>(), 2000);
        }
    }
}

#[test]
fn episode_rejects_incompatible_policy() {
    let b = BanditInstance::bernoulli(vec![0.5, 0.4]).unwrap();
    assert!(matches!(
        run_episode(&PolicySpec::AimGauss2, &b, 10, 0),
        Err(SimError::Policy(_))
    ));
    assert!(matches!(
        run_episode(&PolicySpec::Thompson, &b, 1, 0),
        Err(SimError::HorizonTooShort { .. })
    ));
}

fn config(means: MeanSource, runs: u64) -> ExperimentConfig {
    ExperimentConfig::new(
        vec![PolicySpec::AimGauss2, PolicySpec::Thompson],
        RewardFamily::Gaussian,
        1.0,
        means,
        500,
        runs,
        7,
    )
}

#[test]
fn config_violations_are_all_reported() {
    let mut c = config(MeanSource::Fixed(vec![0.1, 0.2, 0.3]), 0);
    c.horizon = 2;
    c.checkpoints = vec![1, 2];
    c.sigma2 = -1.0;
    c.policies.push(PolicySpec::Thompson);
    let v = c.violations();
    assert_eq!(v.len(), 5, "{v:?}");
    assert!(matches!(c.validate(), Err(SimError::InvalidConfig(_))));
    assert!(config(MeanSource::Fixed(vec![0.8, 0.79]), 3).validate().is_ok());
}

#[test]
fn single_run_table_is_the_trace() {
    let mut c = config(MeanSource::Fixed(vec![0.8, 0.5]), 1);
    c.policies = vec![PolicySpec::AimGauss2];
    let table = run_experiment(&c).unwrap();
    let seed = rng::run_seed(7, "aim_gauss2", 0, 0);
    let tr = run_episode(&PolicySpec::AimGauss2, &gauss2([0.8, 0.5]), 500, seed).unwrap();
    assert_eq!(table.rows.len(), tr.checkpoints.len());
    for (row, (t, r)) in table.rows.iter().zip(&tr.checkpoints) {
        assert_eq!((row.t, row.mean_regret, row.stderr, row.runs), (*t, *r, 0.0, 1));
    }
}

#[test]
fn identical_runs_have_zero_error() {
    let tr = run_episode(&PolicySpec::Thompson, &gauss2([0.8, 0.5]), 300, 3).unwrap();
    let table = AggregatedTable::from_runs([("thompson", &tr), ("thompson", &tr)]);
    assert!(table.rows.iter().all(|r| r.stderr == 0.0 && r.runs == 2));
}

#[test]
fn aggregation_ignores_run_order() {
    let c = config(MeanSource::SobolPairs(4), 5);
    let result = run_experiment_detailed(&c).unwrap();
    let forward = result.pooled();
    let mut shuffled: Vec<&RunRecord> = result.records.iter().collect();
    shuffled.reverse();
    shuffled.rotate_left(7);
    let backward = AggregatedTable::from_runs(shuffled.iter().map(|r| (result.labels[r.policy], &r.trace)));
    assert_eq!(forward, backward);
    assert_eq!(forward, run_experiment(&c).unwrap());
}

#[test]
fn aggregate_matches_direct_statistics() {
    let c = config(MeanSource::SobolPairs(3), 4);
    let result = run_experiment_detailed(&c).unwrap();
    let table = result.pooled();
    let last: Vec<f64> = result
        .records
        .iter()
        .filter(|r| r.policy == 1)
        .map(|r| r.trace.checkpoints.last().unwrap().1)
        .collect();
    assert_eq!(last.len(), 12);
    let mean = last.iter().sum::<f64>() / 12.0;
    let var = last.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 11.0;
    let row = table.row("thompson", 500).unwrap();
    assert!((row.mean_regret - mean).abs() < 1e-12 * mean.max(1.0));
    assert!((row.stderr - (var / 12.0).sqrt()).abs() < 1e-12 * mean.max(1.0));
    assert_eq!(row.runs, 12);
}

#[test]
fn seeds_isolate_replicates() {
    let small = run_experiment_detailed(&config(MeanSource::Fixed(vec![0.6, 0.5]), 3)).unwrap();
    let large = run_experiment_detailed(&config(MeanSource::Fixed(vec![0.6, 0.5]), 4)).unwrap();
    for rec in &small.records {
        let twin = large
            .records
            .iter()
            .find(|r| (r.policy, r.instance, r.replicate) == (rec.policy, rec.instance, rec.replicate))
            .unwrap();
        assert_eq!(rec, twin);
    }
}

#[test]
fn uniform_means_shared_across_policies() {
    let c = ExperimentConfig::new(
        vec![PolicySpec::AimBernK, PolicySpec::Thompson],
        RewardFamily::Bernoulli,
        1.0,
        MeanSource::Uniform { arms: 5 },
        50,
        3,
        11,
    );
    for r in 0..3 {
        assert_eq!(c.instance(0, r).unwrap(), c.instance(0, r).unwrap());
    }
    assert_ne!(c.instance(0, 0).unwrap(), c.instance(0, 1).unwrap());
    assert!(c.instance_means().is_empty());
    assert!(run_experiment(&c).is_ok());
}

#[test]
fn run_errors_carry_provenance() {
    let e = SimError::Run {
        policy: "thompson".into(),
        instance: 3,
        replicate: 9,
        seed: 77,
        source: Box::new(SimError::InvalidInstance("x".into())),
    };
    let msg = e.to_string();
    for needle in ["thompson", "instance 3", "replicate 9", "seed 77"] {
        assert!(msg.contains(needle), "{msg}");
    }
}
