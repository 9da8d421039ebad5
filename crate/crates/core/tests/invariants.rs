//! Property tests over whole episodes and the Sobol generator.

use aim_core::policy::{KL_UCB_C, UCB_TUNED_C};
use aim_core::{run_episode, sobol_pair, BanditInstance, PolicySpec, RewardFamily};
use proptest::prelude::*;

fn policy_for(family: RewardFamily, k: usize) -> impl Strategy<Value = PolicySpec> {
    let options: Vec<PolicySpec> = match (family, k) {
        (RewardFamily::Gaussian, 2) => vec![PolicySpec::AimGauss2, PolicySpec::Thompson, PolicySpec::UcbTuned { c: UCB_TUNED_C }],
        (RewardFamily::Gaussian, _) => vec![PolicySpec::Thompson, PolicySpec::UcbTuned { c: UCB_TUNED_C }],
        (RewardFamily::Bernoulli, 2) => vec![
            PolicySpec::AimBern2,
            PolicySpec::AimBernK,
            PolicySpec::Thompson,
            PolicySpec::KlUcb { c: KL_UCB_C },
        ],
        (RewardFamily::Bernoulli, _) => vec![PolicySpec::AimBernK, PolicySpec::Thompson, PolicySpec::KlUcb { c: KL_UCB_C }],
    };
    proptest::sample::select(options)
}

fn episode_case() -> impl Strategy<Value = (PolicySpec, BanditInstance, u64, u64)> {
    (prop_oneof![Just(RewardFamily::Gaussian), Just(RewardFamily::Bernoulli)], 2usize..6)
        .prop_flat_map(|(family, k)| {
            (
                policy_for(family, k),
                proptest::collection::vec(0.0f64..=1.0, k),
                0.05f64..4.0,
                k as u64..600,
                any::<u64>(),
            )
                .prop_map(move |(p, means, s2, h, seed)| (p, BanditInstance::new(family, means, s2).unwrap(), h, seed))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regret_is_monotone_and_pulls_add_up((spec, inst, horizon, seed) in episode_case()) {
        let tr = run_episode(&spec, &inst, horizon, seed).unwrap();
        let best = inst.means().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(tr.checkpoints.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
        prop_assert_eq!(tr.checkpoints.last().unwrap().0, horizon);
        for ((t, regret), pulls) in tr.checkpoints.iter().zip(&tr.pulls) {
            prop_assert_eq!(pulls.iter().sum::<u64>(), *t);
            let direct: f64 = pulls.iter().zip(inst.means()).map(|(&n, &m)| n as f64 * (best - m)).sum();
            prop_assert!((regret - direct).abs() <= 1e-9 * (1.0 + direct));
        }
        prop_assert!(tr.final_pulls.iter().all(|&n| n >= 1));
        prop_assert_eq!(&tr, &run_episode(&spec, &inst, horizon, seed).unwrap());
    }

    #[test]
    fn sobol_points_are_interior_dyadics(i in 0u64..1_000_000) {
        let (a, b) = sobol_pair(i);
        prop_assert!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0);
        // Point i+1 has denominator at most the next power of two.
        let scale = ((i + 2) as f64).log2().ceil().exp2();
        prop_assert_eq!((a * scale).fract(), 0.0);
        prop_assert_eq!((b * scale).fract(), 0.0);
    }
}
