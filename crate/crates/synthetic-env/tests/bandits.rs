use aos_core::{AosConfig, ArmId, Cadence, Controller, CreditAssignment, Policy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use synthetic_env::{pull, run_episode, BanditSpec, Drift, EnvError, Noise};

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn controller(policy: Policy, credit: CreditAssignment, alpha: f64, n: usize) -> Controller {
    let config = AosConfig::for_arms(policy, n)
        .with_credit(credit)
        .with_alpha(alpha)
        .with_cadence(Cadence::PerMutation);
    Controller::new(config, n).unwrap()
}

#[test]
fn certain_arms_are_certain() {
    let spec = BanditSpec::stationary(vec![0.0, 1.0], Noise::Bernoulli);
    let mut r = rng(0);
    for step in 0..1000 {
        assert_eq!(pull(&spec, ArmId(0), step, &mut r), 0.0);
        assert_eq!(pull(&spec, ArmId(1), step, &mut r), 1.0);
    }
}

#[test]
fn bernoulli_empirical_mean() {
    let spec = BanditSpec::stationary(vec![0.5], Noise::Bernoulli);
    for seed in SEEDS {
        let mut r = rng(seed);
        let mean = (0..10_000).map(|t| pull(&spec, ArmId(0), t, &mut r)).sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() <= 0.02, "seed {seed}: {mean}");
    }
}

#[test]
fn jitter_stays_in_its_band_and_in_range() {
    let spec = BanditSpec::stationary(vec![0.5, 0.95], Noise::UniformJitter(0.2));
    let mut r = rng(9);
    let mut sum = 0.0;
    for t in 0..5000 {
        let a = pull(&spec, ArmId(0), t, &mut r);
        assert!((0.4..=0.6).contains(&a), "{a}");
        sum += a;
        let b = pull(&spec, ArmId(1), t, &mut r);
        assert!((0.85..=1.0).contains(&b), "{b}");
    }
    assert!((sum / 5000.0 - 0.5).abs() < 0.01);
}

#[test]
fn drift_is_clamped() {
    let spec = BanditSpec::stationary(vec![0.5, 0.5], Noise::Bernoulli).with_drift(Drift::Linear(vec![0.01, -0.01]));
    assert_eq!(spec.mean(ArmId(0), 10), 0.6);
    assert!((spec.mean(ArmId(1), 10) - 0.4).abs() < 1e-12);
    assert_eq!(spec.mean(ArmId(0), 1000), 1.0);
    assert_eq!(spec.mean(ArmId(1), 1000), 0.0);
    let switch = BanditSpec::stationary(vec![0.9, 0.5], Noise::Bernoulli).with_drift(Drift::Switch {
        at: 100,
        means: vec![0.1, 0.6],
    });
    assert_eq!(switch.best_arm(99), ArmId(0));
    assert_eq!(switch.best_arm(100), ArmId(1));
}

#[test]
fn specs_are_validated() {
    let bad = [
        BanditSpec::stationary(vec![], Noise::Bernoulli),
        BanditSpec::stationary(vec![1.5], Noise::Bernoulli),
        BanditSpec::stationary(vec![0.5], Noise::UniformJitter(-1.0)),
        BanditSpec::stationary(vec![0.5], Noise::Bernoulli).with_drift(Drift::Linear(vec![0.1, 0.1])),
        BanditSpec::stationary(vec![0.5], Noise::Bernoulli).with_drift(Drift::Linear(vec![f64::NAN])),
        BanditSpec::stationary(vec![0.5], Noise::Bernoulli).with_drift(Drift::Switch { at: 3, means: vec![-0.1] }),
    ];
    for spec in bad {
        assert!(spec.validate().is_err(), "{spec:?}");
    }
    let spec = BanditSpec::stationary(vec![0.2, 0.8], Noise::Bernoulli);
    let mut c = controller(Policy::Ucb, CreditAssignment::Average, 0.8, 2);
    assert_eq!(run_episode(&spec, &mut c, 0, &mut rng(0)), Err(EnvError::NoSteps));
    let mut c3 = controller(Policy::Ucb, CreditAssignment::Average, 0.8, 3);
    assert!(matches!(run_episode(&spec, &mut c3, 5, &mut rng(0)), Err(EnvError::ArmCount { .. })));
}

#[test]
fn one_step_episode() {
    let spec = BanditSpec::stationary(vec![0.2, 0.8], Noise::Bernoulli);
    let mut c = controller(Policy::ProbabilityMatching, CreditAssignment::Average, 0.8, 2);
    let ep = run_episode(&spec, &mut c, 1, &mut rng(0)).unwrap();
    assert_eq!(ep.trace.len(), 1);
    assert_eq!(ep.counts.iter().sum::<u64>(), 1);
}

#[test]
fn per_generation_controllers_update_every_step() {
    let spec = BanditSpec::stationary(vec![0.1, 0.9], Noise::Bernoulli);
    let config = AosConfig::for_arms(Policy::AdaptivePursuit, 2).with_cadence(Cadence::PerGeneration);
    let mut c = Controller::new(config, 2).unwrap();
    run_episode(&spec, &mut c, 50, &mut rng(3)).unwrap();
    assert!(c.pending().is_empty());
    assert_eq!(c.arms().iter().map(|a| a.plays).sum::<u64>(), 50);
}

/// Distance to `p_max` after `k` consecutive pursuit updates toward it.
fn pursuit_gap(p0: f64, p_max: f64, beta: f64, k: u32) -> f64 {
    (p_max - p0) * (1.0 - beta).powi(k as i32)
}

#[test]
fn adaptive_pursuit_converges_to_p_max() {
    let spec = BanditSpec::stationary(vec![0.1, 0.9], Noise::Bernoulli);
    let config = AosConfig::for_arms(Policy::AdaptivePursuit, 2);
    // The analytic bound is far below the tolerance well before step 500.
    assert!(pursuit_gap(0.5, config.p_max, config.beta, 100) < 1e-60);
    for seed in SEEDS {
        let mut c = controller(Policy::AdaptivePursuit, CreditAssignment::Average, 0.2, 2);
        run_episode(&spec, &mut c, 500, &mut rng(seed)).unwrap();
        let p = c.probabilities();
        assert!((p[1] - config.p_max).abs() <= 1e-3, "seed {seed}: {p:?}");
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn epsilon_greedy_exploits_at_the_greedy_rate() {
    let means = vec![0.1, 0.3, 0.5, 0.7, 0.9];
    let spec = BanditSpec::stationary(means, Noise::Bernoulli);
    let (eps, n) = (0.2, 5.0);
    let floor = 1.0 - eps + eps / n - 0.05;
    for seed in SEEDS {
        let mut c = controller(Policy::EpsilonGreedy, CreditAssignment::Average, 0.4, 5);
        let ep = run_episode(&spec, &mut c, 20_000, &mut rng(seed)).unwrap();
        let rate = ep.pull_rate(ArmId(4), 10_000..20_000);
        assert!(rate >= floor, "seed {seed}: {rate} < {floor}");
    }
}

#[test]
fn ucb_prefers_the_better_arm() {
    let spec = BanditSpec::stationary(vec![0.9, 0.1], Noise::Bernoulli);
    for seed in SEEDS {
        let mut c = controller(Policy::Ucb, CreditAssignment::Average, 0.8, 2);
        assert_eq!(c.config().explore_e, 10.0);
        let ep = run_episode(&spec, &mut c, 10_000, &mut rng(seed)).unwrap();
        let rate = ep.pull_rate(ArmId(0), 0..10_000);
        assert!(rate >= 0.7, "seed {seed}: {rate}");
    }
}

#[test]
fn average_quality_tracks_the_true_mean() {
    let means = [0.2, 0.5, 0.8];
    let spec = BanditSpec::stationary(means.to_vec(), Noise::Bernoulli);
    for seed in SEEDS {
        // p_min = 1/6 guarantees every arm a steady share of the pulls.
        let mut c = controller(Policy::ProbabilityMatching, CreditAssignment::Average, 0.8, 3);
        run_episode(&spec, &mut c, 6000, &mut rng(seed)).unwrap();
        for (arm, stats) in c.arms().iter().enumerate() {
            assert!(stats.plays >= 500, "seed {seed} arm {arm}: {} plays", stats.plays);
            assert!((stats.quality - means[arm]).abs() <= 0.05, "seed {seed} arm {arm}: {}", stats.quality);
        }
    }
}

/// Steps after the switch until the controller's best arm is the new best
/// arm, or `None` if that has not happened within `ceil(5 / alpha)` steps.
fn recovery(credit: CreditAssignment, seed: u64) -> Option<usize> {
    const SWITCH: u64 = 200;
    let alpha: f64 = 0.4;
    let window = (5.0 / alpha).ceil() as usize;
    let spec = BanditSpec::stationary(vec![0.9, 0.5], Noise::UniformJitter(0.2)).with_drift(Drift::Switch {
        at: SWITCH,
        means: vec![0.1, 0.6],
    });
    let mut c = controller(Policy::EpsilonGreedy, credit, alpha, 2);
    let ep = run_episode(&spec, &mut c, SWITCH + window as u64, &mut rng(seed)).unwrap();
    assert_eq!(ep.trace[SWITCH as usize - 1].best, ArmId(0), "old best learnt before the switch");
    ep.first_best(ArmId(1), SWITCH as usize).map(|t| t - SWITCH as usize)
}

#[test]
fn recency_weighting_follows_a_switch_that_averaging_misses() {
    for seed in SEEDS {
        let erwa = recovery(CreditAssignment::RecencyWeighted, seed);
        assert!(erwa.is_some(), "seed {seed}: ERWA never switched");
        assert_eq!(recovery(CreditAssignment::Average, seed), None, "seed {seed}");
    }
}
