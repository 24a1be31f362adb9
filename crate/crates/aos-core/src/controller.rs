use rand::Rng;

use crate::config::{AosConfig, Cadence, CreditAssignment, Policy};
use crate::error::{AosError, Result};
use crate::snapshot::{ArmSnapshot, Snapshot};
use crate::stats::{ArmId, OperatorStats};

/// Adaptive operator selection state machine.
///
/// A controller owns one [`OperatorStats`] per arm. Rewards go in through
/// [`Controller::credit`]; arms come out of [`Controller::select_arm`]. It is
/// single-writer: the search loop that owns it is the only caller.
#[derive(Debug, Clone)]
pub struct Controller {
    config: AosConfig,
    arms: Vec<OperatorStats>,
    pending: Vec<(ArmId, f64)>,
}

impl Controller {
    pub fn new(config: AosConfig, n_arms: usize) -> Result<Self> {
        config.validate(n_arms)?;
        let uniform = 1.0 / n_arms as f64;
        Ok(Controller {
            config,
            arms: vec![OperatorStats::fresh(uniform); n_arms],
            pending: Vec::new(),
        })
    }

    pub fn config(&self) -> &AosConfig {
        &self.config
    }

    pub fn n_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[OperatorStats] {
        &self.arms
    }

    pub fn stats(&self, arm: ArmId) -> Option<&OperatorStats> {
        self.arms.get(arm.0)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.arms.iter().map(|a| a.probability).collect()
    }

    pub fn qualities(&self) -> Vec<f64> {
        self.arms.iter().map(|a| a.quality).collect()
    }

    /// Rewards credited but not yet applied (per-generation cadence only).
    pub fn pending(&self) -> &[(ArmId, f64)] {
        &self.pending
    }

    /// Credits `reward` to `arm`. Negative and NaN rewards are clamped to 0.
    ///
    /// Under per-mutation cadence the quality and the probability table are
    /// updated immediately; under per-generation cadence the reward waits in
    /// the pending buffer until [`Controller::flush_generation`].
    pub fn credit(&mut self, arm: ArmId, reward: f64) -> Result<()> {
        self.check_arm(arm)?;
        let reward = if reward > 0.0 { reward } else { 0.0 };
        match self.config.cadence {
            Cadence::PerMutation => {
                self.apply(arm, reward);
                self.recompute_probabilities();
            }
            Cadence::PerGeneration => self.pending.push((arm, reward)),
        }
        Ok(())
    }

    /// Applies the pending buffer in arrival order, then recomputes the
    /// probability table once.
    pub fn flush_generation(&mut self) -> Result<()> {
        if self.config.cadence != Cadence::PerGeneration {
            return Err(AosError::CadenceMisuse);
        }
        if self.pending.is_empty() {
            return Ok(());
        }
        let pending = std::mem::take(&mut self.pending);
        for (arm, reward) in pending {
            self.apply(arm, reward);
        }
        self.recompute_probabilities();
        Ok(())
    }

    fn apply(&mut self, arm: ArmId, reward: f64) {
        let alpha = self.config.alpha;
        let stats = &mut self.arms[arm.0];
        stats.record(reward);
        stats.quality = match self.config.credit {
            CreditAssignment::Average => stats.history_mean(),
            CreditAssignment::RecencyWeighted => stats.quality + alpha * (reward - stats.quality),
        };
    }

    /// Refreshes the probability table from the current qualities.
    ///
    /// Probability matching recomputes it from scratch; adaptive pursuit pulls
    /// the current table toward `p_max` for the best arm and `p_min` for the
    /// rest. Epsilon-greedy and UCB keep no table, so this is a no-op for them.
    pub fn recompute_probabilities(&mut self) {
        let n = self.arms.len() as f64;
        let AosConfig {
            p_min, p_max, beta, ..
        } = self.config;
        match self.config.policy {
            Policy::ProbabilityMatching => {
                let total: f64 = self.arms.iter().map(|a| a.quality).sum();
                if total > 0.0 {
                    let spread = 1.0 - n * p_min;
                    for arm in &mut self.arms {
                        arm.probability = p_min + spread * arm.quality / total;
                    }
                } else {
                    for arm in &mut self.arms {
                        arm.probability = 1.0 / n;
                    }
                }
            }
            Policy::AdaptivePursuit => {
                let best = self.best_arm();
                for (i, arm) in self.arms.iter_mut().enumerate() {
                    let target = if i == best.0 { p_max } else { p_min };
                    arm.probability += beta * (target - arm.probability);
                }
            }
            Policy::EpsilonGreedy | Policy::Ucb => {}
        }
    }

    /// Arm with the highest quality; ties go to the lowest index.
    pub fn best_arm(&self) -> ArmId {
        let mut best = 0;
        for (i, arm) in self.arms.iter().enumerate().skip(1) {
            if arm.quality > self.arms[best].quality {
                best = i;
            }
        }
        ArmId(best)
    }

    pub fn select_arm<R: Rng + ?Sized>(&self, rng: &mut R) -> ArmId {
        match self.config.policy {
            Policy::ProbabilityMatching | Policy::AdaptivePursuit => {
                self.select_with(rng.gen::<f64>(), |_| 0)
            }
            Policy::EpsilonGreedy => {
                let u = rng.gen::<f64>();
                self.select_with(u, |n| rng.gen_range(0..n))
            }
            Policy::Ucb => self.select_with(0.0, |_| 0),
        }
    }

    /// Selection with the randomness supplied by the caller.
    ///
    /// `u` is a uniform draw in `[0, 1)`: table policies invert the cumulative
    /// probabilities at `u`, epsilon-greedy explores when `u < epsilon`.
    /// `explore` maps the arm count to a uniformly drawn index and is only
    /// invoked on epsilon-greedy's exploration branch. UCB ignores both.
    pub fn select_with(&self, u: f64, explore: impl FnOnce(usize) -> usize) -> ArmId {
        let n = self.arms.len();
        match self.config.policy {
            Policy::ProbabilityMatching | Policy::AdaptivePursuit => {
                let total: f64 = self.arms.iter().map(|a| a.probability).sum();
                let target = u * total;
                let mut acc = 0.0;
                for (i, arm) in self.arms.iter().enumerate() {
                    acc += arm.probability;
                    if target < acc {
                        return ArmId(i);
                    }
                }
                // Rounding can leave `target` just past the final sum.
                let last = self
                    .arms
                    .iter()
                    .rposition(|a| a.probability > 0.0)
                    .unwrap_or(n - 1);
                ArmId(last)
            }
            Policy::EpsilonGreedy => {
                if u < self.config.epsilon {
                    ArmId(explore(n).min(n - 1))
                } else {
                    self.best_arm()
                }
            }
            Policy::Ucb => {
                if let Some(unplayed) = self.arms.iter().position(|a| a.plays == 0) {
                    return ArmId(unplayed);
                }
                let total_plays: u64 = self.arms.iter().map(|a| a.plays).sum();
                let bonus = (total_plays as f64).ln().sqrt();
                let e = self.config.explore_e;
                let mut best = 0;
                let mut best_score = f64::NEG_INFINITY;
                for (i, arm) in self.arms.iter().enumerate() {
                    let score = arm.quality + e * bonus / arm.plays as f64;
                    if score > best_score {
                        best = i;
                        best_score = score;
                    }
                }
                ArmId(best)
            }
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            policy: self.config.policy,
            credit: self.config.credit,
            reward: self.config.reward,
            cadence: self.config.cadence,
            alpha: self.config.alpha,
            arms: self
                .arms
                .iter()
                .map(|a| ArmSnapshot {
                    quality: a.quality,
                    plays: a.plays,
                    probability: a.probability,
                })
                .collect(),
        }
    }

    fn check_arm(&self, arm: ArmId) -> Result<()> {
        if arm.0 < self.arms.len() {
            Ok(())
        } else {
            Err(AosError::ArmOutOfRange {
                arm: arm.0,
                n_arms: self.arms.len(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RewardType;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn controller(policy: Policy, n: usize) -> Controller {
        Controller::new(AosConfig::for_arms(policy, n), n).unwrap()
    }

    fn immediate(policy: Policy, n: usize, credit: CreditAssignment) -> Controller {
        let c = AosConfig::for_arms(policy, n)
            .with_credit(credit)
            .with_cadence(Cadence::PerMutation);
        Controller::new(c, n).unwrap()
    }

    #[test]
    fn fresh_controller_is_uniform_and_optimistic() {
        for policy in Policy::ALL {
            let c = controller(policy, 3);
            for arm in c.arms() {
                assert_eq!(arm.quality, 1.0);
                assert_eq!(arm.plays, 0);
                assert!((arm.probability - 1.0 / 3.0).abs() < 1e-12);
            }
            assert!(c.pending().is_empty());
        }
    }

    #[test]
    fn rejects_invalid_config() {
        let mut cfg = AosConfig::for_arms(Policy::ProbabilityMatching, 3);
        cfg.p_min = 0.4;
        let err = Controller::new(cfg, 3).unwrap_err();
        assert!(err.to_string().contains("p_min"), "{err}");
    }

    #[test]
    fn recency_weighted_updates() {
        let mut cfg = AosConfig::for_arms(Policy::Ucb, 2)
            .with_credit(CreditAssignment::RecencyWeighted)
            .with_cadence(Cadence::PerMutation);
        cfg.alpha = 0.8;
        let mut c = Controller::new(cfg, 2).unwrap();
        c.credit(ArmId(0), 0.0).unwrap();
        assert!((c.arms()[0].quality - 0.2).abs() < 1e-12);

        let cfg = AosConfig::for_arms(Policy::AdaptivePursuit, 2)
            .with_credit(CreditAssignment::RecencyWeighted)
            .with_cadence(Cadence::PerMutation)
            .with_alpha(0.2);
        let mut c = Controller::new(cfg, 2).unwrap();
        c.arms[0].quality = 0.2;
        c.credit(ArmId(0), 1.0).unwrap();
        assert!((c.arms()[0].quality - 0.36).abs() < 1e-12);
    }

    #[test]
    fn average_of_history() {
        let mut c = immediate(Policy::EpsilonGreedy, 2, CreditAssignment::Average);
        for r in [0.2, 0.4, 0.6] {
            c.credit(ArmId(1), r).unwrap();
        }
        assert!((c.arms()[1].quality - 0.4).abs() < 1e-12);
        assert_eq!(c.arms()[1].plays, 3);
        assert_eq!(c.arms()[0].quality, 1.0);
    }

    #[test]
    fn credit_rejects_unknown_arm() {
        let mut c = controller(Policy::Ucb, 3);
        assert_eq!(
            c.credit(ArmId(3), 0.5),
            Err(AosError::ArmOutOfRange { arm: 3, n_arms: 3 })
        );
    }

    #[test]
    fn negative_reward_is_clamped() {
        let mut c = immediate(Policy::Ucb, 2, CreditAssignment::Average);
        c.credit(ArmId(0), -3.0).unwrap();
        assert_eq!(c.arms()[0].quality, 0.0);
        c.credit(ArmId(0), f64::NAN).unwrap();
        assert_eq!(c.arms()[0].quality, 0.0);
    }

    #[test]
    fn per_generation_buffers_until_flush() {
        let mut c = controller(Policy::ProbabilityMatching, 3);
        c.credit(ArmId(0), 0.5).unwrap();
        assert_eq!(c.arms()[0].quality, 1.0);
        assert_eq!(c.arms()[0].plays, 0);
        assert_eq!(c.pending(), &[(ArmId(0), 0.5)]);
        c.flush_generation().unwrap();
        assert_eq!(c.arms()[0].quality, 0.5);
        assert_eq!(c.arms()[1].quality, 1.0);
        assert_eq!(c.arms()[2].quality, 1.0);
        assert!(c.pending().is_empty());
    }

    #[test]
    fn flush_of_two_rewards_is_their_mean() {
        let mut c = controller(Policy::ProbabilityMatching, 3);
        c.credit(ArmId(0), 0.4).unwrap();
        c.credit(ArmId(0), 0.8).unwrap();
        c.flush_generation().unwrap();
        assert!((c.arms()[0].quality - 0.6).abs() < 1e-12);
    }

    #[test]
    fn empty_flush_is_a_no_op() {
        let mut c = controller(Policy::AdaptivePursuit, 3);
        let before = c.probabilities();
        c.flush_generation().unwrap();
        assert_eq!(before, c.probabilities());
        assert_eq!(c.qualities(), vec![1.0; 3]);
    }

    #[test]
    fn flush_under_per_mutation_is_misuse() {
        let mut c = immediate(Policy::AdaptivePursuit, 3, CreditAssignment::Average);
        assert_eq!(c.flush_generation(), Err(AosError::CadenceMisuse));
    }

    #[test]
    fn probability_matching_values() {
        let mut c = controller(Policy::ProbabilityMatching, 3);
        c.recompute_probabilities();
        for p in c.probabilities() {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
        c.arms[0].quality = 2.0;
        c.recompute_probabilities();
        let p = c.probabilities();
        assert!((p[0] - 5.0 / 12.0).abs() < 1e-12);
        assert!((p[1] - 7.0 / 24.0).abs() < 1e-12);
        assert!((p[2] - 7.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn probability_matching_zero_quality_falls_back_to_uniform() {
        let mut c = immediate(Policy::ProbabilityMatching, 4, CreditAssignment::Average);
        for i in 0..4 {
            c.credit(ArmId(i), 0.0).unwrap();
        }
        for p in c.probabilities() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn adaptive_pursuit_single_pull() {
        let mut c = controller(Policy::AdaptivePursuit, 3);
        c.arms[1].quality = 2.0;
        c.recompute_probabilities();
        let p = c.probabilities();
        assert!((p[1] - 0.6).abs() < 1e-12);
        let other = 1.0 / 3.0 + 0.8 * (1.0 / 6.0 - 1.0 / 3.0);
        assert!((p[0] - other).abs() < 1e-12);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_pursuit_tie_goes_to_lowest_index() {
        let mut c = controller(Policy::AdaptivePursuit, 3);
        c.recompute_probabilities();
        assert!((c.probabilities()[0] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn greedy_branch_picks_best() {
        let mut c = controller(Policy::EpsilonGreedy, 2);
        c.arms[0].quality = 0.1;
        c.arms[1].quality = 0.9;
        assert_eq!(c.select_with(0.5, |_| unreachable!()), ArmId(1));
        assert_eq!(c.select_with(0.1, |_| 0), ArmId(0));
    }

    #[test]
    fn ucb_plays_every_arm_first() {
        let mut c = immediate(Policy::Ucb, 3, CreditAssignment::Average);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for expected in 0..3 {
            let arm = c.select_arm(&mut rng);
            assert_eq!(arm, ArmId(expected));
            c.credit(arm, 0.5).unwrap();
        }
    }

    #[test]
    fn ucb_prefers_the_less_played_arm() {
        let mut c = controller(Policy::Ucb, 2);
        c.arms[0].quality = 0.5;
        c.arms[0].plays = 1;
        c.arms[1].quality = 0.5;
        c.arms[1].plays = 3;
        assert_eq!(c.select_with(0.0, |_| 0), ArmId(0));
    }

    #[test]
    fn degenerate_table_always_picks_its_arm() {
        let mut c = controller(Policy::ProbabilityMatching, 3);
        c.arms[0].probability = 1.0;
        c.arms[1].probability = 0.0;
        c.arms[2].probability = 0.0;
        for u in [0.0, 0.3, 0.999_999, 1.0 - f64::EPSILON] {
            assert_eq!(c.select_with(u, |_| 0), ArmId(0));
        }
    }

    #[test]
    fn selection_does_not_count_plays() {
        let c = controller(Policy::Ucb, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let _ = c.select_arm(&mut rng);
        assert!(c.arms().iter().all(|a| a.plays == 0));
    }

    #[test]
    fn snapshot_reflects_state() {
        let cfg = AosConfig::for_arms(Policy::EpsilonGreedy, 2)
            .with_reward(RewardType::RelativeToParent)
            .with_cadence(Cadence::PerMutation);
        let mut c = Controller::new(cfg, 2).unwrap();
        c.credit(ArmId(1), 0.25).unwrap();
        let snap = c.snapshot();
        assert_eq!(snap.arms[1].plays, 1);
        assert_eq!(snap.arms[1].quality, 0.25);
        assert_eq!(snap.reward, RewardType::RelativeToParent);
    }
}
