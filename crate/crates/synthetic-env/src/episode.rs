use aos_core::{compute_reward, ArmId, Cadence, Controller, RewardEvent, RewardType, Snapshot};
use rand::Rng;

use crate::bandit::{pull, BanditSpec, EnvError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub arm: ArmId,
    pub reward: f64,
    /// The controller's highest-quality arm after this step's credit.
    pub best: ArmId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub trace: Vec<TraceStep>,
    /// Pulls per arm.
    pub counts: Vec<u64>,
    pub snapshot: Snapshot,
}

impl Episode {
    /// Fraction of the steps in `range` that pulled `arm`.
    pub fn pull_rate(&self, arm: ArmId, range: std::ops::Range<usize>) -> f64 {
        let steps = &self.trace[range];
        steps.iter().filter(|s| s.arm == arm).count() as f64 / steps.len().max(1) as f64
    }

    /// First step at or after `from` whose best-quality arm is `arm`.
    pub fn first_best(&self, arm: ArmId, from: usize) -> Option<usize> {
        (from..self.trace.len()).find(|&t| self.trace[t].best == arm)
    }
}

/// Runs `steps` rounds of select, pull, credit the raw reward.
///
/// Rewards are applied one at a time. A controller configured for
/// per-generation cadence treats every step as its own generation.
pub fn run_episode<R: Rng + ?Sized>(
    spec: &BanditSpec,
    controller: &mut Controller,
    steps: u64,
    rng: &mut R,
) -> Result<Episode, EnvError> {
    spec.validate()?;
    if steps == 0 {
        return Err(EnvError::NoSteps);
    }
    if controller.n_arms() != spec.n_arms() {
        return Err(EnvError::ArmCount {
            controller: controller.n_arms(),
            bandit: spec.n_arms(),
        });
    }
    let mut trace = Vec::with_capacity(steps as usize);
    let mut counts = vec![0; spec.n_arms()];
    for step in 0..steps {
        let arm = controller.select_arm(rng);
        let raw = pull(spec, arm, step, rng);
        let reward = compute_reward(&RewardEvent::new(arm, raw, None), RewardType::Raw);
        controller.credit(arm, reward)?;
        if controller.config().cadence == Cadence::PerGeneration {
            controller.flush_generation()?;
        }
        counts[arm.index()] += 1;
        trace.push(TraceStep {
            arm,
            reward,
            best: controller.best_arm(),
        });
    }
    Ok(Episode {
        trace,
        counts,
        snapshot: controller.snapshot(),
    })
}
