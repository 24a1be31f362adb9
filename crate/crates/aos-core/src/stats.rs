use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of one selectable arm, in `[0, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArmId(pub usize);

impl ArmId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ArmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Learned state of a single arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorStats {
    /// Estimated quality.
    pub quality: f64,
    /// Number of rewards applied to this arm.
    pub plays: u64,
    /// Selection probability; only meaningful for table-based policies.
    pub probability: f64,
    reward_history: Vec<f64>,
    reward_sum: f64,
}

impl OperatorStats {
    pub(crate) fn fresh(probability: f64) -> Self {
        OperatorStats {
            quality: 1.0,
            plays: 0,
            probability,
            reward_history: Vec::new(),
            reward_sum: 0.0,
        }
    }

    /// Every reward applied so far, in application order.
    pub fn reward_history(&self) -> &[f64] {
        &self.reward_history
    }

    pub(crate) fn record(&mut self, reward: f64) {
        self.reward_history.push(reward);
        self.reward_sum += reward;
        self.plays += 1;
    }

    pub(crate) fn history_mean(&self) -> f64 {
        if self.reward_history.is_empty() {
            self.quality
        } else {
            self.reward_sum / self.reward_history.len() as f64
        }
    }
}
