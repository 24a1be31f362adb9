use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{AosError, Result};

/// Operator selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Policy {
    ProbabilityMatching,
    AdaptivePursuit,
    EpsilonGreedy,
    Ucb,
}

impl Policy {
    pub const ALL: [Policy; 4] = [
        Policy::ProbabilityMatching,
        Policy::AdaptivePursuit,
        Policy::EpsilonGreedy,
        Policy::Ucb,
    ];

    /// Learning rate used when recency-weighted credit is selected without an
    /// explicit alpha.
    pub fn tuned_alpha(self) -> f64 {
        match self {
            Policy::ProbabilityMatching | Policy::Ucb => 0.8,
            Policy::AdaptivePursuit => 0.2,
            Policy::EpsilonGreedy => 0.4,
        }
    }

    /// Whether selection samples from a maintained probability table.
    pub fn uses_probability_table(self) -> bool {
        matches!(self, Policy::ProbabilityMatching | Policy::AdaptivePursuit)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::ProbabilityMatching => "pm",
            Policy::AdaptivePursuit => "ap",
            Policy::EpsilonGreedy => "egreedy",
            Policy::Ucb => "ucb",
        }
    }
}

/// How rewards accumulate into an arm's estimated quality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CreditAssignment {
    /// Arithmetic mean of every reward the arm has received.
    Average,
    /// `Q <- Q + alpha * (r - Q)`, with alpha taken from [`AosConfig::alpha`].
    RecencyWeighted,
}

impl CreditAssignment {
    pub fn as_str(self) -> &'static str {
        match self {
            CreditAssignment::Average => "avg",
            CreditAssignment::RecencyWeighted => "erwa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RewardType {
    /// The offspring's fitness as-is.
    Raw,
    /// Offspring fitness divided by its direct parent's fitness.
    RelativeToParent,
}

impl RewardType {
    pub fn as_str(self) -> &'static str {
        match self {
            RewardType::Raw => "raw",
            RewardType::RelativeToParent => "relative",
        }
    }
}

/// When credited rewards reach the quality estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cadence {
    /// Rewards are buffered and applied in one batch by `flush_generation`.
    PerGeneration,
    /// Rewards are applied as soon as they are credited.
    PerMutation,
}

impl Cadence {
    pub fn as_str(self) -> &'static str {
        match self {
            Cadence::PerGeneration => "generation",
            Cadence::PerMutation => "mutation",
        }
    }
}

macro_rules! impl_text {
    ($ty:ty, $what:literal, $( $text:literal => $variant:expr ),+ $(,)?) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
                match s {
                    $( $text => Ok($variant), )+
                    other => Err(format!(concat!("unknown ", $what, " `{}`"), other)),
                }
            }
        }
    };
}

impl_text!(Policy, "policy",
    "pm" => Policy::ProbabilityMatching,
    "ap" => Policy::AdaptivePursuit,
    "egreedy" => Policy::EpsilonGreedy,
    "ucb" => Policy::Ucb,
);
impl_text!(CreditAssignment, "credit assignment",
    "avg" => CreditAssignment::Average,
    "erwa" => CreditAssignment::RecencyWeighted,
);
impl_text!(RewardType, "reward type",
    "raw" => RewardType::Raw,
    "relative" => RewardType::RelativeToParent,
);
impl_text!(Cadence, "cadence",
    "generation" => Cadence::PerGeneration,
    "mutation" => Cadence::PerMutation,
);

/// Full controller configuration.
///
/// The probability bounds depend on the number of arms, so the usual entry
/// point is [`AosConfig::for_arms`], which fills in the standard defaults:
/// `p_min = 1/(2N)`, `p_max = 1 - (N-1) p_min`, `beta = 0.8`,
/// `epsilon = 0.2`, `explore_e = 10` and the policy's tuned alpha.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AosConfig {
    pub policy: Policy,
    pub credit: CreditAssignment,
    pub reward: RewardType,
    pub cadence: Cadence,
    pub p_min: f64,
    pub p_max: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub explore_e: f64,
    pub alpha: f64,
}

impl AosConfig {
    pub fn for_arms(policy: Policy, n_arms: usize) -> Self {
        let n = n_arms.max(1) as f64;
        let p_min = 1.0 / (2.0 * n);
        AosConfig {
            policy,
            credit: CreditAssignment::Average,
            reward: RewardType::Raw,
            cadence: Cadence::PerGeneration,
            p_min,
            p_max: 1.0 - (n - 1.0) * p_min,
            beta: 0.8,
            epsilon: 0.2,
            explore_e: 10.0,
            alpha: policy.tuned_alpha(),
        }
    }

    pub fn with_credit(mut self, credit: CreditAssignment) -> Self {
        self.credit = credit;
        self
    }

    pub fn with_reward(mut self, reward: RewardType) -> Self {
        self.reward = reward;
        self
    }

    pub fn with_cadence(mut self, cadence: Cadence) -> Self {
        self.cadence = cadence;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Checks every field against `n_arms`. The first offending field is
    /// named in the error.
    pub fn validate(&self, n_arms: usize) -> Result<()> {
        fn bad(field: &'static str, reason: impl Into<String>) -> Result<()> {
            Err(AosError::InvalidConfig {
                field,
                reason: reason.into(),
            })
        }

        if n_arms < 2 {
            return bad("n_arms", format!("must be at least 2, got {n_arms}"));
        }
        let n = n_arms as f64;
        if !self.p_min.is_finite() || self.p_min < 0.0 {
            return bad("p_min", format!("must be a non-negative number, got {}", self.p_min));
        }
        if self.p_min * n > 1.0 + 1e-12 {
            return bad(
                "p_min",
                format!("{} * {n_arms} arms exceeds 1", self.p_min),
            );
        }
        if !self.p_max.is_finite() || self.p_max < self.p_min || self.p_max > 1.0 {
            return bad("p_max", format!("must lie in [p_min, 1], got {}", self.p_max));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return bad("beta", format!("must lie in [0, 1], got {}", self.beta));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return bad("epsilon", format!("must lie in [0, 1], got {}", self.epsilon));
        }
        if !self.explore_e.is_finite() || self.explore_e < 0.0 {
            return bad("explore_e", format!("must be non-negative, got {}", self.explore_e));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha", format!("must lie in (0, 1], got {}", self.alpha));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_bounds_for_three_arms() {
        let c = AosConfig::for_arms(Policy::ProbabilityMatching, 3);
        assert!((c.p_min - 1.0 / 6.0).abs() < 1e-12);
        assert!((c.p_max - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(c.beta, 0.8);
        assert_eq!(c.epsilon, 0.2);
        assert_eq!(c.explore_e, 10.0);
    }

    #[test]
    fn standard_bounds_for_two_arms() {
        let c = AosConfig::for_arms(Policy::AdaptivePursuit, 2);
        assert!((c.p_min - 0.25).abs() < 1e-12);
        assert!((c.p_max - 0.75).abs() < 1e-12);
    }

    #[test]
    fn tuned_alphas() {
        assert_eq!(AosConfig::for_arms(Policy::ProbabilityMatching, 3).alpha, 0.8);
        assert_eq!(AosConfig::for_arms(Policy::Ucb, 3).alpha, 0.8);
        assert_eq!(AosConfig::for_arms(Policy::AdaptivePursuit, 3).alpha, 0.2);
        assert_eq!(AosConfig::for_arms(Policy::EpsilonGreedy, 3).alpha, 0.4);
    }

    #[test]
    fn validation_names_the_field() {
        let mut c = AosConfig::for_arms(Policy::ProbabilityMatching, 3);
        c.p_min = 0.5;
        match c.validate(3) {
            Err(AosError::InvalidConfig { field, .. }) => assert_eq!(field, "p_min"),
            other => panic!("expected p_min error, got {other:?}"),
        }

        let c = AosConfig::for_arms(Policy::Ucb, 3).with_alpha(0.0);
        assert!(matches!(
            c.validate(3),
            Err(AosError::InvalidConfig { field: "alpha", .. })
        ));
        let c = AosConfig::for_arms(Policy::Ucb, 3).with_alpha(1.5);
        assert!(matches!(
            c.validate(3),
            Err(AosError::InvalidConfig { field: "alpha", .. })
        ));
        assert!(matches!(
            AosConfig::for_arms(Policy::Ucb, 3).validate(1),
            Err(AosError::InvalidConfig { field: "n_arms", .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        for p in Policy::ALL {
            assert_eq!(p.to_string().parse::<Policy>().unwrap(), p);
        }
        assert_eq!("erwa".parse::<CreditAssignment>().unwrap(), CreditAssignment::RecencyWeighted);
        assert_eq!("relative".parse::<RewardType>().unwrap(), RewardType::RelativeToParent);
        assert_eq!("mutation".parse::<Cadence>().unwrap(), Cadence::PerMutation);
        assert!("greedy".parse::<Policy>().is_err());
    }
}
