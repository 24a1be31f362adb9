use crate::config::RewardType;
use crate::stats::ArmId;

/// Outcome of evaluating one operator-produced offspring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardEvent {
    pub arm: ArmId,
    pub raw_fitness: f64,
    pub parent_fitness: Option<f64>,
}

impl RewardEvent {
    pub fn new(arm: ArmId, raw_fitness: f64, parent_fitness: Option<f64>) -> Self {
        RewardEvent {
            arm,
            raw_fitness,
            parent_fitness,
        }
    }
}

/// Turns an evaluated offspring into the reward credited to its operator.
///
/// The relative form falls back to the raw fitness when the parent scored
/// zero (or there is no parent), so the reward is never negative and never
/// divides by zero. It is not capped above.
pub fn compute_reward(event: &RewardEvent, reward: RewardType) -> f64 {
    match reward {
        RewardType::Raw => event.raw_fitness,
        RewardType::RelativeToParent => match event.parent_fitness {
            Some(parent) if parent != 0.0 => event.raw_fitness / parent,
            _ => event.raw_fitness,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_divides_by_parent() {
        let e = RewardEvent::new(ArmId(0), 0.75, Some(0.5));
        assert!((compute_reward(&e, RewardType::RelativeToParent) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn relative_passes_through_on_zero_parent() {
        let e = RewardEvent::new(ArmId(0), 0.4, Some(0.0));
        assert_eq!(compute_reward(&e, RewardType::RelativeToParent), 0.4);
        let e = RewardEvent::new(ArmId(0), 0.4, None);
        assert_eq!(compute_reward(&e, RewardType::RelativeToParent), 0.4);
    }

    #[test]
    fn raw_is_identity() {
        let e = RewardEvent::new(ArmId(1), 0.9, Some(0.3));
        assert_eq!(compute_reward(&e, RewardType::Raw), 0.9);
    }
}
