//! Adaptive operator selection.
//!
//! A [`Controller`] learns which of `N` interchangeable arms (mutation
//! operators, operator groups, or anything else) pays off, using one of four
//! policies:
//!
//! * probability matching: selection probability proportional to quality,
//!   floored at `p_min`;
//! * adaptive pursuit: the best arm's probability is pulled toward `p_max`,
//!   every other arm toward `p_min`;
//! * epsilon-greedy: explore uniformly with probability `epsilon`, otherwise
//!   take the best arm;
//! * UCB: maximise `Q + E * sqrt(ln(total plays)) / plays`.
//!
//! Quality is either the plain average of an arm's rewards or an exponential
//! recency-weighted average. Rewards can be credited immediately or buffered
//! and applied once per generation.

mod config;
mod controller;
mod error;
mod reward;
pub mod snapshot;
mod stats;

pub use config::{AosConfig, Cadence, CreditAssignment, Policy, RewardType};
pub use controller::Controller;
pub use error::{AosError, Result};
pub use reward::{compute_reward, RewardEvent};
pub use snapshot::{ArmSnapshot, Snapshot};
pub use stats::{ArmId, OperatorStats};
