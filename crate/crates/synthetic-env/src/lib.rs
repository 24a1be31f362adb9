//! Synthetic reward sources for testing operator-selection policies in
//! isolation from program repair.
//!
//! A [`BanditSpec`] fixes each arm's mean reward, how a single pull is
//! noised, and optionally how the means move over time. [`run_episode`]
//! drives an [`aos_core::Controller`] against it for a number of steps.

mod bandit;
mod episode;

pub use bandit::{pull, BanditSpec, Drift, EnvError, Noise};
pub use episode::{run_episode, Episode, TraceStep};
