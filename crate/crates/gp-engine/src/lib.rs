//! Genetic-programming program repair.
//!
//! Individuals are edit lists over the buggy program. Each run starts from
//! a population of single-edit mutants, then alternates tournament
//! selection, one-point crossover on edit lists and one mutation per
//! individual, stopping at the first variant that passes the whole repair
//! suite. Which mutation operator to apply is decided either by an
//! [`aos_core::Controller`] rewarded with each mutant's fitness, or
//! uniformly at random for the baseline.

mod error;
mod scheme;
mod search;

pub use error::RepairError;
pub use scheme::{arm_of, ArmScheme};
pub use search::{
    run_repair, run_repair_uniform, BornBy, CreditRecord, GenerationRecord, Problem, RepairOutcome, SearchConfig,
    Variant,
};
