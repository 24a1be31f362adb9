//! Experiment tooling around the repair engine: corpus loading, plan
//! manifests, parallel multi-attempt runs, success and efficiency metrics,
//! held-out patch quality and the corpus reachability gate.
//!
//! The `repair` binary is a thin command-line front end over this crate.

pub mod corpus;
pub mod experiment;
pub mod gate;
pub mod plan;
pub mod quality;
pub mod report;
pub mod seed;

pub use corpus::{load_bug, Bug, Corpus, CorpusError};
pub use experiment::{
    jobs_from_env, lower_median, run_experiment, summarize, AttemptRecord, BugError, ConfigRow, ExperimentReport,
};
pub use gate::{gate_bug, GateResult};
pub use plan::{ConfigSpec, ExperimentPlan, PlanError};
pub use quality::{check_patch, evaluate_quality, summarize_quality, PatchCheck, QualityScore, QualitySummary};
pub use report::{csv_fields, render_csv, render_json, render_table, write_outputs, CSV_HEADER};
pub use seed::{cell_seed, fnv1a64};
