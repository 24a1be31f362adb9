//! Multi-bug, multi-attempt, multi-configuration repair experiments.

use aos_core::Snapshot;
use gp_engine::{run_repair, run_repair_uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use toylang::Patch;

use crate::corpus::{Bug, Corpus, CorpusError};
use crate::plan::{ConfigSpec, ExperimentPlan};
use crate::quality::{evaluate_quality, summarize_quality, QualityScore, QualitySummary};
use crate::seed::cell_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub bug: String,
    pub config: String,
    pub attempt: u32,
    pub seed: u64,
    pub patched: bool,
    pub variants_evaluated_at_patch: Option<u64>,
    pub total_evaluations: u64,
    /// The patch in patch-file format.
    pub patch: Option<String>,
    pub quality: Option<QualityScore>,
    pub operator_draws: Vec<u64>,
    pub aos_snapshot: Option<Snapshot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BugError {
    pub bug: String,
    pub message: String,
}

/// One summary row per configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRow {
    pub label: String,
    pub spec: ConfigSpec,
    pub attempts: usize,
    pub successes: usize,
    /// Successes over all attempts of this configuration.
    pub success_rate_micro: f64,
    /// Mean over bugs of each bug's success rate.
    pub success_rate_macro: f64,
    pub bugs_patched: usize,
    pub avg_variant: Option<f64>,
    pub median_variant: Option<u64>,
    pub quality: QualitySummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub plan: ExperimentPlan,
    pub rows: Vec<ConfigRow>,
    pub attempts: Vec<AttemptRecord>,
    pub errors: Vec<BugError>,
}

/// Lower median: for an even count, the smaller of the two middle values.
pub fn lower_median(values: &[u64]) -> Option<u64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    Some(v[(v.len() - 1) / 2])
}

/// Aggregates the attempts recorded for one configuration.
pub fn summarize(spec: &ConfigSpec, attempts: &[AttemptRecord]) -> ConfigRow {
    let label = spec.label();
    let mine: Vec<&AttemptRecord> = attempts.iter().filter(|a| a.config == label).collect();
    let successes = mine.iter().filter(|a| a.patched).count();
    let mut bugs: Vec<&str> = mine.iter().map(|a| a.bug.as_str()).collect();
    bugs.sort_unstable();
    bugs.dedup();
    let per_bug: Vec<(usize, usize)> = bugs
        .iter()
        .map(|b| {
            let of_bug = mine.iter().filter(|a| a.bug == *b);
            let (n, ok) = of_bug.fold((0, 0), |(n, ok), a| (n + 1, ok + a.patched as usize));
            (n, ok)
        })
        .collect();
    let variants: Vec<u64> = mine.iter().filter_map(|a| a.variants_evaluated_at_patch).collect();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    ConfigRow {
        label,
        spec: spec.clone(),
        attempts: mine.len(),
        successes,
        success_rate_micro: ratio(successes, mine.len()),
        success_rate_macro: if per_bug.is_empty() {
            0.0
        } else {
            per_bug.iter().map(|(n, ok)| ratio(*ok, *n)).sum::<f64>() / per_bug.len() as f64
        },
        bugs_patched: per_bug.iter().filter(|(_, ok)| *ok > 0).count(),
        avg_variant: (!variants.is_empty()).then(|| variants.iter().sum::<u64>() as f64 / variants.len() as f64),
        median_variant: lower_median(&variants),
        quality: summarize_quality(mine.iter().filter_map(|a| a.quality.as_ref())),
    }
}

fn run_cell(plan: &ExperimentPlan, spec: &ConfigSpec, bug: &Bug, attempt: u32) -> Result<AttemptRecord, BugError> {
    let label = spec.label();
    let seed = cell_seed(plan.base_seed, &bug.name, &label, attempt);
    let config = spec.search_config(seed, plan.population, plan.generations);
    let problem = bug.problem();
    let outcome = if spec.is_uniform() {
        run_repair_uniform(&problem, &config)
    } else {
        run_repair(&problem, &config)
    }
    .map_err(|e| BugError {
        bug: bug.name.clone(),
        message: format!("{label} attempt {attempt}: {e}"),
    })?;
    let quality = outcome
        .patch
        .as_ref()
        .and_then(|v| evaluate_quality(&v.program(&bug.program), bug.heldout.as_ref()));
    let patch = outcome.patch.as_ref().map(|v| {
        Patch {
            bug: bug.name.clone(),
            edits: v.edits.clone(),
        }
        .to_string()
    });
    Ok(AttemptRecord {
        bug: bug.name.clone(),
        config: label,
        attempt,
        seed,
        patched: outcome.patched,
        variants_evaluated_at_patch: outcome.variants_evaluated_at_patch,
        total_evaluations: outcome.total_evaluations,
        patch,
        quality,
        operator_draws: outcome.operator_draws,
        aos_snapshot: outcome.aos_snapshot,
    })
}

/// Runs every (configuration, bug, attempt) cell on a pool of `jobs`
/// workers. Cells are independent; results come back in plan order, so
/// the report does not depend on `jobs`.
pub fn run_experiment(plan: &ExperimentPlan, corpus: &Corpus, jobs: usize) -> ExperimentReport {
    let mut errors: Vec<BugError> = corpus
        .errors
        .iter()
        .map(|(bug, e)| BugError {
            bug: bug.clone(),
            message: e.to_string(),
        })
        .collect();
    let bugs: Vec<&Bug> = match &plan.bugs {
        None => corpus.bugs.iter().collect(),
        Some(names) => names
            .iter()
            .filter_map(|n| {
                let found = corpus.get(n);
                if found.is_none() && !errors.iter().any(|e| &e.bug == n) {
                    errors.push(BugError {
                        bug: n.clone(),
                        message: CorpusError::UnknownBug(n.clone()).to_string(),
                    });
                }
                found
            })
            .collect(),
    };
    let cells: Vec<(&ConfigSpec, &Bug, u32)> = plan
        .configs
        .iter()
        .flat_map(|c| bugs.iter().flat_map(move |b| (0..plan.attempts).map(move |i| (c, *b, i))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let results: Vec<Result<AttemptRecord, BugError>> =
        pool.install(|| cells.par_iter().map(|(c, b, i)| run_cell(plan, c, b, *i)).collect());
    let mut attempts = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(a) => attempts.push(a),
            Err(e) => errors.push(e),
        }
    }
    let rows = plan.configs.iter().map(|c| summarize(c, &attempts)).collect();
    ExperimentReport {
        plan: plan.clone(),
        rows,
        attempts,
        errors,
    }
}

/// Worker count from `REPAIR_JOBS`, else the machine's parallelism.
pub fn jobs_from_env() -> usize {
    std::env::var("REPAIR_JOBS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
