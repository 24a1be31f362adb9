//! Held-out patch quality, `T_pass / T_total`.

use serde::{Deserialize, Serialize};
use toylang::{run_tests, Patch, Program, TestSuite, DEFAULT_STEP_BUDGET};

use crate::corpus::Bug;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityScore {
    pub t_pass: usize,
    pub t_total: usize,
    pub quality: f64,
}

impl QualityScore {
    /// `None` for an empty suite, which has no meaningful ratio.
    pub fn new(t_pass: usize, t_total: usize) -> Option<Self> {
        (t_total > 0 && t_pass <= t_total).then(|| QualityScore {
            t_pass,
            t_total,
            quality: t_pass as f64 / t_total as f64,
        })
    }
}

/// Scores an already patched program. `None` when there is no held-out
/// suite to score against.
pub fn evaluate_quality(patched: &Program, heldout: Option<&TestSuite>) -> Option<QualityScore> {
    let report = run_tests(patched, heldout?, DEFAULT_STEP_BUDGET);
    QualityScore::new(report.passed(), report.total())
}

/// Re-check of one patch against its bug.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchCheck {
    /// Edits that no longer found their target.
    pub noops: usize,
    pub repair_passed: usize,
    pub repair_total: usize,
    pub quality: Option<QualityScore>,
}

impl PatchCheck {
    /// Applies cleanly and passes the whole repair suite.
    pub fn revalidates(&self) -> bool {
        self.noops == 0 && self.repair_total > 0 && self.repair_passed == self.repair_total
    }
}

pub fn check_patch(bug: &Bug, patch: &Patch) -> PatchCheck {
    let applied = patch.apply(&bug.program);
    let repair = run_tests(&applied.program, &bug.repair, DEFAULT_STEP_BUDGET);
    PatchCheck {
        noops: applied.noops,
        repair_passed: repair.passed(),
        repair_total: repair.total(),
        quality: evaluate_quality(&applied.program, bug.heldout.as_ref()),
    }
}

/// Aggregate over a set of patch scores. Patches that pass no held-out
/// test at all are left out of the mean and the 100% share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualitySummary {
    pub scored: usize,
    pub excluded: usize,
    pub mean: Option<f64>,
    pub full_share: Option<f64>,
}

pub fn summarize_quality<'a>(scores: impl IntoIterator<Item = &'a QualityScore>) -> QualitySummary {
    let mut kept = Vec::new();
    let mut excluded = 0;
    for s in scores {
        if s.t_pass == 0 {
            excluded += 1;
        } else {
            kept.push(s.quality);
        }
    }
    let n = kept.len();
    let mean = (n > 0).then(|| kept.iter().sum::<f64>() / n as f64);
    let full_share = (n > 0).then(|| kept.iter().filter(|q| **q >= 1.0).count() as f64 / n as f64);
    QualitySummary {
        scored: n,
        excluded,
        mean,
        full_share,
    }
}
