//! Reachability gate: a bug belongs in the corpus only if the search could
//! in principle fix it.

use std::fs;

use serde::{Deserialize, Serialize};
use toylang::{apply_edit, enumerate_single_edits, localize, run_tests, MutationOperator, Patch, DEFAULT_STEP_BUDGET};

use crate::corpus::Bug;
use crate::quality::check_patch;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateResult {
    pub bug: String,
    pub repair_passed: usize,
    pub repair_total: usize,
    /// Single edits tried, over every operator and every suspicious
    /// statement.
    pub edits_tried: usize,
    pub fixing_edits: usize,
    /// Fixing edits found by the coarse statement operators alone.
    pub coarse_fixing_edits: usize,
    pub example_fix: Option<String>,
    pub problems: Vec<String>,
}

impl GateResult {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Checks one bug:
///
/// * the repair suite has both failing and passing tests on the bug;
/// * exhaustive single-edit enumeration finds a variant passing it all;
/// * the reference fix, if shipped, passes both suites;
/// * a shipped `overfit.patch` passes the repair suite yet fails a held-out
///   test.
pub fn gate_bug(bug: &Bug) -> GateResult {
    let mut problems = Vec::new();
    let report = run_tests(&bug.program, &bug.repair, DEFAULT_STEP_BUDGET);
    let mut result = GateResult {
        bug: bug.name.clone(),
        repair_passed: report.passed(),
        repair_total: report.total(),
        edits_tried: 0,
        fixing_edits: 0,
        coarse_fixing_edits: 0,
        example_fix: None,
        problems: Vec::new(),
    };
    if report.passed() == 0 {
        problems.push("no repair test passes on the bug".to_string());
    }
    match localize(&bug.program, &bug.repair, DEFAULT_STEP_BUDGET) {
        Err(e) => problems.push(e.to_string()),
        Ok(map) => {
            let edits = enumerate_single_edits(&bug.program, &map, &MutationOperator::ALL);
            result.edits_tried = edits.len();
            for edit in edits {
                let variant = apply_edit(&bug.program, &edit).program;
                if run_tests(&variant, &bug.repair, DEFAULT_STEP_BUDGET).all_pass() {
                    result.fixing_edits += 1;
                    if MutationOperator::COARSE.contains(&edit.operator) {
                        result.coarse_fixing_edits += 1;
                    }
                    result.example_fix.get_or_insert_with(|| edit.to_string());
                }
            }
            if result.fixing_edits == 0 {
                problems.push("no single edit reaches fitness 1.0".to_string());
            }
        }
    }
    if let Some(fixed) = &bug.fixed {
        if !run_tests(fixed, &bug.repair, DEFAULT_STEP_BUDGET).all_pass() {
            problems.push("fixed.toy fails the repair suite".to_string());
        }
        if let Some(heldout) = &bug.heldout {
            if !run_tests(fixed, heldout, DEFAULT_STEP_BUDGET).all_pass() {
                problems.push("fixed.toy fails the held-out suite".to_string());
            }
        }
    }
    if let Ok(text) = fs::read_to_string(bug.dir.join("overfit.patch")) {
        match text.parse::<Patch>() {
            Err(e) => problems.push(format!("overfit.patch: {e}")),
            Ok(patch) => {
                let check = check_patch(bug, &patch);
                if !check.revalidates() {
                    problems.push("overfit.patch does not pass the repair suite".to_string());
                }
                if check.quality.is_none_or(|q| q.quality >= 1.0) {
                    problems.push("overfit.patch does not fail any held-out test".to_string());
                }
            }
        }
    }
    result.problems = problems;
    result
}
