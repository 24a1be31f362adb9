//! Spectrum-based fault localization.
//!
//! Each test runs with coverage recording. A statement covered only by
//! failing tests weighs 1.0, one covered by both failing and passing tests
//! weighs 0.1, and everything else weighs 0.0 and is never mutated.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ast::{Program, StmtId};
use crate::error::LocalizeError;
use crate::interp::{Executable, Value};
use crate::suite::TestSuite;

pub const FAILING_ONLY: f64 = 1.0;
pub const SHARED: f64 = 0.1;

/// Per-test record kept for inspection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCoverage {
    pub test: String,
    pub passed: bool,
    pub covered: BTreeSet<StmtId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspiciousnessMap {
    weights: BTreeMap<StmtId, f64>,
    coverage: Vec<TestCoverage>,
}

impl SuspiciousnessMap {
    pub fn weight(&self, id: StmtId) -> f64 {
        self.weights.get(&id).copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> &BTreeMap<StmtId, f64> {
        &self.weights
    }

    pub fn coverage(&self) -> &[TestCoverage] {
        &self.coverage
    }

    /// Statements eligible as mutation targets, in id order.
    pub fn targets(&self) -> impl Iterator<Item = (StmtId, f64)> + '_ {
        self.weights
            .iter()
            .filter(|(_, w)| **w > 0.0)
            .map(|(id, w)| (*id, *w))
    }

    pub fn is_empty(&self) -> bool {
        self.targets().next().is_none()
    }

    /// Weight-proportional draw among `candidates`, which must all carry
    /// positive weight. Returns `None` for an empty candidate list.
    pub fn sample<R: Rng + ?Sized>(&self, candidates: &[StmtId], rng: &mut R) -> Option<StmtId> {
        let total: f64 = candidates.iter().map(|id| self.weight(*id)).sum();
        if candidates.is_empty() || total <= 0.0 {
            return None;
        }
        let mut target = rng.gen::<f64>() * total;
        for id in candidates {
            let w = self.weight(*id);
            if target < w {
                return Some(*id);
            }
            target -= w;
        }
        candidates.iter().rev().find(|id| self.weight(**id) > 0.0).copied()
    }
}

pub fn localize(program: &Program, suite: &TestSuite, step_budget: u64) -> Result<SuspiciousnessMap, LocalizeError> {
    if let Some(t) = suite.iter().find(|t| program.function(&t.entry).is_none()) {
        return Err(LocalizeError::MissingEntry(t.entry.clone()));
    }
    let exe = Executable::new(program);
    let mut coverage = Vec::with_capacity(suite.len());
    for test in suite.iter() {
        let mut covered = BTreeSet::new();
        let args = test.args.iter().map(Value::from).collect();
        let result = exe.run(&test.entry, args, step_budget, Some(&mut covered));
        coverage.push(TestCoverage {
            test: test.name.clone(),
            passed: result == Ok(Value::Int(test.expected)),
            covered,
        });
    }
    if coverage.iter().all(|c| c.passed) {
        return Err(LocalizeError::NothingToRepair);
    }

    let mut weights = BTreeMap::new();
    for id in program.statement_ids() {
        let by_failing = coverage.iter().any(|c| !c.passed && c.covered.contains(&id));
        let by_passing = coverage.iter().any(|c| c.passed && c.covered.contains(&id));
        let w = match (by_failing, by_passing) {
            (true, false) => FAILING_ONLY,
            (true, true) => SHARED,
            _ => 0.0,
        };
        weights.insert(id, w);
    }
    Ok(SuspiciousnessMap { weights, coverage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::DEFAULT_STEP_BUDGET;
    use crate::parse;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SRC: &str = "fn f(x) {\n  if (x > 10) {\n    return 0;\n  }\n  if (x < -100) {\n    return 7;\n  }\n  return x;\n}";

    #[test]
    fn weights_follow_coverage() {
        let p = parse(SRC).unwrap();
        // `x > 10` should return x; the first early return is the bug.
        let suite: TestSuite = "big | f | 20 | 20\nsmall | f | 3 | 3".parse().unwrap();
        let map = localize(&p, &suite, DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!(map.weight(StmtId(1)), SHARED);
        assert_eq!(map.weight(StmtId(2)), FAILING_ONLY);
        assert_eq!(map.weight(StmtId(3)), 0.0);
        assert_eq!(map.weight(StmtId(4)), 0.0);
        assert_eq!(map.weight(StmtId(5)), 0.0);
        let targets: Vec<StmtId> = map.targets().map(|(id, _)| id).collect();
        assert_eq!(targets, vec![StmtId(1), StmtId(2)]);
    }

    #[test]
    fn unexecuted_statements_are_never_sampled() {
        let p = parse(SRC).unwrap();
        let suite: TestSuite = "big | f | 20 | 20\nsmall | f | 3 | 3".parse().unwrap();
        let map = localize(&p, &suite, DEFAULT_STEP_BUDGET).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let all = p.statement_ids();
        let mut hits = [0usize; 6];
        for _ in 0..2000 {
            let id = map.sample(&all, &mut rng).unwrap();
            hits[id.0 as usize] += 1;
        }
        assert_eq!(hits[3] + hits[4] + hits[5], 0);
        // 1.0 vs 0.1 weighting.
        assert!(hits[2] > 8 * hits[1], "{hits:?}");
    }

    #[test]
    fn all_passing_means_nothing_to_repair() {
        let p = parse(SRC).unwrap();
        let suite: TestSuite = "small | f | 3 | 3".parse().unwrap();
        assert_eq!(localize(&p, &suite, DEFAULT_STEP_BUDGET), Err(LocalizeError::NothingToRepair));
    }

    #[test]
    fn failing_only_statements_are_covered_by_a_failing_test() {
        let p = parse(SRC).unwrap();
        let suite: TestSuite = "big | f | 20 | 20\nsmall | f | 3 | 3\nneg | f | -200 | -200".parse().unwrap();
        let map = localize(&p, &suite, DEFAULT_STEP_BUDGET).unwrap();
        for (id, w) in map.weights() {
            if *w == FAILING_ONLY {
                assert!(map.coverage().iter().any(|c| !c.passed && c.covered.contains(id)));
            }
        }
    }
}
