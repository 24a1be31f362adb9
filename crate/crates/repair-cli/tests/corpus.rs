use std::fs;
use std::path::PathBuf;

use repair_cli::{check_patch, gate_bug, load_bug, Corpus, CorpusError};
use toylang::Patch;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn every_bug_loads_with_both_suites() {
    let corpus = Corpus::load(&root()).unwrap();
    assert!(corpus.errors.is_empty(), "{:?}", corpus.errors);
    assert_eq!(corpus.bugs.len(), 12);
    let names: Vec<_> = corpus.bugs.iter().map(|b| b.name.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted);
    for bug in &corpus.bugs {
        assert!(bug.fixed.is_some() && bug.heldout.is_some(), "{}", bug.name);
        assert_eq!(bug.problem().name, bug.name);
    }
}

#[test]
fn planted_overfit_patch_is_adequate_but_imperfect() {
    let corpus = Corpus::load(&root()).unwrap();
    let bug = corpus.get("offbyone-1").unwrap();
    let patch: Patch = fs::read_to_string(bug.dir.join("overfit.patch")).unwrap().parse().unwrap();
    let check = check_patch(bug, &patch);
    assert!(check.revalidates());
    let q = check.quality.unwrap();
    assert!(q.quality < 1.0 && q.t_pass > 0, "{q:?}");
}

#[test]
fn gate_reports_a_concrete_fix() {
    let bug = load_bug(&root().join("clamp")).unwrap();
    let g = gate_bug(&bug);
    assert!(g.passed(), "{:?}", g.problems);
    assert!(g.fixing_edits >= 1 && g.fixing_edits <= g.edits_tried);
    assert!(g.example_fix.is_some());
}

#[test]
fn broken_files_are_reported_per_bug() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad");
    fs::create_dir(&bad).unwrap();
    fs::write(bad.join("bug.toy"), "fn f( {").unwrap();
    fs::write(bad.join("repair.tests"), "a | f | 1 | 1\n").unwrap();
    let corpus = Corpus::load(dir.path()).unwrap();
    assert!(corpus.bugs.is_empty());
    assert!(matches!(corpus.errors.as_slice(), [(name, CorpusError::Parse { .. })] if name == "bad"));
    assert!(corpus.get("bad").is_none());
}
