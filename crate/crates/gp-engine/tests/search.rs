use std::fs;
use std::path::PathBuf;

use aos_core::{CreditAssignment, Policy, RewardType};
use gp_engine::{run_repair, run_repair_uniform, ArmScheme, BornBy, Problem, RepairError, SearchConfig};
use toylang::{parse, run_tests, LocalizeError, MutationOperator, TestSuite, DEFAULT_STEP_BUDGET};

fn corpus_bug(name: &str) -> Problem {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    let program = parse(&fs::read_to_string(dir.join("bug.toy")).unwrap()).unwrap();
    let suite = fs::read_to_string(dir.join("repair.tests")).unwrap().parse().unwrap();
    Problem {
        name: name.into(),
        program,
        suite,
    }
}

fn inline(src: &str, tests: &str) -> Problem {
    Problem {
        name: "inline".into(),
        program: parse(src).unwrap(),
        suite: tests.parse::<TestSuite>().unwrap(),
    }
}

/// No coarse edit can make `f(1)` return 5, so every run goes the distance.
fn unrepairable() -> Problem {
    inline("fn f(x) { if (x > 3) { x = 0; } return 0; }", "zero | f | 0 | 0\none | f | 1 | 5")
}

fn adaptive(seed: u64, scheme: ArmScheme, policy: Policy) -> SearchConfig {
    let mut c = SearchConfig::new(seed, scheme, policy);
    c.aos = c.aos.with_alpha(policy.tuned_alpha());
    c
}

#[test]
fn defaults_match_the_search_settings() {
    let c = SearchConfig::new(0, ArmScheme::Arms3, Policy::ProbabilityMatching);
    assert_eq!((c.population_size, c.generations, c.tournament_size), (40, 10, 2));
    assert_eq!(c.crossover_rate, 0.5);
    assert_eq!(c.evaluation_bound(), 40 * 21);
}

#[test]
fn evaluations_stay_within_the_bound() {
    let problems = [corpus_bug("mid3"), corpus_bug("threshold"), unrepairable()];
    for p in &problems {
        for seed in 0..3 {
            for scheme in ArmScheme::ALL {
                let mut c = adaptive(seed, scheme, Policy::AdaptivePursuit);
                c.population_size = 12;
                c.generations = 4;
                for out in [run_repair(p, &c).unwrap(), run_repair_uniform(p, &c).unwrap()] {
                    assert!(out.total_evaluations <= c.evaluation_bound(), "{}", p.name);
                    if let Some(v) = out.variants_evaluated_at_patch {
                        assert!(v <= out.total_evaluations);
                    }
                    let fresh: u64 = out.generations.iter().map(|g| g.fresh_evaluations).sum();
                    assert_eq!(fresh, out.total_evaluations);
                }
            }
        }
    }
}

#[test]
fn unpatched_runs_use_every_generation() {
    let mut c = SearchConfig::new(3, ArmScheme::Arms3, Policy::Ucb);
    c.population_size = 10;
    c.generations = 5;
    let out = run_repair_uniform(&unrepairable(), &c).unwrap();
    assert!(!out.patched);
    assert!(out.patch.is_none() && out.variants_evaluated_at_patch.is_none());
    assert_eq!(out.generations.len(), 6);
    assert!(out.generations.iter().all(|g| g.mutation_born == 10));
}

#[test]
fn reported_patches_revalidate() {
    for bug in ["mid3", "early-return", "sort3", "lowerbound"] {
        let p = corpus_bug(bug);
        for seed in 0..4 {
            let out = run_repair_uniform(&p, &SearchConfig::new(seed, ArmScheme::Arms3, Policy::Ucb)).unwrap();
            let Some(patch) = &out.patch else { continue };
            assert!(out.patched);
            assert!(patch.variant_index.is_some());
            let fresh = run_tests(&patch.program(&p.program), &p.suite, DEFAULT_STEP_BUDGET);
            assert!(fresh.all_pass(), "{bug} seed {seed}");
        }
    }
}

#[test]
fn single_edit_fix_is_found() {
    // Deleting the stray assignment fixes it; the initial population alone
    // is likely to contain that mutant.
    let p = inline("fn f(x) { y = x; x = 0; return x + y; }", "a | f | 1 | 2\nb | f | 0 | 0\nc | f | 3 | 6");
    let out = run_repair_uniform(&p, &SearchConfig::new(11, ArmScheme::Arms3, Policy::Ucb)).unwrap();
    assert!(out.patched);
    assert!(out.variants_evaluated_at_patch.unwrap() <= out.total_evaluations);
}

#[test]
fn credit_events_match_mutation_born_variants() {
    let p = corpus_bug("run-reset");
    for policy in Policy::ALL {
        for scheme in ArmScheme::ALL {
            let out = run_repair(&p, &adaptive(5, scheme, policy)).unwrap();
            let mut per_gen = vec![0u64; out.generations.len()];
            for c in &out.credits {
                per_gen[c.generation] += 1;
            }
            for g in &out.generations {
                assert_eq!(g.credit_events, g.mutation_born, "{policy} {scheme} gen {}", g.generation);
                assert_eq!(per_gen[g.generation], g.credit_events);
            }
        }
    }
}

#[test]
fn uniform_baseline_credits_nothing() {
    let out = run_repair_uniform(&corpus_bug("prefixmax"), &SearchConfig::new(2, ArmScheme::Arms7, Policy::Ucb))
        .unwrap();
    assert!(out.credits.is_empty() && out.aos_snapshot.is_none());
    assert!(out.generations.iter().all(|g| g.credit_events == 0));
}

#[test]
fn relative_reward_uses_the_direct_parent() {
    let p = corpus_bug("offbyone-1");
    let mut c = adaptive(9, ArmScheme::Arms18, Policy::EpsilonGreedy);
    c.aos = c.aos.with_reward(RewardType::RelativeToParent).with_credit(CreditAssignment::RecencyWeighted);
    let out = run_repair(&p, &c).unwrap();
    assert!(!out.credits.is_empty());
    let original = run_tests(&p.program, &p.suite, DEFAULT_STEP_BUDGET).fitness;
    for r in &out.credits {
        if r.generation == 0 {
            assert_eq!(r.parent_fitness, original);
        }
        let noop = r.fitness == r.parent_fitness && r.reward == 0.0;
        let expected = if r.parent_fitness > 0.0 { r.fitness / r.parent_fitness } else { r.fitness };
        assert!(noop || (r.reward - expected).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn replay_is_identical() {
    let p = corpus_bug("mid3");
    let c = SearchConfig::new(7, ArmScheme::Arms3, Policy::Ucb);
    assert_eq!(run_repair_uniform(&p, &c).unwrap(), run_repair_uniform(&p, &c).unwrap());
    let c = adaptive(7, ArmScheme::Arms7, Policy::ProbabilityMatching);
    assert_eq!(run_repair(&p, &c).unwrap(), run_repair(&p, &c).unwrap());
}

#[test]
fn seeds_matter() {
    let p = corpus_bug("lowerbound");
    let runs: Vec<_> = (0..4)
        .map(|s| run_repair_uniform(&p, &SearchConfig::new(s, ArmScheme::Arms3, Policy::Ucb)).unwrap())
        .collect();
    assert!(runs.windows(2).any(|w| w[0] != w[1]));
}

#[test]
fn uniform_over_every_operator_ignores_grouping() {
    // Both schemes offer all 18 operators, so the uniform baseline must not
    // see any difference between them.
    let p = corpus_bug("clamp");
    let a = run_repair_uniform(&p, &SearchConfig::new(4, ArmScheme::Arms18, Policy::Ucb)).unwrap();
    let b = run_repair_uniform(&p, &SearchConfig::new(4, ArmScheme::Arms7, Policy::Ucb)).unwrap();
    assert_eq!(a.operator_draws, b.operator_draws);
    assert_eq!(a.total_evaluations, b.total_evaluations);
}

/// Three standard deviations of a binomial count.
fn three_sigma(n: f64, p: f64) -> f64 {
    3.0 * (n * p * (1.0 - p)).sqrt()
}

#[test]
fn uniform_draws_are_uniform() {
    let mut c = SearchConfig::new(21, ArmScheme::Arms3, Policy::Ucb);
    c.population_size = 20;
    c.generations = 499;
    let out = run_repair_uniform(&unrepairable(), &c).unwrap();
    let total: u64 = out.operator_draws.iter().sum();
    assert_eq!(total, 10_000);
    for op in MutationOperator::ALL {
        let n = out.operator_draws[op.index()] as f64;
        if MutationOperator::COARSE.contains(&op) {
            assert!((n - total as f64 / 3.0).abs() <= three_sigma(10_000.0, 1.0 / 3.0), "{op}: {n}");
        } else {
            assert_eq!(n, 0.0, "{op}");
        }
    }
}

#[test]
fn group_arms_draw_uniformly_within_the_group() {
    let mut c = adaptive(13, ArmScheme::Arms7, Policy::ProbabilityMatching);
    c.population_size = 20;
    c.generations = 499;
    let out = run_repair(&unrepairable(), &c).unwrap();
    for arm in 3..7 {
        let members = ArmScheme::Arms7.members(aos_core::ArmId(arm));
        let counts: Vec<f64> = members.iter().map(|op| out.operator_draws[op.index()] as f64).collect();
        let total: f64 = counts.iter().sum();
        assert!(total > 500.0, "arm {arm} drawn {total} times");
        let p = 1.0 / members.len() as f64;
        for (op, n) in members.iter().zip(&counts) {
            assert!((n - total * p).abs() <= three_sigma(total, p), "{op}: {n} of {total}");
        }
    }
}

#[test]
fn correct_program_has_nothing_to_repair() {
    let p = inline("fn f(x) { return x; }", "a | f | 1 | 1");
    let c = SearchConfig::new(0, ArmScheme::Arms3, Policy::AdaptivePursuit);
    for result in [run_repair(&p, &c), run_repair_uniform(&p, &c)] {
        assert!(matches!(result, Err(RepairError::Localize(LocalizeError::NothingToRepair))));
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let p = corpus_bug("mid3");
    let mut c = SearchConfig::new(0, ArmScheme::Arms3, Policy::EpsilonGreedy);
    c.population_size = 0;
    assert!(matches!(run_repair_uniform(&p, &c), Err(RepairError::Config(_))));
    let mut c = SearchConfig::new(0, ArmScheme::Arms3, Policy::EpsilonGreedy);
    c.aos.epsilon = 2.0;
    assert!(matches!(run_repair(&p, &c), Err(RepairError::Aos(_))));
}

#[test]
fn patch_records_its_variant_number() {
    let out = run_repair(&corpus_bug("collatz"), &adaptive(1, ArmScheme::Arms3, Policy::AdaptivePursuit)).unwrap();
    if let Some(patch) = &out.patch {
        assert_eq!(patch.variant_index, out.variants_evaluated_at_patch);
        assert!(matches!(patch.born_by, BornBy::Mutation(_) | BornBy::Crossover));
    }
}
