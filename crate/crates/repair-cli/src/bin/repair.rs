//! `repair`: run repair experiments, score patches, gate the corpus.
//!
//! Exit codes: 0 success, 1 usage, 2 corpus error, 3 gate or
//! re-validation failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aos_core::{Cadence, CreditAssignment, Policy, RewardType};
use clap::{Args, Parser, Subcommand};
use gp_engine::ArmScheme;
use rayon::prelude::*;
use repair_cli::{
    check_patch, gate_bug, jobs_from_env, render_table, run_experiment, summarize_quality, write_outputs, ConfigSpec,
    Corpus, ExperimentPlan,
};
use toylang::Patch;
use walkdir::WalkDir;

const USAGE: u8 = 1;
const CORPUS: u8 = 2;
const GATE: u8 = 3;

#[derive(Parser)]
#[command(name = "repair", version, about = "Adaptive-operator program repair experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration over the corpus.
    Run(RunArgs),
    /// Run every configuration of a plan manifest.
    Bench {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Re-validate patch files and score them on the held-out suites.
    Quality {
        #[arg(long)]
        patches: PathBuf,
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
    },
    /// Check every bug is reachable by a single edit and the fixes pass.
    Gate {
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// uniform, pm, ap, egreedy or ucb.
    #[arg(long, default_value = "uniform")]
    policy: String,
    #[arg(long, default_value = "avg")]
    credit: CreditAssignment,
    /// Defaults to the policy's tuned value.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value = "raw")]
    reward: RewardType,
    #[arg(long, default_value = "generation")]
    cadence: Cadence,
    #[arg(long, default_value = "3")]
    arms: ArmScheme,
    #[arg(long, default_value_t = 40)]
    pop: usize,
    #[arg(long, default_value_t = 10)]
    gens: usize,
    #[arg(long, default_value_t = 20)]
    attempts: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "corpus")]
    corpus: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Restrict to these bugs; repeatable.
    #[arg(long = "bug")]
    bugs: Vec<String>,
}

impl RunArgs {
    fn plan(&self) -> Result<ExperimentPlan, String> {
        let spec = if self.policy == "uniform" {
            ConfigSpec::uniform(self.arms)
        } else {
            let policy: Policy = self.policy.parse()?;
            let mut spec = ConfigSpec::adaptive(policy, self.credit, self.arms);
            spec.reward = self.reward;
            spec.cadence = self.cadence;
            if let Some(a) = self.alpha {
                if !(0.0..=1.0).contains(&a) {
                    return Err(format!("alpha {a} outside [0, 1]"));
                }
                spec.alpha = a;
            }
            spec
        };
        let plan = ExperimentPlan {
            bugs: (!self.bugs.is_empty()).then(|| self.bugs.clone()),
            attempts: self.attempts,
            base_seed: self.seed,
            population: self.pop,
            generations: self.gens,
            configs: vec![spec],
        };
        plan.validate()?;
        Ok(plan)
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("repair: {message}");
    ExitCode::from(code)
}

fn load_corpus(root: &Path) -> Result<Corpus, ExitCode> {
    let corpus = Corpus::load(root).map_err(|e| fail(CORPUS, e))?;
    for (bug, e) in &corpus.errors {
        eprintln!("repair: bug {bug}: {e}");
    }
    Ok(corpus)
}

fn experiment(plan: &ExperimentPlan, corpus: &Path, out: &Path) -> ExitCode {
    let corpus = match load_corpus(corpus) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let report = run_experiment(plan, &corpus, jobs_from_env());
    if let Err(e) = write_outputs(&report, out) {
        return fail(USAGE, format!("cannot write {}: {e}", out.display()));
    }
    print!("{}", render_table(&report));
    if report.errors.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(CORPUS)
    }
}

fn quality(patches: &Path, corpus: &Path) -> ExitCode {
    let corpus = match load_corpus(corpus) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let mut files: Vec<PathBuf> = WalkDir::new(patches)
        .into_iter()
        .filter_map(Result::ok)
        .map(|e| e.into_path())
        .filter(|p| p.extension().is_some_and(|x| x == "patch"))
        .collect();
    files.sort();
    if files.is_empty() {
        return fail(USAGE, format!("no .patch files under {}", patches.display()));
    }
    let mut corpus_errors = !corpus.errors.is_empty();
    let mut invalid = 0;
    let mut scores = Vec::new();
    for path in &files {
        let shown = path.strip_prefix(patches).unwrap_or(path).display();
        let patch = match fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|t| {
            t.parse::<Patch>().map_err(|e| e.to_string())
        }) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("repair: {shown}: {e}");
                corpus_errors = true;
                continue;
            }
        };
        let Some(bug) = corpus.get(&patch.bug) else {
            eprintln!("repair: {shown}: bug `{}` is not in the corpus", patch.bug);
            corpus_errors = true;
            continue;
        };
        let check = check_patch(bug, &patch);
        if !check.revalidates() {
            invalid += 1;
        }
        let q = check
            .quality
            .map_or("unavailable".to_string(), |q| format!("{}/{} = {:.3}", q.t_pass, q.t_total, q.quality));
        println!(
            "{shown}  repair {}/{}{}  quality {q}",
            check.repair_passed,
            check.repair_total,
            if check.revalidates() { "" } else { " INVALID" },
        );
        scores.extend(check.quality);
    }
    let s = summarize_quality(&scores);
    let pct = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{:.1}%", 100.0 * v));
    println!(
        "{} scored, {} excluded (no held-out test passed), mean quality {}, 100% quality {}",
        s.scored,
        s.excluded,
        pct(s.mean),
        pct(s.full_share)
    );
    if corpus_errors {
        ExitCode::from(CORPUS)
    } else if invalid > 0 {
        fail(GATE, format!("{invalid} patch(es) no longer re-validate"))
    } else {
        ExitCode::SUCCESS
    }
}

fn gate(corpus: &Path) -> ExitCode {
    let corpus = match load_corpus(corpus) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs_from_env()).build().expect("thread pool");
    let results: Vec<_> = pool.install(|| corpus.bugs.par_iter().map(gate_bug).collect());
    let mut failed = 0;
    for r in &results {
        let status = if r.passed() { "ok  " } else { "FAIL" };
        println!(
            "{status} {:14} bug {}/{}  fixing edits {}/{} ({} coarse)  e.g. {}",
            r.bug,
            r.repair_passed,
            r.repair_total,
            r.fixing_edits,
            r.edits_tried,
            r.coarse_fixing_edits,
            r.example_fix.as_deref().unwrap_or("-"),
        );
        for p in &r.problems {
            println!("     {p}");
        }
        failed += usize::from(!r.passed());
    }
    if !corpus.errors.is_empty() {
        ExitCode::from(CORPUS)
    } else if failed > 0 {
        fail(GATE, format!("{failed} bug(s) failed the gate"))
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run(args) => match args.plan() {
            Ok(plan) => experiment(&plan, &args.corpus, &args.out),
            Err(e) => fail(USAGE, e),
        },
        Command::Bench { plan, corpus, out } => {
            let text = match fs::read_to_string(&plan) {
                Ok(t) => t,
                Err(e) => return fail(USAGE, format!("cannot read {}: {e}", plan.display())),
            };
            match text.parse::<ExperimentPlan>() {
                Ok(p) => experiment(&p, &corpus, &out),
                Err(e) => fail(USAGE, format!("{}: {e}", plan.display())),
            }
        }
        Command::Quality { patches, corpus } => quality(&patches, &corpus),
        Command::Gate { corpus } => gate(&corpus),
    }
}
