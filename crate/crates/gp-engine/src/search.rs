use std::collections::HashMap;

use aos_core::{compute_reward, AosConfig, ArmId, Cadence, Controller, Policy, RewardEvent, Snapshot};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use toylang::{
    apply_edits, localize, mint_edit, run_tests, Edit, MutationOperator, Program, SuspiciousnessMap, TestSuite,
    DEFAULT_STEP_BUDGET,
};

use crate::error::RepairError;
use crate::scheme::{arm_of, ArmScheme};

/// A buggy program and the suite that defines "repaired".
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub name: String,
    pub program: Program,
    pub suite: TestSuite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BornBy {
    Initial,
    Mutation(MutationOperator),
    Crossover,
}

/// One individual: an edit list over the original program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub edits: Vec<Edit>,
    pub fitness: Option<f64>,
    pub parent_fitness: Option<f64>,
    pub born_by: BornBy,
    /// Evaluation counter value when this edit list was first evaluated.
    pub variant_index: Option<u64>,
}

impl Variant {
    /// The variant's program, rebuilt from `original`.
    pub fn program(&self, original: &Program) -> Program {
        apply_edits(original, &self.edits).program
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub population_size: usize,
    pub generations: usize,
    pub seed: u64,
    pub arm_scheme: ArmScheme,
    pub aos: AosConfig,
    pub crossover_rate: f64,
    pub tournament_size: usize,
    pub step_budget: u64,
}

impl SearchConfig {
    /// Population 40, 10 generations, crossover 0.5, tournaments of 2, with
    /// the policy's defaults for the scheme's arm count.
    pub fn new(seed: u64, arm_scheme: ArmScheme, policy: Policy) -> Self {
        SearchConfig {
            population_size: 40,
            generations: 10,
            seed,
            arm_scheme,
            aos: AosConfig::for_arms(policy, arm_scheme.n_arms()),
            crossover_rate: 0.5,
            tournament_size: 2,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }

    /// Hard ceiling on fitness evaluations: the initial population plus,
    /// per generation, one batch of crossover offspring and one of mutants.
    pub fn evaluation_bound(&self) -> u64 {
        (self.population_size * (2 * self.generations + 1)) as u64
    }

    fn validate(&self, with_aos: bool) -> Result<(), RepairError> {
        if self.population_size == 0 {
            return Err(RepairError::Config("population_size must be positive".into()));
        }
        if self.tournament_size == 0 {
            return Err(RepairError::Config("tournament_size must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(RepairError::Config("crossover_rate must lie in [0, 1]".into()));
        }
        if self.step_budget == 0 {
            return Err(RepairError::Config("step_budget must be positive".into()));
        }
        if with_aos {
            self.aos.validate(self.arm_scheme.n_arms())?;
        }
        Ok(())
    }
}

/// Per-generation bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Edit lists executed for the first time.
    pub fresh_evaluations: u64,
    /// Mutation-born individuals that received a fitness.
    pub mutation_born: u64,
    /// Of those, how many came from an operator with nothing to act on.
    pub inapplicable: u64,
    pub credit_events: u64,
    pub best_fitness: f64,
}

/// One reward handed to the controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreditRecord {
    pub generation: usize,
    pub arm: usize,
    pub operator: MutationOperator,
    pub fitness: f64,
    pub parent_fitness: f64,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairOutcome {
    pub patched: bool,
    pub patch: Option<Variant>,
    pub variants_evaluated_at_patch: Option<u64>,
    pub total_evaluations: u64,
    pub original_fitness: f64,
    /// Final controller state; absent for the uniform baseline.
    pub aos_snapshot: Option<Snapshot>,
    /// How often each operator was drawn, indexed like
    /// [`MutationOperator::ALL`].
    pub operator_draws: Vec<u64>,
    pub generations: Vec<GenerationRecord>,
    pub credits: Vec<CreditRecord>,
}

/// Repair with the adaptive controller choosing every operator.
pub fn run_repair(problem: &Problem, config: &SearchConfig) -> Result<RepairOutcome, RepairError> {
    config.validate(true)?;
    let controller = Controller::new(config.aos.clone(), config.arm_scheme.n_arms())?;
    Search::new(problem, config, Some(controller))?.run()
}

/// Repair with operators drawn uniformly from the scheme's operator set.
pub fn run_repair_uniform(problem: &Problem, config: &SearchConfig) -> Result<RepairOutcome, RepairError> {
    config.validate(false)?;
    Search::new(problem, config, None)?.run()
}

/// Independent per-purpose streams of one run seed.
fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// A mutation decided but not yet scored.
struct Pending {
    edits: Vec<Edit>,
    arm: ArmId,
    operator: MutationOperator,
    parent_fitness: f64,
    inapplicable: bool,
}

enum Step {
    Continue,
    Patched,
}

struct Search<'a> {
    problem: &'a Problem,
    config: &'a SearchConfig,
    suspicious: SuspiciousnessMap,
    operators: Vec<MutationOperator>,
    controller: Option<Controller>,
    aos_rng: ChaCha8Rng,
    search_rng: ChaCha8Rng,
    cache: HashMap<Vec<Edit>, f64>,
    // Different edit lists often print to the same program; those still count
    // as fresh evaluations but reuse the test results.
    by_text: HashMap<String, f64>,
    evaluations: u64,
    original_fitness: f64,
    patch: Option<Variant>,
    draws: Vec<u64>,
    generations: Vec<GenerationRecord>,
    credits: Vec<CreditRecord>,
    current: GenerationRecord,
}

impl<'a> Search<'a> {
    fn new(problem: &'a Problem, config: &'a SearchConfig, controller: Option<Controller>) -> Result<Self, RepairError> {
        let suspicious = localize(&problem.program, &problem.suite, config.step_budget)?;
        let original_fitness = run_tests(&problem.program, &problem.suite, config.step_budget).fitness;
        let mut cache = HashMap::new();
        cache.insert(Vec::new(), original_fitness);
        Ok(Search {
            problem,
            config,
            suspicious,
            operators: config.arm_scheme.operators(),
            controller,
            aos_rng: stream(config.seed, 1),
            search_rng: stream(config.seed, 2),
            cache,
            by_text: HashMap::new(),
            evaluations: 0,
            original_fitness,
            patch: None,
            draws: vec![0; MutationOperator::ALL.len()],
            generations: Vec::new(),
            credits: Vec::new(),
            current: GenerationRecord {
                generation: 0,
                fresh_evaluations: 0,
                mutation_born: 0,
                inapplicable: 0,
                credit_events: 0,
                best_fitness: 0.0,
            },
        })
    }

    fn choose(&mut self) -> (ArmId, MutationOperator) {
        let scheme = self.config.arm_scheme;
        let op = match &self.controller {
            None => self.operators[self.aos_rng.gen_range(0..self.operators.len())],
            Some(c) => {
                let members = scheme.members(c.select_arm(&mut self.aos_rng));
                if members.len() == 1 {
                    members[0]
                } else {
                    members[self.aos_rng.gen_range(0..members.len())]
                }
            }
        };
        self.draws[op.index()] += 1;
        (arm_of(op, scheme).expect("scheme member"), op)
    }

    fn mutate(&mut self, parent: &Variant) -> Pending {
        let (arm, operator) = self.choose();
        let program = parent.program(&self.problem.program);
        let parent_fitness = parent.fitness.expect("parents are evaluated");
        match mint_edit(operator, &program, &self.suspicious, &mut self.search_rng) {
            Ok(edit) => {
                let mut edits = parent.edits.clone();
                edits.push(edit);
                Pending {
                    edits,
                    arm,
                    operator,
                    parent_fitness,
                    inapplicable: false,
                }
            }
            Err(_) => Pending {
                edits: parent.edits.clone(),
                arm,
                operator,
                parent_fitness,
                inapplicable: true,
            },
        }
    }

    /// Fitness of `edits`, executing the tests only on first sight.
    fn evaluate(&mut self, edits: &[Edit]) -> (f64, Option<u64>) {
        if let Some(f) = self.cache.get(edits) {
            return (*f, None);
        }
        let program = apply_edits(&self.problem.program, edits).program;
        let text = program.to_string();
        let fitness = match self.by_text.get(&text) {
            Some(f) => *f,
            None => {
                let f = run_tests(&program, &self.problem.suite, self.config.step_budget).fitness;
                self.by_text.insert(text, f);
                f
            }
        };
        self.evaluations += 1;
        self.current.fresh_evaluations += 1;
        self.cache.insert(edits.to_vec(), fitness);
        (fitness, Some(self.evaluations))
    }

    fn score(&mut self, edits: Vec<Edit>, born_by: BornBy, parent_fitness: Option<f64>) -> (Variant, Step) {
        let (fitness, index) = self.evaluate(&edits);
        self.current.best_fitness = self.current.best_fitness.max(fitness);
        let variant = Variant {
            edits,
            fitness: Some(fitness),
            parent_fitness,
            born_by,
            variant_index: index,
        };
        if index.is_some() && fitness >= 1.0 {
            self.patch = Some(variant.clone());
            return (variant, Step::Patched);
        }
        (variant, Step::Continue)
    }

    fn credit(&mut self, p: &Pending, fitness: f64) {
        let Some(c) = self.controller.as_mut() else {
            return;
        };
        let reward = if p.inapplicable {
            0.0
        } else {
            let event = RewardEvent::new(p.arm, fitness, Some(p.parent_fitness));
            compute_reward(&event, c.config().reward)
        };
        c.credit(p.arm, reward).expect("arm from the scheme");
        self.current.credit_events += 1;
        self.credits.push(CreditRecord {
            generation: self.current.generation,
            arm: p.arm.index(),
            operator: p.operator,
            fitness,
            parent_fitness: p.parent_fitness,
            reward,
        });
    }

    /// Scores and credits a batch of mutants.
    fn settle(&mut self, batch: Vec<Pending>) -> (Vec<Variant>, Step) {
        let mut out = Vec::with_capacity(batch.len());
        for p in batch {
            self.current.mutation_born += 1;
            let (variant, step) = if p.inapplicable {
                self.current.inapplicable += 1;
                let v = Variant {
                    edits: p.edits.clone(),
                    fitness: Some(p.parent_fitness),
                    parent_fitness: Some(p.parent_fitness),
                    born_by: BornBy::Mutation(p.operator),
                    variant_index: None,
                };
                (v, Step::Continue)
            } else {
                self.score(p.edits.clone(), BornBy::Mutation(p.operator), Some(p.parent_fitness))
            };
            self.credit(&p, variant.fitness.expect("scored"));
            out.push(variant);
            if let Step::Patched = step {
                return (out, Step::Patched);
            }
        }
        if let Some(c) = self.controller.as_mut() {
            if c.config().cadence == Cadence::PerGeneration {
                c.flush_generation().expect("per-generation cadence");
            }
        }
        (out, Step::Continue)
    }

    fn tournament(&mut self, population: &[Variant]) -> usize {
        let mut best = self.search_rng.gen_range(0..population.len());
        for _ in 1..self.config.tournament_size {
            let c = self.search_rng.gen_range(0..population.len());
            if population[c].fitness > population[best].fitness {
                best = c;
            }
        }
        best
    }

    /// Tournament selection then one-point crossover on edit lists. Pairs
    /// that do not cross pass through unchanged.
    fn breed(&mut self, population: &[Variant]) -> (Vec<Variant>, Step) {
        let parents: Vec<usize> = (0..population.len()).map(|_| self.tournament(population)).collect();
        let mut next = Vec::with_capacity(parents.len());
        for pair in parents.chunks(2) {
            let a = &population[pair[0]];
            let Some(&bi) = pair.get(1) else {
                next.push(a.clone());
                continue;
            };
            let b = &population[bi];
            if !self.search_rng.gen_bool(self.config.crossover_rate) {
                next.push(a.clone());
                next.push(b.clone());
                continue;
            }
            let cut_a = self.search_rng.gen_range(0..=a.edits.len());
            let cut_b = self.search_rng.gen_range(0..=b.edits.len());
            let left: Vec<Edit> = a.edits[..cut_a].iter().chain(&b.edits[cut_b..]).cloned().collect();
            let right: Vec<Edit> = b.edits[..cut_b].iter().chain(&a.edits[cut_a..]).cloned().collect();
            for edits in [left, right] {
                let (child, step) = self.score(edits, BornBy::Crossover, None);
                next.push(child);
                if let Step::Patched = step {
                    return (next, Step::Patched);
                }
            }
        }
        (next, Step::Continue)
    }

    fn close_generation(&mut self) {
        let next = self.current.generation + 1;
        let done = std::mem::replace(
            &mut self.current,
            GenerationRecord {
                generation: next,
                fresh_evaluations: 0,
                mutation_born: 0,
                inapplicable: 0,
                credit_events: 0,
                best_fitness: 0.0,
            },
        );
        self.generations.push(done);
    }

    fn run(mut self) -> Result<RepairOutcome, RepairError> {
        let original = Variant {
            edits: Vec::new(),
            fitness: Some(self.original_fitness),
            parent_fitness: None,
            born_by: BornBy::Initial,
            variant_index: None,
        };
        let batch: Vec<Pending> = (0..self.config.population_size).map(|_| self.mutate(&original)).collect();
        let (mut population, mut step) = self.settle(batch);
        self.close_generation();

        for _ in 0..self.config.generations {
            if let Step::Patched = step {
                break;
            }
            let (offspring, s) = self.breed(&population);
            if let Step::Patched = s {
                self.close_generation();
                break;
            }
            let batch: Vec<Pending> = offspring.iter().map(|v| self.mutate(v)).collect();
            (population, step) = self.settle(batch);
            self.close_generation();
        }
        Ok(self.finish())
    }

    fn finish(self) -> RepairOutcome {
        RepairOutcome {
            patched: self.patch.is_some(),
            variants_evaluated_at_patch: self.patch.as_ref().and_then(|p| p.variant_index),
            patch: self.patch,
            total_evaluations: self.evaluations,
            original_fitness: self.original_fitness,
            aos_snapshot: self.controller.as_ref().map(|c| c.snapshot()),
            operator_draws: self.draws,
            generations: self.generations,
            credits: self.credits,
        }
    }
}
