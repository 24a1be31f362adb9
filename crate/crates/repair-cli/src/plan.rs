//! Experiment plans and their text manifest.
//!
//! ```text
//! # two configurations over the whole corpus
//! attempts = 20
//! seed = 1
//! pop = 40
//! gens = 10
//! bugs = mid3 clamp
//! config policy=uniform arms=3
//! config policy=pm credit=erwa reward=raw cadence=generation arms=3 alpha=0.8
//! ```
//!
//! Every setting line is optional; `bugs` defaults to the whole corpus.
//! `config` lines take `key=value` pairs in any order. Only `policy` is
//! required; the rest default to `credit=avg reward=raw cadence=generation
//! arms=3` and the policy's tuned alpha. The uniform baseline accepts `arms`
//! only.

use std::fmt;
use std::str::FromStr;

use aos_core::{AosConfig, Cadence, CreditAssignment, Policy, RewardType};
use gp_engine::{ArmScheme, SearchConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("plan line {line}: {message}")]
pub struct PlanError {
    pub line: usize,
    pub message: String,
}

/// One column of the experiment matrix. `policy: None` is the uniform
/// baseline, for which the AOS fields are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSpec {
    pub policy: Option<Policy>,
    pub credit: CreditAssignment,
    pub reward: RewardType,
    pub cadence: Cadence,
    pub arms: ArmScheme,
    pub alpha: f64,
}

impl ConfigSpec {
    pub fn uniform(arms: ArmScheme) -> Self {
        ConfigSpec {
            policy: None,
            credit: CreditAssignment::Average,
            reward: RewardType::Raw,
            cadence: Cadence::PerGeneration,
            arms,
            alpha: 0.0,
        }
    }

    pub fn adaptive(policy: Policy, credit: CreditAssignment, arms: ArmScheme) -> Self {
        ConfigSpec {
            policy: Some(policy),
            credit,
            reward: RewardType::Raw,
            cadence: Cadence::PerGeneration,
            arms,
            alpha: policy.tuned_alpha(),
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.policy.is_none()
    }

    /// Stable name used in seeds, file names and reports.
    pub fn label(&self) -> String {
        match self.policy {
            None => format!("uniform-a{}", self.arms),
            Some(p) => format!(
                "{p}-{}-{}-{}-a{}-{}",
                self.credit, self.reward, self.cadence, self.arms, self.alpha
            ),
        }
    }

    pub fn search_config(&self, seed: u64, population: usize, generations: usize) -> SearchConfig {
        let policy = self.policy.unwrap_or(Policy::ProbabilityMatching);
        let mut c = SearchConfig::new(seed, self.arms, policy);
        c.population_size = population;
        c.generations = generations;
        c.aos = AosConfig::for_arms(policy, self.arms.n_arms())
            .with_credit(self.credit)
            .with_reward(self.reward)
            .with_cadence(self.cadence)
            .with_alpha(self.alpha);
        c
    }
}

impl fmt::Display for ConfigSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.policy {
            None => write!(f, "policy=uniform arms={}", self.arms),
            Some(p) => write!(
                f,
                "policy={p} credit={} reward={} cadence={} arms={} alpha={}",
                self.credit, self.reward, self.cadence, self.arms, self.alpha
            ),
        }
    }
}

impl FromStr for ConfigSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut pairs = Vec::new();
        for token in s.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{token}`"))?;
            if pairs.iter().any(|(seen, _)| *seen == k) {
                return Err(format!("`{k}` given twice"));
            }
            pairs.push((k, v));
        }
        let get = |key: &str| pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let arms = get("arms").map(str::parse).transpose()?.unwrap_or(ArmScheme::Arms3);
        let policy = get("policy").ok_or("missing `policy`")?;
        if policy == "uniform" {
            if let Some((k, _)) = pairs.iter().find(|(k, _)| !matches!(*k, "policy" | "arms")) {
                return Err(format!("the uniform baseline takes no `{k}`"));
            }
            return Ok(ConfigSpec::uniform(arms));
        }
        let policy: Policy = policy.parse()?;
        let mut spec = ConfigSpec::adaptive(policy, CreditAssignment::Average, arms);
        for (k, v) in &pairs {
            match *k {
                "policy" | "arms" => {}
                "credit" => spec.credit = v.parse()?,
                "reward" => spec.reward = v.parse()?,
                "cadence" => spec.cadence = v.parse()?,
                "alpha" => {
                    spec.alpha = v.parse().map_err(|_| format!("bad alpha `{v}`"))?;
                    if !(0.0..=1.0).contains(&spec.alpha) {
                        return Err(format!("alpha {v} outside [0, 1]"));
                    }
                }
                other => return Err(format!("unknown key `{other}`")),
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    /// Bugs to run, in this order; `None` means the whole corpus.
    pub bugs: Option<Vec<String>>,
    pub attempts: u32,
    pub base_seed: u64,
    pub population: usize,
    pub generations: usize,
    pub configs: Vec<ConfigSpec>,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            bugs: None,
            attempts: 20,
            base_seed: 1,
            population: 40,
            generations: 10,
            configs: Vec::new(),
        }
    }
}

impl ExperimentPlan {
    /// The uniform baseline and every adaptive policy under both credit
    /// schemes, all on `arms`.
    pub fn policy_matrix(arms: ArmScheme) -> Self {
        let mut configs = vec![ConfigSpec::uniform(arms)];
        for policy in Policy::ALL {
            for credit in [CreditAssignment::Average, CreditAssignment::RecencyWeighted] {
                configs.push(ConfigSpec::adaptive(policy, credit, arms));
            }
        }
        ExperimentPlan {
            configs,
            ..ExperimentPlan::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.configs.is_empty() {
            return Err("plan has no `config` lines".into());
        }
        if self.attempts == 0 || self.population == 0 {
            return Err("attempts and pop must be positive".into());
        }
        let mut labels: Vec<String> = self.configs.iter().map(ConfigSpec::label).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(format!("configuration `{}` appears twice", w[0]));
        }
        Ok(())
    }
}

impl fmt::Display for ExperimentPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "attempts = {}", self.attempts)?;
        writeln!(f, "seed = {}", self.base_seed)?;
        writeln!(f, "pop = {}", self.population)?;
        writeln!(f, "gens = {}", self.generations)?;
        if let Some(bugs) = &self.bugs {
            writeln!(f, "bugs = {}", bugs.join(" "))?;
        }
        for c in &self.configs {
            writeln!(f, "config {c}")?;
        }
        Ok(())
    }
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("`{key}` needs a non-negative integer, got `{value}`"))
}

impl FromStr for ExperimentPlan {
    type Err = PlanError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut plan = ExperimentPlan::default();
        let mut last = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            last = line;
            let err = |message: String| PlanError { line, message };
            if let Some(rest) = trimmed.strip_prefix("config") {
                if rest.starts_with(char::is_whitespace) || rest.is_empty() {
                    plan.configs.push(rest.parse().map_err(err)?);
                    continue;
                }
            }
            let (key, value) = trimmed
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value` or `config ...`, got `{trimmed}`")))?;
            match key {
                "attempts" => plan.attempts = number(key, value).map_err(err)?,
                "seed" => plan.base_seed = number(key, value).map_err(err)?,
                "pop" => plan.population = number(key, value).map_err(err)?,
                "gens" => plan.generations = number(key, value).map_err(err)?,
                "bugs" => {
                    let bugs: Vec<String> = value
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|s| !s.is_empty())
                        .map(String::from)
                        .collect();
                    if bugs.is_empty() {
                        return Err(err("`bugs` lists no bug".into()));
                    }
                    plan.bugs = Some(bugs);
                }
                other => return Err(err(format!("unknown setting `{other}`"))),
            }
        }
        plan.validate().map_err(|message| PlanError { line: last, message })?;
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "# demo\nattempts = 3\nseed = 9\npop = 10\ngens = 2\nbugs = mid3, clamp\n\
                        config policy=uniform arms=7\nconfig policy=ap credit=erwa cadence=mutation\n";

    #[test]
    fn parses_a_manifest() {
        let plan: ExperimentPlan = TEXT.parse().unwrap();
        assert_eq!(plan.attempts, 3);
        assert_eq!(plan.base_seed, 9);
        assert_eq!(plan.bugs, Some(vec!["mid3".into(), "clamp".into()]));
        assert_eq!(plan.configs[0], ConfigSpec::uniform(ArmScheme::Arms7));
        let ap = &plan.configs[1];
        assert_eq!(ap.policy, Some(Policy::AdaptivePursuit));
        assert_eq!(ap.credit, CreditAssignment::RecencyWeighted);
        assert_eq!(ap.cadence, Cadence::PerMutation);
        assert_eq!(ap.alpha, 0.2);
        assert_eq!(ap.label(), "ap-erwa-raw-mutation-a3-0.2");
    }

    #[test]
    fn display_round_trips() {
        let plan: ExperimentPlan = TEXT.parse().unwrap();
        assert_eq!(plan.to_string().parse::<ExperimentPlan>().unwrap(), plan);
        let matrix = ExperimentPlan::policy_matrix(ArmScheme::Arms3);
        assert_eq!(matrix.configs.len(), 9);
        assert_eq!(matrix.to_string().parse::<ExperimentPlan>().unwrap(), matrix);
    }

    #[test]
    fn errors_name_the_line() {
        let cases = [
            ("attempts = x\nconfig policy=pm", 1),
            ("config policy=pm\nconfig policy=uniform credit=avg", 2),
            ("config policy=pm\nconfig policy=pm", 2),
            ("seed = 3", 1),
            ("config policy=pm alpha=3", 1),
            ("config policy=pm\nfoo = 1", 2),
            ("config policy=pm\nbugs =", 2),
            ("config policy=pm zeta=1", 1),
        ];
        for (text, line) in cases {
            let e = text.parse::<ExperimentPlan>().unwrap_err();
            assert_eq!(e.line, line, "{text}: {e}");
        }
    }

    #[test]
    fn search_config_carries_every_setting() {
        let spec: ConfigSpec = "policy=egreedy credit=erwa reward=relative cadence=mutation arms=18 alpha=0.3"
            .parse()
            .unwrap();
        let c = spec.search_config(5, 12, 3);
        assert_eq!((c.seed, c.population_size, c.generations), (5, 12, 3));
        assert_eq!(c.arm_scheme, ArmScheme::Arms18);
        assert_eq!(c.aos.policy, Policy::EpsilonGreedy);
        assert_eq!(c.aos.reward, RewardType::RelativeToParent);
        assert_eq!(c.aos.alpha, 0.3);
        assert_eq!(c.aos.p_min, 1.0 / 36.0);
    }
}
