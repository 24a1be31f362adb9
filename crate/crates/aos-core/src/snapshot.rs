//! Plain-text key/value dump of a controller's per-arm state.
//!
//! ```text
//! policy=pm
//! credit=avg
//! reward=raw
//! cadence=generation
//! alpha=0.8
//! arms=2
//! arm.0.quality=0.5
//! arm.0.plays=4
//! arm.0.probability=0.4166666666666667
//! arm.1.quality=1
//! arm.1.plays=0
//! arm.1.probability=0.5833333333333333
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so parsing a
//! rendered snapshot reproduces it bit for bit. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{Cadence, CreditAssignment, Policy, RewardType};
use crate::error::AosError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSnapshot {
    pub quality: f64,
    pub plays: u64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub policy: Policy,
    pub credit: CreditAssignment,
    pub reward: RewardType,
    pub cadence: Cadence,
    pub alpha: f64,
    pub arms: Vec<ArmSnapshot>,
}

impl fmt::Display for Snapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "policy={}", self.policy)?;
        writeln!(f, "credit={}", self.credit)?;
        writeln!(f, "reward={}", self.reward)?;
        writeln!(f, "cadence={}", self.cadence)?;
        writeln!(f, "alpha={}", self.alpha)?;
        writeln!(f, "arms={}", self.arms.len())?;
        for (i, arm) in self.arms.iter().enumerate() {
            writeln!(f, "arm.{i}.quality={}", arm.quality)?;
            writeln!(f, "arm.{i}.plays={}", arm.plays)?;
            writeln!(f, "arm.{i}.probability={}", arm.probability)?;
        }
        Ok(())
    }
}

/// Largest arm count accepted when parsing.
const MAX_ARMS: usize = 4096;

/// Quality, plays and probability as read so far.
type PartialArm = (Option<f64>, Option<u64>, Option<f64>);

impl FromStr for Snapshot {
    type Err = AosError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |line: usize, reason: String| AosError::Snapshot { line, reason };

        let mut policy = None;
        let mut credit = None;
        let mut reward = None;
        let mut cadence = None;
        let mut alpha = None;
        let mut arms: Option<Vec<PartialArm>> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line_no, format!("expected key=value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());

            fn set<T>(slot: &mut Option<T>, v: T, key: &str, line: usize) -> Result<(), AosError> {
                if slot.replace(v).is_some() {
                    return Err(AosError::Snapshot {
                        line,
                        reason: format!("duplicate key `{key}`"),
                    });
                }
                Ok(())
            }

            match key {
                "policy" => set(&mut policy, value.parse().map_err(|e| err(line_no, e))?, key, line_no)?,
                "credit" => set(&mut credit, value.parse().map_err(|e| err(line_no, e))?, key, line_no)?,
                "reward" => set(&mut reward, value.parse().map_err(|e| err(line_no, e))?, key, line_no)?,
                "cadence" => set(&mut cadence, value.parse().map_err(|e| err(line_no, e))?, key, line_no)?,
                "alpha" => set(&mut alpha, parse_f64(value).map_err(|e| err(line_no, e))?, key, line_no)?,
                "arms" => {
                    let n: usize = value
                        .parse()
                        .map_err(|_| err(line_no, format!("bad arm count `{value}`")))?;
                    if n > MAX_ARMS {
                        return Err(err(line_no, format!("arm count {n} exceeds {MAX_ARMS}")));
                    }
                    set(&mut arms, vec![(None, None, None); n], key, line_no)?;
                }
                _ => {
                    let rest = key
                        .strip_prefix("arm.")
                        .ok_or_else(|| err(line_no, format!("unknown key `{key}`")))?;
                    let (index, field) = rest
                        .split_once('.')
                        .ok_or_else(|| err(line_no, format!("unknown key `{key}`")))?;
                    let table = arms
                        .as_mut()
                        .ok_or_else(|| err(line_no, "arm entry before `arms=`".to_string()))?;
                    let index: usize = index
                        .parse()
                        .map_err(|_| err(line_no, format!("bad arm index in `{key}`")))?;
                    let entry = table
                        .get_mut(index)
                        .ok_or_else(|| err(line_no, format!("arm index {index} out of range")))?;
                    match field {
                        "quality" => set(&mut entry.0, parse_f64(value).map_err(|e| err(line_no, e))?, key, line_no)?,
                        "plays" => {
                            let plays = value
                                .parse()
                                .map_err(|_| err(line_no, format!("bad play count `{value}`")))?;
                            set(&mut entry.1, plays, key, line_no)?
                        }
                        "probability" => set(&mut entry.2, parse_f64(value).map_err(|e| err(line_no, e))?, key, line_no)?,
                        _ => return Err(err(line_no, format!("unknown key `{key}`"))),
                    }
                }
            }
        }

        let end = text.lines().count();
        let missing = |what: &str| err(end, format!("missing `{what}`"));
        let arms = arms
            .ok_or_else(|| missing("arms"))?
            .into_iter()
            .enumerate()
            .map(|(i, (q, n, p))| match (q, n, p) {
                (Some(quality), Some(plays), Some(probability)) => Ok(ArmSnapshot {
                    quality,
                    plays,
                    probability,
                }),
                _ => Err(err(end, format!("arm {i} is incomplete"))),
            })
            .collect::<Result<Vec<_>, _>>()?;

        Ok(Snapshot {
            policy: policy.ok_or_else(|| missing("policy"))?,
            credit: credit.ok_or_else(|| missing("credit"))?,
            reward: reward.ok_or_else(|| missing("reward"))?,
            cadence: cadence.ok_or_else(|| missing("cadence"))?,
            alpha: alpha.ok_or_else(|| missing("alpha"))?,
            arms,
        })
    }
}

fn parse_f64(value: &str) -> Result<f64, String> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("bad number `{value}`"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{AosConfig, ArmId, Controller};
    use proptest::prelude::*;

    fn sample() -> Snapshot {
        let cfg = AosConfig::for_arms(Policy::ProbabilityMatching, 3)
            .with_cadence(Cadence::PerMutation);
        let mut c = Controller::new(cfg, 3).unwrap();
        c.credit(ArmId(0), 0.5).unwrap();
        c.credit(ArmId(2), 0.1).unwrap();
        c.snapshot()
    }

    #[test]
    fn renders_documented_keys() {
        let text = sample().to_string();
        assert!(text.starts_with("policy=pm\ncredit=avg\nreward=raw\ncadence=mutation\nalpha=0.8\narms=3\n"));
        assert!(text.contains("arm.0.quality=0.5\narm.0.plays=1\n"));
    }

    #[test]
    fn parses_what_it_renders() {
        let snap = sample();
        assert_eq!(snap.to_string().parse::<Snapshot>().unwrap(), snap);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!("policy=pm".parse::<Snapshot>().is_err());
        assert!("arms=1\narm.1.quality=1".parse::<Snapshot>().is_err());
        assert!("nonsense".parse::<Snapshot>().is_err());
        let dup = sample().to_string() + "policy=ap\n";
        assert!(dup.parse::<Snapshot>().is_err());
        let incomplete = sample()
            .to_string()
            .replace("arm.1.plays=0\n", "");
        assert!(incomplete.parse::<Snapshot>().is_err());
    }

    proptest! {
        #[test]
        fn round_trip(
            qualities in proptest::collection::vec((0.0f64..10.0, 0u64..1000, 0.0f64..=1.0), 2..8),
            alpha in 0.01f64..=1.0,
        ) {
            let snap = Snapshot {
                policy: Policy::AdaptivePursuit,
                credit: CreditAssignment::RecencyWeighted,
                reward: RewardType::RelativeToParent,
                cadence: Cadence::PerGeneration,
                alpha,
                arms: qualities
                    .into_iter()
                    .map(|(quality, plays, probability)| ArmSnapshot { quality, plays, probability })
                    .collect(),
            };
            prop_assert_eq!(snap.to_string().parse::<Snapshot>().unwrap(), snap);
        }
    }
}
