use std::fmt;
use std::str::FromStr;

use aos_core::ArmId;
use serde::{Deserialize, Serialize};
use toylang::{MutationOperator, OperatorGroup};

/// How concrete mutation operators map onto bandit arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArmScheme {
    /// The three coarse statement operators only.
    Arms3,
    /// Every operator is its own arm.
    Arms18,
    /// Coarse operators individually, then one arm per template group.
    Arms7,
}

const GROUP_ARMS: [OperatorGroup; 4] = OperatorGroup::TEMPLATE_GROUPS;

impl ArmScheme {
    pub const ALL: [ArmScheme; 3] = [ArmScheme::Arms3, ArmScheme::Arms18, ArmScheme::Arms7];

    pub fn n_arms(self) -> usize {
        match self {
            ArmScheme::Arms3 => 3,
            ArmScheme::Arms18 => 18,
            ArmScheme::Arms7 => 7,
        }
    }

    /// Operators the scheme can ever produce, in canonical order.
    pub fn operators(self) -> Vec<MutationOperator> {
        match self {
            ArmScheme::Arms3 => MutationOperator::COARSE.to_vec(),
            ArmScheme::Arms18 | ArmScheme::Arms7 => MutationOperator::ALL.to_vec(),
        }
    }

    /// The concrete operators behind `arm`; empty for an out-of-range arm.
    pub fn members(self, arm: ArmId) -> Vec<MutationOperator> {
        let i = arm.index();
        match self {
            ArmScheme::Arms3 => MutationOperator::COARSE.get(i).copied().into_iter().collect(),
            ArmScheme::Arms18 => MutationOperator::ALL.get(i).copied().into_iter().collect(),
            ArmScheme::Arms7 if i < 3 => vec![MutationOperator::COARSE[i]],
            ArmScheme::Arms7 => GROUP_ARMS.get(i - 3).map(|g| g.members()).unwrap_or_default(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ArmScheme::Arms3 => "3",
            ArmScheme::Arms18 => "18",
            ArmScheme::Arms7 => "7",
        }
    }
}

/// Arm that `op` belongs to, or `None` when the scheme excludes it.
pub fn arm_of(op: MutationOperator, scheme: ArmScheme) -> Option<ArmId> {
    match scheme {
        ArmScheme::Arms3 => MutationOperator::COARSE.iter().position(|c| *c == op).map(ArmId),
        ArmScheme::Arms18 => Some(ArmId(op.index())),
        ArmScheme::Arms7 => match op.group() {
            OperatorGroup::Coarse => Some(ArmId(op.index())),
            g => GROUP_ARMS.iter().position(|x| *x == g).map(|i| ArmId(3 + i)),
        },
    }
}

impl fmt::Display for ArmScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ArmScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "3" => Ok(ArmScheme::Arms3),
            "18" => Ok(ArmScheme::Arms18),
            "7" => Ok(ArmScheme::Arms7),
            other => Err(format!("unknown arm scheme `{other}` (expected 3, 18 or 7)")),
        }
    }
}
