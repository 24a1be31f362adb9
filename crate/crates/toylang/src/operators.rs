use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The eighteen mutation operators: three coarse statement edits and
/// fifteen bug-class templates.
///
/// The canonical order below is also the arm order when every operator is
/// its own arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MutationOperator {
    /// Insert a copy of a donor statement after the target.
    StmtAppend,
    /// Remove the target.
    StmtDelete,
    /// Overwrite the target with a copy of a donor statement.
    StmtReplace,
    /// Call a different function of the same arity.
    FuncCallSwap,
    /// Swap an expression for a same-typed expression from the function.
    ExprReplace,
    /// Conjoin or disjoin an extra term onto a branch or loop condition.
    ExprAdd,
    /// Drop one side of an `&&` / `||`.
    ExprRemove,
    /// Wrap the target in `if (v != 0)`.
    GuardInsert,
    /// Wrap the target in `if (i >= 0 && i < len(a))` for an index `a[i]`.
    RangeCheckInsert,
    /// Wrap the target in `if (len(a) > 0)`.
    SizeCheckInsert,
    /// Insert `if (v < 0) { v = 0; }` before the target.
    LowerBoundClamp,
    /// Insert `if (i > len(a) - 1) { i = len(a) - 1; }` before the target.
    UpperBoundClamp,
    /// Shift an index or loop bound by one.
    OffByOne,
    /// Insert `v = 0;` or `v = 1;` before the target.
    VarInitInsert,
    /// Add or subtract one from an integer literal.
    ConstPerturb,
    /// Invert a comparison, or test a condition against zero.
    NegateCondition,
    /// Insert `return e;` after the target.
    DefaultReturnInsert,
    /// Exchange the target with the statement that follows it.
    StmtSwap,
}

/// Template families; operators in one family share an arm under the
/// seven-arm scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OperatorGroup {
    Coarse,
    FuncExpr,
    Checks,
    InitCast,
    MultiLine,
}

impl OperatorGroup {
    pub const TEMPLATE_GROUPS: [OperatorGroup; 4] = [
        OperatorGroup::FuncExpr,
        OperatorGroup::Checks,
        OperatorGroup::InitCast,
        OperatorGroup::MultiLine,
    ];

    pub fn members(self) -> Vec<MutationOperator> {
        MutationOperator::ALL
            .into_iter()
            .filter(|op| op.group() == self)
            .collect()
    }
}

impl MutationOperator {
    pub const ALL: [MutationOperator; 18] = [
        MutationOperator::StmtAppend,
        MutationOperator::StmtDelete,
        MutationOperator::StmtReplace,
        MutationOperator::FuncCallSwap,
        MutationOperator::ExprReplace,
        MutationOperator::ExprAdd,
        MutationOperator::ExprRemove,
        MutationOperator::GuardInsert,
        MutationOperator::RangeCheckInsert,
        MutationOperator::SizeCheckInsert,
        MutationOperator::LowerBoundClamp,
        MutationOperator::UpperBoundClamp,
        MutationOperator::OffByOne,
        MutationOperator::VarInitInsert,
        MutationOperator::ConstPerturb,
        MutationOperator::NegateCondition,
        MutationOperator::DefaultReturnInsert,
        MutationOperator::StmtSwap,
    ];

    pub const COARSE: [MutationOperator; 3] = [
        MutationOperator::StmtAppend,
        MutationOperator::StmtDelete,
        MutationOperator::StmtReplace,
    ];

    pub fn group(self) -> OperatorGroup {
        use MutationOperator::*;
        match self {
            StmtAppend | StmtDelete | StmtReplace => OperatorGroup::Coarse,
            FuncCallSwap | ExprReplace | ExprAdd | ExprRemove => OperatorGroup::FuncExpr,
            GuardInsert | RangeCheckInsert | SizeCheckInsert | LowerBoundClamp | UpperBoundClamp | OffByOne => {
                OperatorGroup::Checks
            }
            VarInitInsert | ConstPerturb | NegateCondition | DefaultReturnInsert => OperatorGroup::InitCast,
            StmtSwap => OperatorGroup::MultiLine,
        }
    }

    /// Position in [`MutationOperator::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        use MutationOperator::*;
        match self {
            StmtAppend => "StmtAppend",
            StmtDelete => "StmtDelete",
            StmtReplace => "StmtReplace",
            FuncCallSwap => "FuncCallSwap",
            ExprReplace => "ExprReplace",
            ExprAdd => "ExprAdd",
            ExprRemove => "ExprRemove",
            GuardInsert => "GuardInsert",
            RangeCheckInsert => "RangeCheckInsert",
            SizeCheckInsert => "SizeCheckInsert",
            LowerBoundClamp => "LowerBoundClamp",
            UpperBoundClamp => "UpperBoundClamp",
            OffByOne => "OffByOne",
            VarInitInsert => "VarInitInsert",
            ConstPerturb => "ConstPerturb",
            NegateCondition => "NegateCondition",
            DefaultReturnInsert => "DefaultReturnInsert",
            StmtSwap => "StmtSwap",
        }
    }
}

impl fmt::Display for MutationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MutationOperator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MutationOperator::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| format!("unknown mutation operator `{s}`"))
    }
}
