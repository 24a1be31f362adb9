//! A small integer-only imperative language used as a program-repair
//! substrate.
//!
//! The crate covers the whole per-variant pipeline: [`parse`] source into a
//! [`Program`] whose statements carry stable ids, run it against a
//! [`TestSuite`] with [`run_tests`], rank statements with [`localize`],
//! and change it through [`Edit`]s minted by one of the eighteen
//! [`MutationOperator`]s.
//!
//! ```
//! use toylang::{parse, run_tests, TestSuite, DEFAULT_STEP_BUDGET};
//!
//! let program = parse("fn inc(x) { return x + 1; }").unwrap();
//! let suite: TestSuite = "one | inc | 1 | 2\nzero | inc | 0 | 1".parse().unwrap();
//! assert_eq!(run_tests(&program, &suite, DEFAULT_STEP_BUDGET).fitness, 1.0);
//! ```

pub mod ast;
pub mod edit;
pub mod error;
pub mod interp;
pub mod localize;
pub mod mutate;
pub mod operators;
pub mod parser;
pub mod patch;
mod printer;
mod scope;
pub mod suite;

pub use ast::{BinOp, Expr, ExprPath, Function, Program, Stmt, StmtId, StmtKind, BUILTINS};
pub use edit::{apply_edit, apply_edits, Applied, Edit, EditSyntaxError, Payload, Side};
pub use error::{Fault, LocalizeError, ManifestError, ParseError, PatchError};
pub use interp::{execute, execute_with_coverage, Value, DEFAULT_STEP_BUDGET};
pub use localize::{localize, SuspiciousnessMap, TestCoverage};
pub use mutate::{enumerate_single_edits, mint_edit, options, Inapplicable};
pub use operators::{MutationOperator, OperatorGroup};
pub use parser::{parse, parse_expr};
pub use patch::Patch;
pub use suite::{run_tests, Arg, FitnessReport, TestCase, TestOutcome, TestSuite};
