//! Test suites and fitness.
//!
//! Manifest format, one test per line:
//!
//! ```text
//! # comment
//! name | entry | arg, arg, ... | expected
//! empty_array | sum | [] | 0
//! three | sum | [1, 2, 3] | 6
//! ```
//!
//! Arguments are integers or bracketed integer arrays; the argument field
//! may be empty for a zero-argument entry point.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ast::Program;
use crate::error::{Fault, ManifestError};
use crate::interp::{Executable, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arg {
    Int(i64),
    Array(Vec<i64>),
}

impl From<&Arg> for Value {
    fn from(a: &Arg) -> Value {
        match a {
            Arg::Int(v) => Value::Int(*v),
            Arg::Array(v) => Value::Array(v.clone()),
        }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Int(v) => write!(f, "{v}"),
            Arg::Array(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub name: String,
    pub entry: String,
    pub args: Vec<Arg>,
    pub expected: i64,
}

/// Result of running one test case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TestOutcome {
    Pass,
    WrongValue(i64),
    NonInteger,
    Fault(Fault),
}

impl TestCase {
    pub fn run(&self, program: &Program, step_budget: u64) -> TestOutcome {
        self.run_lowered(&Executable::new(program), step_budget)
    }

    fn run_lowered(&self, exe: &Executable, step_budget: u64) -> TestOutcome {
        let args = self.args.iter().map(Value::from).collect();
        match exe.run(&self.entry, args, step_budget, None) {
            Ok(Value::Int(v)) if v == self.expected => TestOutcome::Pass,
            Ok(Value::Int(v)) => TestOutcome::WrongValue(v),
            Ok(Value::Array(_)) => TestOutcome::NonInteger,
            Err(fault) => TestOutcome::Fault(fault),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TestSuite {
    pub cases: Vec<TestCase>,
}

impl TestSuite {
    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TestCase> {
        self.cases.iter()
    }
}

/// Pass/fail vector for one program against one suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    pub pass_flags: Vec<bool>,
    /// Passing fraction, `passed / total`.
    pub fitness: f64,
    /// Position of this evaluation in the search's evaluation order, when
    /// the report was produced by a search.
    pub evaluated_variant_index: Option<u64>,
}

impl FitnessReport {
    pub fn passed(&self) -> usize {
        self.pass_flags.iter().filter(|p| **p).count()
    }

    pub fn total(&self) -> usize {
        self.pass_flags.len()
    }

    pub fn all_pass(&self) -> bool {
        !self.pass_flags.is_empty() && self.pass_flags.iter().all(|p| *p)
    }
}

/// Runs every test in a fresh interpreter. A variant whose entry point is
/// missing for any test is non-viable and scores 0 across the board.
pub fn run_tests(program: &Program, suite: &TestSuite, step_budget: u64) -> FitnessReport {
    let exe = Executable::new(program);
    let viable = suite.iter().all(|t| exe.has_function(&t.entry));
    let pass_flags: Vec<bool> = if viable {
        suite
            .iter()
            .map(|t| t.run_lowered(&exe, step_budget) == TestOutcome::Pass)
            .collect()
    } else {
        vec![false; suite.len()]
    };
    let total = pass_flags.len();
    let passed = pass_flags.iter().filter(|p| **p).count();
    FitnessReport {
        pass_flags,
        fitness: if total == 0 { 0.0 } else { passed as f64 / total as f64 },
        evaluated_variant_index: None,
    }
}

fn manifest_err(line: usize, message: impl Into<String>) -> ManifestError {
    ManifestError {
        line,
        message: message.into(),
    }
}

fn parse_int(text: &str, line: usize) -> Result<i64, ManifestError> {
    text.trim()
        .parse::<i64>()
        .map_err(|_| manifest_err(line, format!("bad integer `{}`", text.trim())))
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_args(text: &str, line: usize) -> Result<Vec<Arg>, ManifestError> {
    let text = text.trim();
    let mut args = Vec::new();
    if text.is_empty() {
        return Ok(args);
    }
    let mut rest = text;
    loop {
        rest = rest.trim_start();
        if let Some(after) = rest.strip_prefix('[') {
            let close = after
                .find(']')
                .ok_or_else(|| manifest_err(line, "unterminated array argument"))?;
            let inner = after[..close].trim();
            let items = if inner.is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|v| parse_int(v, line))
                    .collect::<Result<Vec<_>, _>>()?
            };
            args.push(Arg::Array(items));
            rest = after[close + 1..].trim_start();
        } else {
            let end = rest.find(',').unwrap_or(rest.len());
            args.push(Arg::Int(parse_int(&rest[..end], line)?));
            rest = &rest[end..];
        }
        if rest.is_empty() {
            return Ok(args);
        }
        rest = rest
            .strip_prefix(',')
            .ok_or_else(|| manifest_err(line, format!("expected `,` before `{rest}`")))?;
    }
}

impl FromStr for TestSuite {
    type Err = ManifestError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut cases: Vec<TestCase> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('|').collect();
            if fields.len() != 4 {
                return Err(manifest_err(
                    line,
                    format!("expected 4 `|`-separated fields, found {}", fields.len()),
                ));
            }
            let name = fields[0].trim();
            let entry = fields[1].trim();
            if name.is_empty() {
                return Err(manifest_err(line, "empty test name"));
            }
            if cases.iter().any(|c| c.name == name) {
                return Err(manifest_err(line, format!("duplicate test name `{name}`")));
            }
            if !is_ident(entry) {
                return Err(manifest_err(line, format!("bad entry function `{entry}`")));
            }
            cases.push(TestCase {
                name: name.to_string(),
                entry: entry.to_string(),
                args: parse_args(fields[2], line)?,
                expected: parse_int(fields[3], line)?,
            });
        }
        Ok(TestSuite { cases })
    }
}

impl fmt::Display for TestSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cases {
            let args: Vec<String> = c.args.iter().map(|a| a.to_string()).collect();
            writeln!(f, "{} | {} | {} | {}", c.name, c.entry, args.join(", "), c.expected)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;
    use proptest::prelude::*;

    #[test]
    fn parses_manifest() {
        let suite: TestSuite = "# header\n\nsum3 | sum | [1, 2, 3] | 6\nempty | sum | [] | 0\nneg | f | -4, [ -1 ,2], 7 | -9\nnone | g |  | 3\n"
            .parse()
            .unwrap();
        assert_eq!(suite.len(), 4);
        assert_eq!(suite.cases[0].args, vec![Arg::Array(vec![1, 2, 3])]);
        assert_eq!(suite.cases[1].args, vec![Arg::Array(vec![])]);
        assert_eq!(
            suite.cases[2].args,
            vec![Arg::Int(-4), Arg::Array(vec![-1, 2]), Arg::Int(7)]
        );
        assert_eq!(suite.cases[2].expected, -9);
        assert!(suite.cases[3].args.is_empty());
    }

    #[test]
    fn manifest_errors_carry_line() {
        let cases = [
            "a | f | 1 | 2\nb | f | 1",
            "a | f | [1, 2 | 2",
            "a | f | 1 2 | 2",
            "a | f | x | 2",
            "a | f | 1 | two",
            "a | 1f | 1 | 2",
            "a | f | 1 | 2\na | f | 2 | 3",
            " | f | 1 | 2",
        ];
        for text in cases {
            assert!(text.parse::<TestSuite>().is_err(), "{text}");
        }
        let err = "ok | f | 1 | 1\n\nbad | f | 1".parse::<TestSuite>().unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn fitness_is_passing_fraction() {
        let p = parse("fn id(x) { return x; }").unwrap();
        let suite: TestSuite = "a | id | 1 | 1\nb | id | 2 | 3\nc | id | 5 | 5\nd | id | 0 | 0".parse().unwrap();
        let r = run_tests(&p, &suite, 1000);
        assert_eq!(r.pass_flags, vec![true, false, true, true]);
        assert_eq!(r.fitness, 0.75);
        assert_eq!((r.passed(), r.total()), (3, 4));
    }

    #[test]
    fn missing_entry_scores_zero() {
        let p = parse("fn id(x) { return x; }").unwrap();
        let suite: TestSuite = "a | id | 1 | 1\nb | other | 2 | 2".parse().unwrap();
        let r = run_tests(&p, &suite, 1000);
        assert_eq!(r.fitness, 0.0);
        assert_eq!(r.pass_flags, vec![false, false]);
    }

    #[test]
    fn non_terminating_program_scores_zero() {
        let p = parse("fn f(x) { while (1) { } return x; }").unwrap();
        let suite: TestSuite = "a | f | 1 | 1\nb | f | 2 | 2".parse().unwrap();
        assert_eq!(run_tests(&p, &suite, 10_000).fitness, 0.0);
    }

    fn arg() -> impl Strategy<Value = Arg> {
        prop_oneof![
            any::<i64>().prop_map(Arg::Int),
            proptest::collection::vec(any::<i64>(), 0..5).prop_map(Arg::Array),
        ]
    }

    proptest! {
        #[test]
        fn manifest_round_trip(
            cases in proptest::collection::vec((proptest::collection::vec(arg(), 0..4), any::<i64>()), 1..6)
        ) {
            let suite = TestSuite {
                cases: cases
                    .into_iter()
                    .enumerate()
                    .map(|(i, (args, expected))| TestCase {
                        name: format!("t{i}"),
                        entry: "f".into(),
                        args,
                        expected,
                    })
                    .collect(),
            };
            prop_assert_eq!(suite.to_string().parse::<TestSuite>().unwrap(), suite);
        }
    }
}
