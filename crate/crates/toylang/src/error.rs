use std::fmt;

use thiserror::Error;

/// Syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// Why a single test execution did not produce a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fault {
    DivisionByZero,
    IndexOutOfBounds { array: String, index: i64, len: usize },
    UndefinedVariable(String),
    UnknownFunction(String),
    Arity { function: String, expected: usize, got: usize },
    TypeMismatch(&'static str),
    MissingReturn(String),
    StepBudgetExhausted,
    CallDepthExceeded,
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::DivisionByZero => write!(f, "division by zero"),
            Fault::IndexOutOfBounds { array, index, len } => {
                write!(f, "index {index} out of bounds for `{array}` of length {len}")
            }
            Fault::UndefinedVariable(v) => write!(f, "undefined variable `{v}`"),
            Fault::UnknownFunction(name) => write!(f, "unknown function `{name}`"),
            Fault::Arity {
                function,
                expected,
                got,
            } => write!(f, "`{function}` takes {expected} arguments, got {got}"),
            Fault::TypeMismatch(what) => write!(f, "type mismatch: {what}"),
            Fault::MissingReturn(name) => write!(f, "`{name}` finished without returning"),
            Fault::StepBudgetExhausted => write!(f, "step budget exhausted"),
            Fault::CallDepthExceeded => write!(f, "call depth exceeded"),
        }
    }
}

impl std::error::Error for Fault {}

/// Malformed test-suite manifest.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ManifestError {
    pub line: usize,
    pub message: String,
}

/// Malformed patch file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct PatchError {
    pub line: usize,
    pub message: String,
}

/// Fault localization could not run.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalizeError {
    #[error("nothing to repair: every test already passes")]
    NothingToRepair,
    #[error("entry function `{0}` is missing")]
    MissingEntry(String),
}
