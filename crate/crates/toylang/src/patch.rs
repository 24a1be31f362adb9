//! Patch files: an edit list bound to the bug it was found for.
//!
//! ```text
//! # found by attempt 3
//! bug = offbyone-1
//! OffByOne @5 path=2 delta=-1
//! ```
//!
//! The `bug =` header comes first; every later non-comment line is one
//! [`Edit`]. An empty edit list is allowed and denotes the unmodified
//! program.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ast::Program;
use crate::edit::{apply_edits, Applied, Edit};
use crate::error::PatchError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Patch {
    pub bug: String,
    pub edits: Vec<Edit>,
}

impl Patch {
    pub fn apply(&self, program: &Program) -> Applied {
        apply_edits(program, &self.edits)
    }
}

impl fmt::Display for Patch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bug = {}", self.bug)?;
        for e in &self.edits {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

impl FromStr for Patch {
    type Err = PatchError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut bug: Option<String> = None;
        let mut edits = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |message: String| PatchError { line, message };
            if bug.is_none() {
                let name = trimmed
                    .strip_prefix("bug")
                    .map(str::trim_start)
                    .and_then(|r| r.strip_prefix('='))
                    .map(str::trim)
                    .ok_or_else(|| err("patch must start with `bug = <name>`".into()))?;
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(err(format!("bad bug name `{name}`")));
                }
                bug = Some(name.to_string());
                continue;
            }
            edits.push(trimmed.parse::<Edit>().map_err(|e| err(e.0))?);
        }
        let bug = bug.ok_or(PatchError {
            line: 0,
            message: "missing `bug = <name>` header".into(),
        })?;
        Ok(Patch { bug, edits })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "bug = mid3\nStmtReplace @4 donor=2\nOffByOne @5 path=2 delta=-1\n";
        let p: Patch = text.parse().unwrap();
        assert_eq!(p.bug, "mid3");
        assert_eq!(p.edits.len(), 2);
        assert_eq!(p.to_string(), text);
    }

    #[test]
    fn comments_and_empty_patch() {
        let p: Patch = "# nothing\n\nbug = x\n".parse().unwrap();
        assert!(p.edits.is_empty());
    }

    #[test]
    fn errors_carry_lines() {
        assert_eq!("".parse::<Patch>().unwrap_err().line, 0);
        assert_eq!("StmtDelete @1".parse::<Patch>().unwrap_err().line, 1);
        assert_eq!("bug = a\n\nStmtDelete".parse::<Patch>().unwrap_err().line, 3);
        assert!("bug = a b".parse::<Patch>().is_err());
    }
}
