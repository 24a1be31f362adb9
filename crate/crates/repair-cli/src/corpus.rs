//! On-disk bug corpus.
//!
//! Each bug is a directory named after it:
//!
//! ```text
//! corpus/
//!   mid3/
//!     bug.toy         buggy program (required)
//!     repair.tests    suite the search must satisfy (required)
//!     fixed.toy       developer fix (optional)
//!     heldout.tests   evaluation-only suite (optional)
//! ```

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use gp_engine::Problem;
use thiserror::Error;
use toylang::{parse, ManifestError, ParseError, Program, TestSuite};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}:{source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("{}:{source}", path.display())]
    Manifest {
        path: PathBuf,
        #[source]
        source: ManifestError,
    },
    #[error("bug `{0}` is not in the corpus")]
    UnknownBug(String),
    #[error("no bugs found under {}", .0.display())]
    Empty(PathBuf),
}

#[derive(Debug, Clone)]
pub struct Bug {
    pub name: String,
    pub dir: PathBuf,
    pub program: Program,
    pub repair: TestSuite,
    pub fixed: Option<Program>,
    pub heldout: Option<TestSuite>,
}

impl Bug {
    pub fn problem(&self) -> Problem {
        Problem {
            name: self.name.clone(),
            program: self.program.clone(),
            suite: self.repair.clone(),
        }
    }
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_optional(path: &Path) -> Result<Option<String>, CorpusError> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(Some(text)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(source) => Err(CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

fn program(path: &Path, text: &str) -> Result<Program, CorpusError> {
    parse(text).map_err(|source| CorpusError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn suite(path: &Path, text: &str) -> Result<TestSuite, CorpusError> {
    text.parse().map_err(|source| CorpusError::Manifest {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_bug(dir: &Path) -> Result<Bug, CorpusError> {
    let file = |name: &str| dir.join(name);
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let p = file("bug.toy");
    let buggy = program(&p, &read(&p)?)?;
    let p = file("repair.tests");
    let repair = suite(&p, &read(&p)?)?;
    let p = file("fixed.toy");
    let fixed = read_optional(&p)?.map(|t| program(&p, &t)).transpose()?;
    let p = file("heldout.tests");
    let heldout = read_optional(&p)?.map(|t| suite(&p, &t)).transpose()?;
    Ok(Bug {
        name,
        dir: dir.to_path_buf(),
        program: buggy,
        repair,
        fixed,
        heldout,
    })
}

/// Every bug under a root, plus the bugs that failed to load.
#[derive(Debug)]
pub struct Corpus {
    pub root: PathBuf,
    pub bugs: Vec<Bug>,
    pub errors: Vec<(String, CorpusError)>,
}

impl Corpus {
    /// Loads every subdirectory of `root` in name order. Only an unreadable
    /// or bug-free root is an error; broken bugs are collected in `errors`.
    pub fn load(root: &Path) -> Result<Self, CorpusError> {
        let entries = fs::read_dir(root).map_err(|source| CorpusError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        let mut dirs: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        dirs.sort();
        if dirs.is_empty() {
            return Err(CorpusError::Empty(root.to_path_buf()));
        }
        let mut corpus = Corpus {
            root: root.to_path_buf(),
            bugs: Vec::new(),
            errors: Vec::new(),
        };
        for dir in dirs {
            match load_bug(&dir) {
                Ok(bug) => corpus.bugs.push(bug),
                Err(e) => {
                    let name = dir.file_name().unwrap_or_default().to_string_lossy().into_owned();
                    corpus.errors.push((name, e));
                }
            }
        }
        Ok(corpus)
    }

    pub fn get(&self, name: &str) -> Option<&Bug> {
        self.bugs.iter().find(|b| b.name == name)
    }
}
