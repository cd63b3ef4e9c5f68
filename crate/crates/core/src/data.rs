//! The embedded data files and their loading.
//!
//! | file              | contents                                              |
//! |-------------------|-------------------------------------------------------|
//! | `strata.gwis`     | the 30 basis strata, `k: <gwis>` per line             |
//! | `theorem.gwis`    | right-hand side of the relation with printed weights  |
//! | `solution.table`  | tabulated solution, `k: p/q` per line                 |
//! | `equations.json`  | the 49 constraint equations                           |
//!
//! A data directory may override any subset of these files.

use std::io;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use crate::linsys::EquationSet;
use crate::strata::{BasisCatalog, SolutionTable, TheoremRhs};

pub const STRATA_FILE: &str = "strata.gwis";
pub const THEOREM_FILE: &str = "theorem.gwis";
pub const SOLUTION_FILE: &str = "solution.table";
pub const EQUATIONS_FILE: &str = "equations.json";

const STRATA: &str = include_str!("../data/strata.gwis");
const THEOREM: &str = include_str!("../data/theorem.gwis");
const SOLUTION: &str = include_str!("../data/solution.table");
const EQUATIONS: &str = include_str!("../data/equations.json");

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{file}: line {line}: {message}")]
    Line {
        file: &'static str,
        line: usize,
        message: String,
    },
    #[error("{file}: {message}")]
    Integrity { file: &'static str, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl DataError {
    pub(crate) fn integrity(file: &'static str, message: impl Into<String>) -> DataError {
        DataError::Integrity {
            file,
            message: message.into(),
        }
    }
}

/// Raw text of the four data files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataFiles {
    pub strata: String,
    pub theorem: String,
    pub solution: String,
    pub equations: String,
}

impl DataFiles {
    pub fn embedded() -> DataFiles {
        DataFiles {
            strata: STRATA.to_string(),
            theorem: THEOREM.to_string(),
            solution: SOLUTION.to_string(),
            equations: EQUATIONS.to_string(),
        }
    }

    /// Reads the files present in `dir`; absent ones keep their embedded contents.
    pub fn from_dir(dir: &Path) -> Result<DataFiles, DataError> {
        let read = |name: &str, fallback: &str| -> Result<String, DataError> {
            let path = dir.join(name);
            match std::fs::read_to_string(&path) {
                Ok(text) => Ok(text),
                Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(fallback.to_string()),
                Err(source) => Err(DataError::Io {
                    path: path.display().to_string(),
                    source,
                }),
            }
        };
        if !dir.is_dir() {
            return Err(DataError::Io {
                path: dir.display().to_string(),
                source: io::Error::new(io::ErrorKind::NotFound, "not a directory"),
            });
        }
        Ok(DataFiles {
            strata: read(STRATA_FILE, STRATA)?,
            theorem: read(THEOREM_FILE, THEOREM)?,
            solution: read(SOLUTION_FILE, SOLUTION)?,
            equations: read(EQUATIONS_FILE, EQUATIONS)?,
        })
    }
}

/// All catalogs, parsed and checked.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub basis: BasisCatalog,
    pub theorem: TheoremRhs,
    pub table: SolutionTable,
    pub equations: EquationSet,
}

impl Dataset {
    pub fn load(files: &DataFiles) -> Result<Dataset, DataError> {
        let basis = BasisCatalog::from_text(&files.strata)?;
        let theorem = TheoremRhs::from_text(&files.theorem, &basis)?;
        let table = SolutionTable::from_text(&files.solution)?;
        let equations = EquationSet::from_json(&files.equations)?;
        Ok(Dataset {
            basis,
            theorem,
            table,
            equations,
        })
    }

    /// The embedded data, parsed once.
    pub fn embedded() -> &'static Dataset {
        static DATA: OnceLock<Dataset> = OnceLock::new();
        DATA.get_or_init(|| {
            Dataset::load(&DataFiles::embedded()).expect("embedded data files are consistent")
        })
    }
}

/// Non-blank, non-comment lines with their 1-based line numbers.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(n, line)| (n + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}
