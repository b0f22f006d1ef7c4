use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use spmm_lab::sparse::{gen_uniform_random, load_matrix, CsrMatrix, GraphGenSpec};

use crate::error::CliError;

/// Where a sparse matrix comes from: a file or a seeded generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixSource {
    Path(PathBuf),
    /// `random:ROWS:NNZ[:SEED]`; a missing seed falls back to `--seed`.
    Random {
        rows: usize,
        nnz: usize,
        seed: Option<u64>,
    },
}

impl MatrixSource {
    /// Fills in a missing generator seed so the descriptor is re-runnable.
    pub fn resolved(self, default_seed: u64) -> Self {
        match self {
            MatrixSource::Random { rows, nnz, seed: None } => MatrixSource::Random {
                rows,
                nnz,
                seed: Some(default_seed),
            },
            other => other,
        }
    }

    pub fn load(&self, default_seed: u64) -> Result<CsrMatrix, CliError> {
        match self {
            MatrixSource::Path(p) => {
                load_matrix(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
            }
            MatrixSource::Random { rows, nnz, seed } => {
                let spec = GraphGenSpec::new(*rows, *nnz, seed.unwrap_or(default_seed));
                gen_uniform_random(&spec).map_err(CliError::input)
            }
        }
    }
}

impl fmt::Display for MatrixSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixSource::Path(p) => write!(f, "{}", p.display()),
            MatrixSource::Random { rows, nnz, seed: Some(s) } => write!(f, "random:{rows}:{nnz}:{s}"),
            MatrixSource::Random { rows, nnz, seed: None } => write!(f, "random:{rows}:{nnz}"),
        }
    }
}

impl FromStr for MatrixSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let Some(spec) = s.strip_prefix("random:") else {
            return Ok(MatrixSource::Path(PathBuf::from(s)));
        };
        let parts: Vec<&str> = spec.split(':').collect();
        let num = |x: &str| x.parse::<u64>().map_err(|_| format!("bad number {x:?} in {s:?}"));
        match parts.as_slice() {
            [rows, nnz] => Ok(MatrixSource::Random {
                rows: num(rows)? as usize,
                nnz: num(nnz)? as usize,
                seed: None,
            }),
            [rows, nnz, seed] => Ok(MatrixSource::Random {
                rows: num(rows)? as usize,
                nnz: num(nnz)? as usize,
                seed: Some(num(seed)?),
            }),
            _ => Err(format!("expected random:ROWS:NNZ[:SEED], got {s:?}")),
        }
    }
}
