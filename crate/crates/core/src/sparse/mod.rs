//! Sparse and dense matrix types, Matrix Market and binary ingestion, and
//! random graph generation.

mod cache;
mod coo;
mod csr;
mod dense;
mod gen;
mod mtx;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

pub use cache::{read_csr_cache, write_csr_cache, MAGIC as CSR_CACHE_MAGIC};
pub use coo::{from_coo, to_coo, CooEntries, DedupPolicy};
pub use csr::{validate, CsrMatrix, ValidationReport, Violation};
pub use dense::{DenseMatrix, DEFAULT_BASE_ALIGNMENT};
pub use gen::{gen_uniform_random, GraphGenSpec};
pub use mtx::{parse_matrix_market, write_matrix_market, MatrixMarketError};

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("entry ({row}, {col}, {value}) outside declared {n_rows}x{n_cols}")]
    EntryOutOfBounds {
        row: u32,
        col: u32,
        value: f32,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("non-canonical CSR: {0}")]
    NonCanonical(ValidationReport),
    #[error("dense data of length {len} does not match {n_rows}x{n_cols}")]
    DenseShape {
        n_rows: usize,
        n_cols: usize,
        len: usize,
    },
    #[error("base alignment {0} is not a power of two")]
    Alignment(u64),
    #[error("cannot place {nnz} nonzeros in a {n_rows}-row graph (capacity {capacity})")]
    InfeasibleGraph {
        n_rows: usize,
        nnz: usize,
        capacity: u64,
    },
    #[error("{0} exceeds 32-bit index range")]
    TooLarge(usize),
    #[error("not a CSR cache file (magic {0:?})")]
    BadMagic([u8; 4]),
    #[error(transparent)]
    MatrixMarket(#[from] MatrixMarketError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Loads a matrix from a `.mtx` (Matrix Market) or `.csr` (binary cache) file.
///
/// Matrix Market duplicates are summed.
pub fn load_matrix(path: &Path) -> Result<CsrMatrix, SparseError> {
    let file = BufReader::new(File::open(path)?);
    match path.extension().and_then(|e| e.to_str()) {
        Some("mtx") => from_coo(&parse_matrix_market(file)?, DedupPolicy::Sum),
        _ => read_csr_cache(file),
    }
}

/// Saves a matrix, choosing the format from the extension as [`load_matrix`] does.
pub fn save_matrix(m: &CsrMatrix, path: &Path) -> Result<(), SparseError> {
    let mut file = BufWriter::new(File::create(path)?);
    match path.extension().and_then(|e| e.to_str()) {
        Some("mtx") => write_matrix_market(&to_coo(m), &mut file)?,
        _ => write_csr_cache(m, &mut file)?,
    }
    file.flush()?;
    Ok(())
}
