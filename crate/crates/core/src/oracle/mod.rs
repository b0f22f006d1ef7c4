//! Brute-force references kept independent of the kernels and the
//! simulator: a densified SpMM and a recount of verbose access traces.

mod dense_ref;
mod recount;

pub use dense_ref::{dense_reference, DenseRef, DENSE_CAP};
pub use recount::{compare_totals, recount_trace, ArrayTotals, TraceTotals};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("densifying {rows}x{cols} exceeds the {cap}-element cap")]
    TooLarge { rows: usize, cols: usize, cap: usize },
    #[error("A has {a_cols} columns but B has {b_rows} rows")]
    DimensionMismatch { a_cols: usize, b_rows: usize },
    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
