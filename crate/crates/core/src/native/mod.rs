//! Multi-core execution of the kernel programs for real output and
//! wall-clock throughput.
//!
//! The same warp programs the simulator meters run here against plain
//! memory. Each task is a `(row, column tile)` pair; tasks are grouped into
//! row chunks that own disjoint slices of `C`, so no synchronization is
//! needed beyond joining the workers.

mod bench;
mod exec;

pub use bench::{bench, checksum, speedup, ThroughputReport, DEFAULT_REPEATS};
pub use exec::{spmm, spmm_with, ExecPlan};

use thiserror::Error;

use crate::kernel::LaunchError;

#[derive(Debug, Error)]
pub enum NativeError {
    #[error(transparent)]
    Launch(#[from] LaunchError),
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("repeats must be at least 1")]
    NoRepeats,
}
