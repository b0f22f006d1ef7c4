//! Kernel programs, launch geometry, reduce operations and the variant
//! dispatch rule.
//!
//! Kernels are written once against [`WarpMemory`] and executed by both the
//! SIMT simulator ([`crate::sim`]) and the native backend ([`crate::native`]).

mod config;
mod ctx;
mod memory;
mod programs;
mod reduce;

use thiserror::Error;

use crate::sparse::{validate, CsrMatrix, DenseMatrix, ValidationReport};

pub use config::{
    launch_geometry, select_variant, FaultInjection, KernelConfig, KernelVariant,
    LaunchGeometry, MAX_WARP_SIZE, SUPPORTED_CF,
};
pub use ctx::{LaneIter, LaneMask, SharedTile, ThreadCtx, WarpCtx, MAX_CF};
pub use memory::{AccessKind, ArrayId, WarpMemory};
pub use programs::{execute_warp, kernel_crc, kernel_crc_cwm, kernel_naive};
pub use reduce::ReduceOp;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("warp size {0} must be a power of two in [4, {MAX_WARP_SIZE}]")]
    WarpSize(usize),
    #[error("warps per block must be at least 1")]
    WarpsPerBlock,
    #[error("coarsening factor {0} not in {{2, 4, 8}}")]
    CoarseningFactor(usize),
    #[error("unknown kernel variant {0:?}")]
    UnknownVariant(String),
    #[error("unknown fault {0:?}")]
    UnknownFault(String),
}

/// Reasons a kernel launch is refused.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LaunchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("A has {a_cols} columns but B has {b_rows} rows")]
    DimensionMismatch { a_cols: usize, b_rows: usize },
    #[error("non-canonical CSR input: {0}")]
    NonCanonical(ValidationReport),
}

/// Checks configuration, operand shapes and CSR canonicity before a launch.
pub fn check_launch(a: &CsrMatrix, b: &DenseMatrix, cfg: &KernelConfig) -> Result<(), LaunchError> {
    cfg.validate()?;
    if a.n_cols() != b.n_rows() {
        return Err(LaunchError::DimensionMismatch {
            a_cols: a.n_cols(),
            b_rows: b.n_rows(),
        });
    }
    let report = validate(a);
    if !report.is_canonical() {
        return Err(LaunchError::NonCanonical(report));
    }
    Ok(())
}
