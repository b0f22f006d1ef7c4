//! A CSR sparse-times-dense matrix multiplication laboratory.
//!
//! Three warp-level kernel programs (a naive row-per-warp kernel, coalesced
//! row caching, and row caching with warp merging) are written once and run
//! on two backends:
//!
//! - [`sim`] executes warps in lockstep over a 32-byte segment coalescing
//!   model and reports global-load transactions and load efficiency.
//! - [`native`] runs the same programs on all cores for real output and
//!   wall-clock throughput.
//!
//! [`oracle`] holds brute-force references that share no code with either
//! backend, and [`verify`] ties them together.
//!
//! ```
//! use spmm_lab::kernel::{KernelConfig, KernelVariant, ReduceOp};
//! use spmm_lab::sparse::{gen_uniform_random, DenseMatrix, GraphGenSpec};
//!
//! let a = gen_uniform_random(&GraphGenSpec::new(256, 2560, 1)).unwrap();
//! let b = DenseMatrix::random(256, 64, 1);
//! let cfg = KernelConfig::new(KernelVariant::Crc);
//! let (c, metrics) = spmm_lab::sim::run_kernel(&a, &b, &cfg, &ReduceOp::sum()).unwrap();
//! let native = spmm_lab::native::spmm(&a, &b, KernelVariant::Crc, &ReduceOp::sum(), 0).unwrap();
//! assert!(c.bitwise_eq(&native));
//! assert!(metrics.gld_efficiency > 0.9);
//! ```

pub mod kernel;
pub mod native;
pub mod oracle;
pub mod sim;
pub mod sparse;
pub mod verify;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/getting-started.md")]
    mod getting_started {}
    #[doc = include_str!("../../../book/src/csr.md")]
    mod csr {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/memory-model.md")]
    mod memory_model {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/native.md")]
    mod native {}
}
