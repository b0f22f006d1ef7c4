//! Runs every kernel variant on both backends against the dense oracle and
//! recounts the simulator's traces.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{FaultInjection, KernelConfig, KernelVariant, LaunchError, ReduceOp};
use crate::native::{spmm_with, NativeError};
use crate::oracle::{compare_totals, dense_reference, recount_trace, OracleError};
use crate::sim::{run_kernel_with, trace_to_string, SimOptions, TraceMode};
use crate::sparse::{CsrMatrix, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Sim,
    Native,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Sim => "sim",
            Backend::Native => "native",
        })
    }
}

/// Naive, Crc and every supported coarsening factor.
pub fn all_variants() -> Vec<KernelVariant> {
    let mut v = vec![KernelVariant::Naive, KernelVariant::Crc];
    v.extend(crate::kernel::SUPPORTED_CF.iter().map(|&cf| KernelVariant::CrcCwm { cf }));
    v
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub variants: Vec<KernelVariant>,
    pub warp_size: usize,
    pub warps_per_block: usize,
    pub fault: Option<FaultInjection>,
    /// Native worker threads; 0 means the rayon default.
    pub workers: usize,
    pub recount_traces: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        let cfg = KernelConfig::default();
        VerifyOptions {
            variants: all_variants(),
            warp_size: cfg.warp_size,
            warps_per_block: cfg.warps_per_block,
            fault: None,
            workers: 0,
            recount_traces: true,
        }
    }
}

/// First output element that differs from the oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub row: usize,
    pub col: usize,
    pub variant: KernelVariant,
    pub backend: Backend,
    pub expected: f32,
    pub got: f32,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "C[{}, {}] differs for {} on {}: expected {:e}, got {:e}",
            self.row, self.col, self.variant, self.backend, self.expected, self.got
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub variant: KernelVariant,
    pub backend: Backend,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
    pub first_divergence: Option<Divergence>,
    /// Recount mismatches, prefixed with the variant.
    pub trace_mismatches: Vec<String>,
    pub traces_recounted: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.first_divergence.is_none()
            && self.trace_mismatches.is_empty()
            && self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Launch(#[from] LaunchError),
    #[error(transparent)]
    Native(#[from] NativeError),
}

/// Compares every requested variant on both backends with
/// [`dense_reference`] bit for bit.
pub fn verify_all(
    a: &CsrMatrix,
    b: &DenseMatrix,
    op: &ReduceOp,
    opts: &VerifyOptions,
) -> Result<VerifyReport, VerifyError> {
    let expected = dense_reference(a, b, op)?;
    let mut report = VerifyReport::default();

    for &variant in &opts.variants {
        let cfg = KernelConfig::new(variant)
            .with_warp_size(opts.warp_size)
            .with_warps_per_block(opts.warps_per_block)
            .with_fault(opts.fault);

        let sim_opts = if opts.recount_traces {
            SimOptions::default().with_trace(TraceMode::Verbose)
        } else {
            SimOptions::default()
        };
        let run = run_kernel_with(a, b, &cfg, op, &sim_opts)?;
        report.record(&expected, &run.output, variant, Backend::Sim);

        if let Some(trace) = &run.trace {
            let totals = recount_trace(trace_to_string(trace).as_bytes())?;
            report.traces_recounted += 1;
            report.trace_mismatches.extend(
                compare_totals(&totals, &run.metrics)
                    .into_iter()
                    .map(|d| format!("{variant}: {d}")),
            );
        }

        let native = spmm_with(a, b, &cfg, op, opts.workers)?;
        report.record(&expected, &native, variant, Backend::Native);
    }
    Ok(report)
}

impl VerifyReport {
    fn record(&mut self, expected: &DenseMatrix, got: &DenseMatrix, variant: KernelVariant, backend: Backend) {
        let diff = expected.first_difference(got);
        if let (Some((row, col)), None) = (diff, &self.first_divergence) {
            self.first_divergence = Some(Divergence {
                row,
                col,
                variant,
                backend,
                expected: expected.get(row, col),
                got: got.get(row, col),
            });
        }
        self.checks.push(CheckOutcome {
            variant,
            backend,
            passed: diff.is_none(),
        });
    }
}
