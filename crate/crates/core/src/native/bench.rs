use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::exec::{run_plan, ExecPlan};
use super::NativeError;
use crate::kernel::{check_launch, KernelConfig, ReduceOp};
use crate::sparse::{CsrMatrix, DenseMatrix};

pub const DEFAULT_REPEATS: usize = 9;

/// Smallest elapsed time reported, so throughput stays finite.
const MIN_ELAPSED_S: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputReport {
    pub repeats: usize,
    pub workers: usize,
    /// Median of the samples.
    pub elapsed_s: f64,
    pub mean_elapsed_s: f64,
    pub min_elapsed_s: f64,
    pub samples_s: Vec<f64>,
    /// `2 * nnz * N`, from the dimensions alone.
    pub flops: u64,
    pub gflops: f64,
    /// SHA-256 of the output's little-endian bytes.
    pub checksum: String,
}

/// Times `repeats` native runs and reports median throughput.
pub fn bench(
    a: &CsrMatrix,
    b: &DenseMatrix,
    cfg: &KernelConfig,
    op: &ReduceOp,
    workers: usize,
    repeats: usize,
) -> Result<ThroughputReport, NativeError> {
    if repeats == 0 {
        return Err(NativeError::NoRepeats);
    }
    check_launch(a, b, cfg)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let plan = ExecPlan::new(a.n_rows(), b.n_cols(), cfg, workers);

    let mut samples = Vec::with_capacity(repeats);
    let mut digest = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let c = pool.install(|| run_plan(a, b, cfg, op, &plan));
        samples.push(start.elapsed().as_secs_f64().max(MIN_ELAPSED_S));
        digest.get_or_insert_with(|| checksum(&c));
    }

    let flops = 2 * a.nnz() as u64 * b.n_cols() as u64;
    let elapsed = median(&samples);
    Ok(ThroughputReport {
        repeats,
        workers: pool.current_num_threads(),
        elapsed_s: elapsed,
        mean_elapsed_s: samples.iter().sum::<f64>() / repeats as f64,
        min_elapsed_s: samples.iter().copied().fold(f64::INFINITY, f64::min),
        samples_s: samples,
        flops,
        gflops: flops as f64 / elapsed / 1e9,
        checksum: digest.unwrap_or_default(),
    })
}

/// Hex SHA-256 of the matrix shape and elements.
pub fn checksum(c: &DenseMatrix) -> String {
    let mut h = Sha256::new();
    h.update((c.n_rows() as u64).to_le_bytes());
    h.update((c.n_cols() as u64).to_le_bytes());
    for x in c.data() {
        h.update(x.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// How many times faster `candidate` ran than `baseline`.
pub fn speedup(baseline: &ThroughputReport, candidate: &ThroughputReport) -> f64 {
    baseline.elapsed_s / candidate.elapsed_s
}

fn median(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let mid = s.len() / 2;
    if s.len() % 2 == 1 {
        s[mid]
    } else {
        (s[mid - 1] + s[mid]) / 2.0
    }
}
