use std::io::Write;

use serde::{Deserialize, Serialize};
use spmm_lab::native::ThroughputReport;
use spmm_lab::sim::MetricsReport;
use spmm_lab::verify::Backend;

use crate::error::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Outcome of checking a run against the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verification {
    NotRun,
    Pass,
    Fail,
}

/// One self-describing result line.
///
/// `input`, `seed`, `n`, `variant`, `op`, `warp_size` and `warps_per_block`
/// are enough to reproduce the run; `B` is always drawn from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub input: String,
    pub seed: u64,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub nnz: usize,
    pub variant: String,
    pub cf: usize,
    pub op: String,
    pub backend: Backend,
    pub warp_size: usize,
    pub warps_per_block: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub throughput: Option<ThroughputReport>,
    /// Naive median time over this run's median time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speedup_vs_naive: Option<f64>,
    pub verification: Verification,
    pub tool_version: String,
    pub timestamp: String,
}

pub fn timestamp_now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

pub fn write_jsonl<W: Write>(records: &[RunRecord], mut w: W) -> Result<(), CliError> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Flat CSV view of a [`RunRecord`]; shared fields carry the same values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub input: String,
    pub seed: u64,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub nnz: usize,
    pub variant: String,
    pub cf: usize,
    pub op: String,
    pub backend: Backend,
    pub warp_size: usize,
    pub warps_per_block: usize,
    pub gld_transactions: Option<u64>,
    pub gst_transactions: Option<u64>,
    pub requested_load_bytes: Option<u64>,
    pub transferred_load_bytes: Option<u64>,
    pub gld_efficiency: Option<f64>,
    pub sparse_load_transactions: Option<u64>,
    pub b_load_transactions: Option<u64>,
    pub shared_loads: Option<u64>,
    pub shared_stores: Option<u64>,
    pub repeats: Option<usize>,
    pub elapsed_s: Option<f64>,
    pub flops: Option<u64>,
    pub gflops: Option<f64>,
    pub checksum: Option<String>,
    pub speedup_vs_naive: Option<f64>,
    pub verification: Verification,
    pub tool_version: String,
    pub timestamp: String,
}

impl From<&RunRecord> for CsvRow {
    fn from(r: &RunRecord) -> Self {
        let m = r.metrics.as_ref();
        let t = r.throughput.as_ref();
        CsvRow {
            input: r.input.clone(),
            seed: r.seed,
            m: r.m,
            k: r.k,
            n: r.n,
            nnz: r.nnz,
            variant: r.variant.clone(),
            cf: r.cf,
            op: r.op.clone(),
            backend: r.backend,
            warp_size: r.warp_size,
            warps_per_block: r.warps_per_block,
            gld_transactions: m.map(|m| m.gld_transactions),
            gst_transactions: m.map(|m| m.gst_transactions),
            requested_load_bytes: m.map(|m| m.requested_load_bytes),
            transferred_load_bytes: m.map(|m| m.transferred_load_bytes),
            gld_efficiency: m.map(|m| m.gld_efficiency),
            sparse_load_transactions: m.map(|m| m.sparse_load_transactions),
            b_load_transactions: m.map(|m| m.b_load_transactions),
            shared_loads: m.map(|m| m.shared_loads),
            shared_stores: m.map(|m| m.shared_stores),
            repeats: t.map(|t| t.repeats),
            elapsed_s: t.map(|t| t.elapsed_s),
            flops: t.map(|t| t.flops),
            gflops: t.map(|t| t.gflops),
            checksum: t.map(|t| t.checksum.clone()),
            speedup_vs_naive: r.speedup_vs_naive,
            verification: r.verification,
            tool_version: r.tool_version.clone(),
            timestamp: r.timestamp.clone(),
        }
    }
}

pub fn write_csv<W: Write>(records: &[RunRecord], w: W) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(CsvRow::from(r))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> RunRecord {
        RunRecord {
            input: "random:8:16:1".into(),
            seed: 1,
            m: 8,
            k: 8,
            n: 4,
            nnz: 16,
            variant: "crc".into(),
            cf: 1,
            op: "sum".into(),
            backend: Backend::Native,
            warp_size: 32,
            warps_per_block: 8,
            metrics: None,
            throughput: Some(ThroughputReport {
                repeats: 1,
                workers: 1,
                elapsed_s: 1.25e-7,
                mean_elapsed_s: 1.25e-7,
                min_elapsed_s: 1.25e-7,
                samples_s: vec![1.25e-7],
                flops: 128,
                gflops: 1024.0,
                checksum: "ab".into(),
            }),
            speedup_vs_naive: None,
            verification: Verification::NotRun,
            tool_version: TOOL_VERSION.into(),
            timestamp: "2026-01-01T00:00:00.000Z".into(),
        }
    }

    #[test]
    fn csv_and_json_agree() {
        let r = record();
        let mut buf = Vec::new();
        write_csv(std::slice::from_ref(&r), &mut buf).unwrap();
        let mut rd = csv::Reader::from_reader(buf.as_slice());
        let row: CsvRow = rd.deserialize().next().unwrap().unwrap();
        assert_eq!(row, CsvRow::from(&r));
        assert_eq!(row.elapsed_s, Some(1.25e-7));
        assert_eq!(row.gld_transactions, None);
    }

    #[test]
    fn jsonl_round_trips() {
        let r = record();
        let mut buf = Vec::new();
        write_jsonl(std::slice::from_ref(&r), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.ends_with('\n'));
        assert!(!text.contains("\"metrics\""));
        let back: RunRecord = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(back, r);
    }
}
