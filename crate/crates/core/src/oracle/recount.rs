use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::OracleError;
use crate::sim::SimMetrics;

/// Segment size used by the recount, restated rather than imported.
const SEGMENT: u64 = 32;

#[derive(Debug, Deserialize)]
struct RawRecord {
    #[allow(dead_code)]
    warp: u64,
    array: String,
    kind: String,
    segments: u64,
    requested_bytes: u64,
    width: u64,
    lanes: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayTotals {
    pub requests: u64,
    pub transactions: u64,
    pub requested_bytes: u64,
}

/// Totals rebuilt from raw lane addresses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceTotals {
    pub gld_transactions: u64,
    pub gst_transactions: u64,
    pub requested_load_bytes: u64,
    pub requested_store_bytes: u64,
    pub per_array: BTreeMap<String, ArrayTotals>,
    /// Records whose own `segments` or `requested_bytes` disagreed with the
    /// recount, by 1-based line number.
    pub disagreeing_lines: Vec<usize>,
}

/// Recounts a verbose trace by enumerating every byte each record touches.
pub fn recount_trace<R: BufRead>(reader: R) -> Result<TraceTotals, OracleError> {
    let mut totals = TraceTotals::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| OracleError::Trace { line: line_no, message };
        let rec: RawRecord = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let lanes = rec
            .lanes
            .ok_or_else(|| bad("record has no lane addresses; use a verbose trace".into()))?;
        if lanes.is_empty() {
            return Err(bad("record has no active lanes".into()));
        }
        if rec.width == 0 {
            return Err(bad("access width is zero".into()));
        }

        let mut bytes = BTreeSet::new();
        for &addr in &lanes {
            for byte in addr..addr + rec.width {
                bytes.insert(byte);
            }
        }
        let segments: BTreeSet<u64> = bytes.iter().map(|b| b / SEGMENT).collect();
        let (txn, req) = (segments.len() as u64, bytes.len() as u64);
        if txn != rec.segments || req != rec.requested_bytes {
            totals.disagreeing_lines.push(line_no);
        }

        match rec.kind.as_str() {
            "load" => {
                totals.gld_transactions += txn;
                totals.requested_load_bytes += req;
            }
            "store" => {
                totals.gst_transactions += txn;
                totals.requested_store_bytes += req;
            }
            other => return Err(bad(format!("unknown access kind {other:?}"))),
        }
        let entry = totals.per_array.entry(rec.array).or_default();
        entry.requests += 1;
        entry.transactions += txn;
        entry.requested_bytes += req;
    }
    Ok(totals)
}

/// Lists every field on which the recount and the engine's counters differ.
pub fn compare_totals(totals: &TraceTotals, metrics: &SimMetrics) -> Vec<String> {
    let mut diffs = Vec::new();
    let mut check = |name: &str, ours: u64, theirs: u64| {
        if ours != theirs {
            diffs.push(format!("{name}: recount {ours} vs engine {theirs}"));
        }
    };
    check("gld_transactions", totals.gld_transactions, metrics.gld_transactions);
    check("gst_transactions", totals.gst_transactions, metrics.gst_transactions);
    check("requested_load_bytes", totals.requested_load_bytes, metrics.requested_load_bytes);
    check("requested_store_bytes", totals.requested_store_bytes, metrics.requested_store_bytes);
    for (array, t) in &metrics.per_array {
        let ours = totals.per_array.get(array.name()).copied().unwrap_or_default();
        check(&format!("{array}.requests"), ours.requests, t.requests);
        check(&format!("{array}.transactions"), ours.transactions, t.transactions);
        check(&format!("{array}.requested_bytes"), ours.requested_bytes, t.requested_bytes);
    }
    for name in totals.per_array.keys() {
        if !metrics.per_array.keys().any(|a| a.name() == name) {
            diffs.push(format!("{name}: present only in trace"));
        }
    }
    if !totals.disagreeing_lines.is_empty() {
        diffs.push(format!("trace lines with self-inconsistent counts: {:?}", totals.disagreeing_lines));
    }
    diffs
}
