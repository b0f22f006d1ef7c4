use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::kernel::{AccessKind, ArrayId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    /// Counts only.
    Summary,
    /// Counts plus the byte address of every active lane.
    Verbose,
}

/// One warp-wide global memory instruction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub warp: u64,
    pub array: ArrayId,
    pub kind: AccessKind,
    pub segments: u32,
    pub requested_bytes: u32,
    pub width: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lanes: Option<Vec<u64>>,
}

/// Writes records as JSON lines, one instruction per line.
pub fn write_trace<W: Write>(records: &[TraceRecord], mut w: W) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn trace_to_string(records: &[TraceRecord]) -> String {
    let mut buf = Vec::new();
    write_trace(records, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("JSON is UTF-8")
}
