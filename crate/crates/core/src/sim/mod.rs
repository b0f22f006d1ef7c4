//! Deterministic lockstep-warp simulator with a 32-byte segment coalescing
//! model.
//!
//! Every global load or store a kernel issues becomes one [`WarpAccess`]
//! whose cost is the number of distinct aligned segments its active lanes
//! touch. The engine runs the kernel programs from [`crate::kernel`] and
//! returns the output matrix together with [`SimMetrics`].

mod coalesce;
mod engine;
mod metrics;
mod trace;

pub use coalesce::{coalesce, Coalesced, WarpAccess, SEGMENT_BYTES};
pub use engine::{run_kernel, run_kernel_with, MemoryLayout, SimOptions, SimRun};
pub use metrics::{metrics_report, ArrayTraffic, MetricsReport, SimMetrics};
pub use trace::{trace_to_string, write_trace, TraceMode, TraceRecord};
