use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::coalesce::{Coalesced, SEGMENT_BYTES};
use crate::kernel::{AccessKind, ArrayId};

/// Traffic for one global array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ArrayTraffic {
    /// Warp-wide instructions issued.
    pub requests: u64,
    pub transactions: u64,
    pub requested_bytes: u64,
    pub transferred_bytes: u64,
}

impl ArrayTraffic {
    fn add(&mut self, other: &ArrayTraffic) {
        self.requests += other.requests;
        self.transactions += other.transactions;
        self.requested_bytes += other.requested_bytes;
        self.transferred_bytes += other.transferred_bytes;
    }
}

/// Memory counters of a simulated kernel run.
///
/// Transactions are 32-byte segments. Load efficiency counts loads only;
/// stores to `C` are reported in `gst_transactions` and `per_array[C]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMetrics {
    pub gld_transactions: u64,
    pub gst_transactions: u64,
    pub requested_load_bytes: u64,
    pub transferred_load_bytes: u64,
    pub requested_store_bytes: u64,
    pub gld_efficiency: f64,
    pub per_array: BTreeMap<ArrayId, ArrayTraffic>,
    pub shared_loads: u64,
    pub shared_stores: u64,
    pub warps: u64,
}

impl Default for SimMetrics {
    fn default() -> Self {
        SimMetrics {
            gld_transactions: 0,
            gst_transactions: 0,
            requested_load_bytes: 0,
            transferred_load_bytes: 0,
            requested_store_bytes: 0,
            gld_efficiency: 0.0,
            per_array: ArrayId::ALL
                .iter()
                .map(|&a| (a, ArrayTraffic::default()))
                .collect(),
            shared_loads: 0,
            shared_stores: 0,
            warps: 0,
        }
    }
}

impl SimMetrics {
    pub fn array(&self, array: ArrayId) -> ArrayTraffic {
        self.per_array.get(&array).copied().unwrap_or_default()
    }

    /// `ColInd` plus `Val` load transactions.
    pub fn sparse_load_transactions(&self) -> u64 {
        self.array(ArrayId::ColInd).transactions + self.array(ArrayId::Val).transactions
    }

    /// Adds another run's counters; merging is order-independent.
    pub fn merge(&mut self, other: &SimMetrics) {
        self.gld_transactions += other.gld_transactions;
        self.gst_transactions += other.gst_transactions;
        self.requested_load_bytes += other.requested_load_bytes;
        self.transferred_load_bytes += other.transferred_load_bytes;
        self.requested_store_bytes += other.requested_store_bytes;
        self.shared_loads += other.shared_loads;
        self.shared_stores += other.shared_stores;
        self.warps += other.warps;
        for (array, traffic) in &other.per_array {
            self.per_array.entry(*array).or_default().add(traffic);
        }
        self.gld_efficiency = efficiency(self.requested_load_bytes, self.transferred_load_bytes);
    }

    /// Per-array transactions add up to the load and store totals.
    pub fn is_consistent(&self) -> bool {
        let (mut loads, mut stores) = (0, 0);
        for (array, t) in &self.per_array {
            if *array == ArrayId::C {
                stores += t.transactions;
            } else {
                loads += t.transactions;
            }
        }
        loads == self.gld_transactions
            && stores == self.gst_transactions
            && self.transferred_load_bytes == SEGMENT_BYTES * self.gld_transactions
    }
}

fn efficiency(requested: u64, transferred: u64) -> f64 {
    if transferred == 0 {
        0.0
    } else {
        requested as f64 / transferred as f64
    }
}

/// Flat counters used on the simulator's hot path.
#[derive(Debug, Clone, Default)]
pub(crate) struct MetricsAccumulator {
    arrays: [ArrayTraffic; 5],
    pub shared_loads: u64,
    pub shared_stores: u64,
    pub warps: u64,
}

impl MetricsAccumulator {
    #[inline]
    pub fn record(&mut self, array: ArrayId, c: Coalesced) {
        let t = &mut self.arrays[array.index()];
        t.requests += 1;
        t.transactions += c.transactions as u64;
        t.requested_bytes += c.requested_bytes as u64;
        t.transferred_bytes += c.transactions as u64 * SEGMENT_BYTES;
    }

    pub fn finish(&self) -> SimMetrics {
        let mut m = SimMetrics {
            shared_loads: self.shared_loads,
            shared_stores: self.shared_stores,
            warps: self.warps,
            ..SimMetrics::default()
        };
        for array in ArrayId::ALL {
            let t = self.arrays[array.index()];
            m.per_array.insert(array, t);
            match kind_of(array) {
                AccessKind::Load => {
                    m.gld_transactions += t.transactions;
                    m.requested_load_bytes += t.requested_bytes;
                    m.transferred_load_bytes += t.transferred_bytes;
                }
                AccessKind::Store => {
                    m.gst_transactions += t.transactions;
                    m.requested_store_bytes += t.requested_bytes;
                }
            }
        }
        m.gld_efficiency = efficiency(m.requested_load_bytes, m.transferred_load_bytes);
        m
    }
}

/// Kernels only ever store to `C` and only ever load the other arrays.
pub(crate) fn kind_of(array: ArrayId) -> AccessKind {
    if array == ArrayId::C {
        AccessKind::Store
    } else {
        AccessKind::Load
    }
}

/// Serializable summary of a [`SimMetrics`] with derived ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub gld_transactions: u64,
    pub gst_transactions: u64,
    pub requested_load_bytes: u64,
    pub transferred_load_bytes: u64,
    pub requested_store_bytes: u64,
    pub gld_efficiency: f64,
    pub sparse_load_transactions: u64,
    pub b_load_transactions: u64,
    /// Share of load transactions spent on `B`.
    pub b_load_share: f64,
    pub shared_loads: u64,
    pub shared_stores: u64,
    pub warps: u64,
    pub per_array: BTreeMap<ArrayId, ArrayTraffic>,
    /// Per-array transactions add up to the totals.
    pub consistent: bool,
}

pub fn metrics_report(m: &SimMetrics) -> MetricsReport {
    let b = m.array(ArrayId::B).transactions;
    MetricsReport {
        gld_transactions: m.gld_transactions,
        gst_transactions: m.gst_transactions,
        requested_load_bytes: m.requested_load_bytes,
        transferred_load_bytes: m.transferred_load_bytes,
        requested_store_bytes: m.requested_store_bytes,
        gld_efficiency: efficiency(m.requested_load_bytes, m.transferred_load_bytes),
        sparse_load_transactions: m.sparse_load_transactions(),
        b_load_transactions: b,
        b_load_share: if m.gld_transactions == 0 {
            0.0
        } else {
            b as f64 / m.gld_transactions as f64
        },
        shared_loads: m.shared_loads,
        shared_stores: m.shared_stores,
        warps: m.warps,
        per_array: m.per_array.clone(),
        consistent: m.is_consistent(),
    }
}
