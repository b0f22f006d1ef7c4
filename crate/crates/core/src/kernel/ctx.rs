use super::{FaultInjection, KernelConfig, LaunchGeometry, ReduceOp, MAX_WARP_SIZE};

/// Most accumulators a thread holds (the largest coarsening factor).
pub const MAX_CF: usize = 8;

/// Set of participating lanes, bit `l` for lane `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LaneMask(pub u64);

impl LaneMask {
    pub const EMPTY: LaneMask = LaneMask(0);

    /// Lanes `0..n`.
    pub fn first(n: usize) -> Self {
        if n >= 64 {
            LaneMask(u64::MAX)
        } else {
            LaneMask((1u64 << n) - 1)
        }
    }

    pub fn contains(self, lane: usize) -> bool {
        lane < 64 && self.0 >> lane & 1 == 1
    }

    pub fn count(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> LaneIter {
        LaneIter(self.0)
    }
}

pub struct LaneIter(u64);

impl Iterator for LaneIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let lane = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(lane)
    }
}

/// Per-thread kernel state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreadCtx {
    pub row: usize,
    /// First owned output column; the others sit at `warp_size` strides.
    pub col: usize,
    pub lane_id: usize,
    /// Warp index within its block.
    pub warp_id: usize,
    pub accumulators: [f32; MAX_CF],
    /// `col < N`. Inactive lanes still help stage sparse tiles but never
    /// touch `B` or `C`.
    pub active: bool,
}

/// A warp of [`ThreadCtx`] executing in lockstep on one `(row, tile)` pair.
///
/// All lanes share `row`, so loop trip counts are warp-uniform; divergence
/// is expressed only through lane masks. The context is reused across warps
/// with [`WarpCtx::reset`] to keep per-warp allocation off the hot path.
#[derive(Debug, Clone)]
pub struct WarpCtx {
    pub warp_global_id: usize,
    pub row: usize,
    pub tile: usize,
    pub warp_size: usize,
    pub cf: usize,
    /// Columns of `B` and `C`.
    pub n: usize,
    pub fault: Option<FaultInjection>,
    pub threads: Vec<ThreadCtx>,
    pub(crate) idx: Vec<usize>,
    pub(crate) fbuf: Vec<f32>,
    pub(crate) ubuf: Vec<u32>,
    geometry: LaunchGeometry,
}

impl WarpCtx {
    pub fn new(geometry: LaunchGeometry, cfg: &KernelConfig) -> Self {
        let ws = geometry.warp_size;
        assert!(ws <= MAX_WARP_SIZE && geometry.cf <= MAX_CF);
        let blank = ThreadCtx {
            row: 0,
            col: 0,
            lane_id: 0,
            warp_id: 0,
            accumulators: [0.0; MAX_CF],
            active: false,
        };
        WarpCtx {
            warp_global_id: 0,
            row: 0,
            tile: 0,
            warp_size: ws,
            cf: geometry.cf,
            n: geometry.n_cols,
            fault: cfg.fault,
            threads: vec![blank; ws],
            idx: vec![0; ws],
            fbuf: vec![0.0; ws],
            ubuf: vec![0; ws],
            geometry,
        }
    }

    /// Re-targets the context at another warp and seeds the accumulators.
    pub fn reset(&mut self, warp_global_id: usize, op: &ReduceOp) {
        let (row, tile) = self.geometry.warp_coords(warp_global_id);
        let (_, warp_id) = self.geometry.block_of(warp_global_id);
        self.warp_global_id = warp_global_id;
        self.row = row;
        self.tile = tile;
        for (lane, t) in self.threads.iter_mut().enumerate() {
            let col = self.geometry.lane_column(tile, lane);
            *t = ThreadCtx {
                row,
                col,
                lane_id: lane,
                warp_id,
                accumulators: [op.init(); MAX_CF],
                active: col < self.n,
            };
        }
    }

    pub fn full_mask(&self) -> LaneMask {
        LaneMask::first(self.warp_size)
    }

    /// Lanes that own at least one output column.
    pub fn active_mask(&self) -> LaneMask {
        self.slot_mask(0)
    }

    /// Lanes whose `slot`-th owned column `col + slot * warp_size` is below `N`.
    pub fn slot_mask(&self, slot: usize) -> LaneMask {
        let first = self.tile * self.geometry.tile_width() + slot * self.warp_size;
        LaneMask::first(self.n.saturating_sub(first).min(self.warp_size))
    }

    /// Exclusive end of the nonzero range the loops actually walk.
    pub(crate) fn loop_end(&self, row_start: usize, row_end: usize) -> usize {
        match self.fault {
            Some(FaultInjection::SkipTail) if row_end > row_start => {
                row_start + (row_end - row_start - 1) / self.warp_size * self.warp_size
            }
            _ => row_end,
        }
    }
}

/// Per-warp shared-memory staging area for one tile of a sparse row.
///
/// Writes are only visible to reads after [`SharedTile::sync`]; reading a
/// freshly written tile without the synchronization panics.
#[derive(Debug, Clone)]
pub struct SharedTile {
    sm_k: Vec<u32>,
    sm_v: Vec<f32>,
    unsynced: bool,
    /// Warp-wide shared-memory read instructions issued so far.
    pub loads: u64,
    /// Warp-wide shared-memory write instructions issued so far.
    pub stores: u64,
}

impl SharedTile {
    pub fn new(warp_size: usize) -> Self {
        SharedTile {
            sm_k: vec![0; warp_size],
            sm_v: vec![0.0; warp_size],
            unsynced: false,
            loads: 0,
            stores: 0,
        }
    }

    /// `sm_k[lane] = cols[lane]` and `sm_v[lane] = vals[lane]` for lanes in `mask`,
    /// as two shared-memory store instructions.
    pub fn write(&mut self, mask: LaneMask, cols: &[u32], vals: &[f32]) {
        for lane in mask.iter() {
            self.sm_k[lane] = cols[lane];
            self.sm_v[lane] = vals[lane];
        }
        self.stores += 2;
        self.unsynced = true;
    }

    /// Warp-level barrier between staging and consumption.
    pub fn sync(&mut self) {
        self.unsynced = false;
    }

    /// Broadcast read of staged element `kk` (two shared-memory loads).
    #[inline]
    pub fn read(&mut self, kk: usize) -> (u32, f32) {
        assert!(!self.unsynced, "shared tile read before warp sync");
        self.loads += 2;
        (self.sm_k[kk], self.sm_v[kk])
    }
}
