use rayon::prelude::*;

use super::coalesce::{coalesce, WarpAccess};
use super::metrics::{kind_of, MetricsAccumulator, SimMetrics};
use super::trace::{TraceMode, TraceRecord};
use crate::kernel::{
    check_launch, execute_warp, launch_geometry, ArrayId, KernelConfig, LaneMask, LaunchError,
    LaunchGeometry, ReduceOp, SharedTile, WarpCtx, WarpMemory, MAX_WARP_SIZE,
};
use crate::sparse::{CsrMatrix, DenseMatrix, DEFAULT_BASE_ALIGNMENT};

/// Byte addresses of the five global arrays in the simulated address space.
///
/// Arrays are laid out in the order `RowPtr, ColInd, Val, B, C`. Each base is
/// an odd multiple of the array's alignment, so an array declared 16-byte
/// aligned really is misaligned with respect to 32-byte segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryLayout {
    bases: [u64; 5],
}

impl MemoryLayout {
    pub fn new(a: &CsrMatrix, b: &DenseMatrix) -> Self {
        let m = a.n_rows() as u64;
        let nnz = a.nnz() as u64;
        let sizes = [
            4 * (m + 1),
            4 * nnz,
            4 * nnz,
            4 * (b.n_rows() * b.n_cols()) as u64,
            4 * m * b.n_cols() as u64,
        ];
        let aligns = [
            DEFAULT_BASE_ALIGNMENT,
            DEFAULT_BASE_ALIGNMENT,
            DEFAULT_BASE_ALIGNMENT,
            b.base_alignment(),
            DEFAULT_BASE_ALIGNMENT,
        ];
        let mut bases = [0u64; 5];
        let mut cursor = 0u64;
        for i in 0..5 {
            let align = aligns[i];
            bases[i] = cursor.div_ceil(2 * align) * 2 * align + align;
            cursor = bases[i] + sizes[i];
        }
        MemoryLayout { bases }
    }

    pub fn base(&self, array: ArrayId) -> u64 {
        self.bases[array.index()]
    }

    /// Byte address of element `idx` of a 4-byte-element array.
    #[inline]
    pub fn address(&self, array: ArrayId, idx: usize) -> u64 {
        self.bases[array.index()] + 4 * idx as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    /// Evaluate row chunks on the rayon pool.
    pub parallel: bool,
    pub trace: Option<TraceMode>,
    /// Rows of `A` per unit of parallel work.
    pub rows_per_chunk: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            parallel: false,
            trace: None,
            rows_per_chunk: 64,
        }
    }
}

impl SimOptions {
    pub fn parallel() -> Self {
        SimOptions {
            parallel: true,
            ..Self::default()
        }
    }

    pub fn with_trace(mut self, mode: TraceMode) -> Self {
        self.trace = Some(mode);
        self
    }
}

#[derive(Debug, Clone)]
pub struct SimRun {
    pub output: DenseMatrix,
    pub metrics: SimMetrics,
    /// Every global access in warp order, when tracing was requested.
    pub trace: Option<Vec<TraceRecord>>,
    pub geometry: LaunchGeometry,
    pub layout: MemoryLayout,
}

/// Runs `cfg.variant` on the simulator and returns `C` with its memory metrics.
pub fn run_kernel(
    a: &CsrMatrix,
    b: &DenseMatrix,
    cfg: &KernelConfig,
    op: &ReduceOp,
) -> Result<(DenseMatrix, SimMetrics), LaunchError> {
    let run = run_kernel_with(a, b, cfg, op, &SimOptions::default())?;
    Ok((run.output, run.metrics))
}

pub fn run_kernel_with(
    a: &CsrMatrix,
    b: &DenseMatrix,
    cfg: &KernelConfig,
    op: &ReduceOp,
    opts: &SimOptions,
) -> Result<SimRun, LaunchError> {
    check_launch(a, b, cfg)?;
    let (m, n) = (a.n_rows(), b.n_cols());
    let geometry = launch_geometry(m, n, cfg);
    let layout = MemoryLayout::new(a, b);
    let mut output = DenseMatrix::zeros(m, n);

    if m == 0 || n == 0 {
        return Ok(SimRun {
            output,
            metrics: SimMetrics::default(),
            trace: opts.trace.map(|_| Vec::new()),
            geometry,
            layout,
        });
    }

    let rows_per_chunk = opts.rows_per_chunk.max(1);
    let chunk = |(ci, c): (usize, &mut [f32])| {
        let first_row = ci * rows_per_chunk;
        run_rows(a, b, cfg, op, opts.trace, &geometry, &layout, first_row, c)
    };
    let parts: Vec<(SimMetrics, Vec<TraceRecord>)> = if opts.parallel {
        output
            .data_mut()
            .par_chunks_mut(rows_per_chunk * n)
            .enumerate()
            .map(chunk)
            .collect()
    } else {
        output
            .data_mut()
            .chunks_mut(rows_per_chunk * n)
            .enumerate()
            .map(chunk)
            .collect()
    };

    let mut metrics = SimMetrics::default();
    let mut trace = opts.trace.map(|_| Vec::new());
    for (m, t) in parts {
        metrics.merge(&m);
        if let Some(all) = trace.as_mut() {
            all.extend(t);
        }
    }
    Ok(SimRun {
        output,
        metrics,
        trace,
        geometry,
        layout,
    })
}

/// Runs every warp of rows `first_row..` that fall inside `c`.
#[allow(clippy::too_many_arguments)]
fn run_rows(
    a: &CsrMatrix,
    b: &DenseMatrix,
    cfg: &KernelConfig,
    op: &ReduceOp,
    trace: Option<TraceMode>,
    geometry: &LaunchGeometry,
    layout: &MemoryLayout,
    first_row: usize,
    c: &mut [f32],
) -> (SimMetrics, Vec<TraceRecord>) {
    let n = geometry.n_cols;
    let rows = c.len() / n;
    let mut port = SimPort {
        a,
        b,
        c,
        c_offset: first_row * n,
        layout,
        acc: MetricsAccumulator::default(),
        trace_mode: trace,
        trace: Vec::new(),
        warp: 0,
        addrs: [0; MAX_WARP_SIZE],
    };
    let mut warp = WarpCtx::new(*geometry, cfg);
    let mut tiles: Vec<SharedTile> = (0..cfg.warps_per_block)
        .map(|_| SharedTile::new(cfg.warp_size))
        .collect();

    let per_row = geometry.grid_col_tiles;
    for w in first_row * per_row..(first_row + rows) * per_row {
        warp.reset(w, op);
        port.warp = w as u64;
        let (_, in_block) = geometry.block_of(w);
        execute_warp(cfg.variant, &mut warp, op, &mut port, &mut tiles[in_block]);
        port.acc.warps += 1;
    }
    for t in &tiles {
        port.acc.shared_loads += t.loads;
        port.acc.shared_stores += t.stores;
    }
    (port.acc.finish(), port.trace)
}

/// Metered view of global memory for one chunk of output rows.
struct SimPort<'a> {
    a: &'a CsrMatrix,
    b: &'a DenseMatrix,
    c: &'a mut [f32],
    c_offset: usize,
    layout: &'a MemoryLayout,
    acc: MetricsAccumulator,
    trace_mode: Option<TraceMode>,
    trace: Vec<TraceRecord>,
    warp: u64,
    addrs: [u64; MAX_WARP_SIZE],
}

impl SimPort<'_> {
    fn meter(&mut self, array: ArrayId, mask: LaneMask) {
        let kind = kind_of(array);
        let c = coalesce(&WarpAccess {
            array,
            kind,
            width: 4,
            addrs: &self.addrs,
            mask,
        });
        if mask.is_empty() {
            return;
        }
        self.acc.record(array, c);
        if let Some(mode) = self.trace_mode {
            let lanes = match mode {
                TraceMode::Summary => None,
                TraceMode::Verbose => Some(mask.iter().map(|l| self.addrs[l]).collect()),
            };
            self.trace.push(TraceRecord {
                warp: self.warp,
                array,
                kind,
                segments: c.transactions,
                requested_bytes: c.requested_bytes,
                width: 4,
                lanes,
            });
        }
    }

    fn meter_gather(&mut self, array: ArrayId, idx: &[usize], mask: LaneMask) {
        for lane in mask.iter() {
            self.addrs[lane] = self.layout.address(array, idx[lane]);
        }
        self.meter(array, mask);
    }

    fn meter_uniform(&mut self, array: ArrayId, idx: usize, mask: LaneMask) {
        let addr = self.layout.address(array, idx);
        for lane in mask.iter() {
            self.addrs[lane] = addr;
        }
        self.meter(array, mask);
    }

    fn u32_source(&self, array: ArrayId) -> &[u32] {
        match array {
            ArrayId::RowPtr => self.a.row_ptr(),
            ArrayId::ColInd => self.a.col_ind(),
            other => unreachable!("{other} holds no integers"),
        }
    }

    fn f32_source(&self, array: ArrayId) -> &[f32] {
        match array {
            ArrayId::Val => self.a.vals(),
            ArrayId::B => self.b.data(),
            other => unreachable!("kernels never load {other} as a real array"),
        }
    }
}

impl WarpMemory for SimPort<'_> {
    fn load_u32(&mut self, array: ArrayId, idx: &[usize], mask: LaneMask, out: &mut [u32]) {
        self.meter_gather(array, idx, mask);
        let src = self.u32_source(array);
        for lane in mask.iter() {
            out[lane] = src[idx[lane]];
        }
    }

    fn load_f32(&mut self, array: ArrayId, idx: &[usize], mask: LaneMask, out: &mut [f32]) {
        self.meter_gather(array, idx, mask);
        let src = self.f32_source(array);
        for lane in mask.iter() {
            out[lane] = src[idx[lane]];
        }
    }

    fn load_u32_uniform(&mut self, array: ArrayId, idx: usize, mask: LaneMask) -> u32 {
        self.meter_uniform(array, idx, mask);
        self.u32_source(array)[idx]
    }

    fn load_f32_uniform(&mut self, array: ArrayId, idx: usize, mask: LaneMask) -> f32 {
        self.meter_uniform(array, idx, mask);
        self.f32_source(array)[idx]
    }

    fn store_f32(&mut self, array: ArrayId, idx: &[usize], mask: LaneMask, vals: &[f32]) {
        debug_assert_eq!(array, ArrayId::C);
        self.meter_gather(array, idx, mask);
        for lane in mask.iter() {
            self.c[idx[lane] - self.c_offset] = vals[lane];
        }
    }
}
