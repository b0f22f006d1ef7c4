use rayon::prelude::*;

use super::NativeError;
use crate::kernel::{
    check_launch, execute_warp, launch_geometry, ArrayId, KernelConfig, KernelVariant, LaneMask,
    LaunchGeometry, ReduceOp, SharedTile, WarpCtx, WarpMemory,
};
use crate::sparse::{CsrMatrix, DenseMatrix};

/// How a native run splits its work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecPlan {
    pub variant: KernelVariant,
    pub geometry: LaunchGeometry,
    /// Worker threads; 0 means the rayon default.
    pub workers: usize,
    /// Rows per scheduled chunk. A chunk runs all tasks of its rows.
    pub rows_per_chunk: usize,
}

impl ExecPlan {
    pub fn new(m: usize, n: usize, cfg: &KernelConfig, workers: usize) -> Self {
        ExecPlan {
            variant: cfg.variant,
            geometry: launch_geometry(m, n, cfg),
            workers,
            rows_per_chunk: 32,
        }
    }

    /// All `(row, column tile)` work items in launch order.
    pub fn tasks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.geometry.n_warps()).map(|w| self.geometry.warp_coords(w))
    }

    pub fn n_tasks(&self) -> usize {
        self.geometry.n_warps()
    }
}

/// Computes `C = A ⊗ B` under `op` with `variant` on `workers` threads.
pub fn spmm(
    a: &CsrMatrix,
    b: &DenseMatrix,
    variant: KernelVariant,
    op: &ReduceOp,
    workers: usize,
) -> Result<DenseMatrix, NativeError> {
    spmm_with(a, b, &KernelConfig::new(variant), op, workers)
}

pub fn spmm_with(
    a: &CsrMatrix,
    b: &DenseMatrix,
    cfg: &KernelConfig,
    op: &ReduceOp,
    workers: usize,
) -> Result<DenseMatrix, NativeError> {
    check_launch(a, b, cfg)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let plan = ExecPlan::new(a.n_rows(), b.n_cols(), cfg, workers);
    Ok(pool.install(|| run_plan(a, b, cfg, op, &plan)))
}

/// Runs a validated plan on the current rayon pool.
pub(crate) fn run_plan(
    a: &CsrMatrix,
    b: &DenseMatrix,
    cfg: &KernelConfig,
    op: &ReduceOp,
    plan: &ExecPlan,
) -> DenseMatrix {
    let (m, n) = (a.n_rows(), b.n_cols());
    let mut c = DenseMatrix::zeros(m, n);
    if m == 0 || n == 0 {
        return c;
    }
    let geometry = plan.geometry;
    let rows_per_chunk = plan.rows_per_chunk.max(1);
    c.data_mut()
        .par_chunks_mut(rows_per_chunk * n)
        .enumerate()
        .for_each(|(ci, chunk)| {
            let first_row = ci * rows_per_chunk;
            let rows = chunk.len() / n;
            let mut port = NativePort {
                a,
                b,
                c: chunk,
                c_offset: first_row * n,
            };
            let mut warp = WarpCtx::new(geometry, cfg);
            let mut tile = SharedTile::new(cfg.warp_size);
            let per_row = geometry.grid_col_tiles;
            for w in first_row * per_row..(first_row + rows) * per_row {
                warp.reset(w, op);
                execute_warp(plan.variant, &mut warp, op, &mut port, &mut tile);
            }
        });
    c
}

/// Direct, unmetered memory for one chunk of output rows.
struct NativePort<'a> {
    a: &'a CsrMatrix,
    b: &'a DenseMatrix,
    c: &'a mut [f32],
    c_offset: usize,
}

impl NativePort<'_> {
    #[inline]
    fn u32s(&self, array: ArrayId) -> &[u32] {
        if array == ArrayId::RowPtr {
            self.a.row_ptr()
        } else {
            self.a.col_ind()
        }
    }

    #[inline]
    fn f32s(&self, array: ArrayId) -> &[f32] {
        if array == ArrayId::Val {
            self.a.vals()
        } else {
            self.b.data()
        }
    }
}

impl WarpMemory for NativePort<'_> {
    #[inline]
    fn load_u32(&mut self, array: ArrayId, idx: &[usize], mask: LaneMask, out: &mut [u32]) {
        let src = self.u32s(array);
        for lane in mask.iter() {
            out[lane] = src[idx[lane]];
        }
    }

    #[inline]
    fn load_f32(&mut self, array: ArrayId, idx: &[usize], mask: LaneMask, out: &mut [f32]) {
        let src = self.f32s(array);
        for lane in mask.iter() {
            out[lane] = src[idx[lane]];
        }
    }

    #[inline]
    fn load_u32_uniform(&mut self, array: ArrayId, idx: usize, _mask: LaneMask) -> u32 {
        self.u32s(array)[idx]
    }

    #[inline]
    fn load_f32_uniform(&mut self, array: ArrayId, idx: usize, _mask: LaneMask) -> f32 {
        self.f32s(array)[idx]
    }

    #[inline]
    fn store_f32(&mut self, _array: ArrayId, idx: &[usize], mask: LaneMask, vals: &[f32]) {
        for lane in mask.iter() {
            self.c[idx[lane] - self.c_offset] = vals[lane];
        }
    }
}
